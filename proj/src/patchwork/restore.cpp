#include "stmforge/patchwork/restore.hpp"

#include <stdexcept>

#include "stmforge/common/parallel.hpp"
#include "stmforge/common/rng.hpp"
#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::patchwork {

Image SamplerRestorer::restore(const Image& patch, std::uint64_t seed) const {
    return genmodel::run_sampler(model_, patch, cfg_, seed);
}

Image restore_image(const PatchRestorer& restorer, const Image& img, const RestoreOptions& opts) {
    const PatchPlan plan = plan_patches(img.height(), img.width(), opts.patch, opts.overlap);
    const auto inputs = extract_patches(img, plan);
    std::vector<Image> outputs(inputs.size());
    parallel_for(inputs.size(), opts.jobs,
                 [&](std::size_t k) { outputs[k] = restorer.restore(inputs[k], derive_seed(opts.seed, k)); });
    return assemble(outputs, plan);
}

Image restore_image(const genmodel::Denoiser& model, const genmodel::SamplerConfig& sampler, const Image& img,
                    const RestoreOptions& opts) {
    return restore_image(SamplerRestorer(model, sampler), img, opts);
}

Image super_resolve(const PatchRestorer& restorer, const Image& img, int factor, const RestoreOptions& opts) {
    if (factor != 2 && factor != 4) throw std::invalid_argument("super-resolution factor must be 2 or 4");
    return restore_image(restorer, imagecore::resample_y(img, factor, imagecore::ResampleDirection::up_nearest), opts);
}

Image super_resolve(const genmodel::Denoiser& model, const genmodel::SamplerConfig& sampler, const Image& img,
                    int factor, const RestoreOptions& opts) {
    return super_resolve(SamplerRestorer(model, sampler), img, factor, opts);
}

}  // namespace stmforge::patchwork
