#pragma once

#include <cstdint>

#include "stmforge/genmodel/denoiser.hpp"
#include "stmforge/genmodel/processes.hpp"
#include "stmforge/patchwork/plan.hpp"

namespace stmforge::patchwork {

/// Maps one degraded patch to its restoration.
class PatchRestorer {
public:
    virtual ~PatchRestorer() = default;
    virtual Image restore(const Image& patch, std::uint64_t seed) const = 0;
};

/// Returns its input; used to check the tiling round trip.
class IdentityRestorer final : public PatchRestorer {
public:
    Image restore(const Image& patch, std::uint64_t) const override { return patch; }
};

/// Conditioned sampling with a trained denoiser.
class SamplerRestorer final : public PatchRestorer {
public:
    SamplerRestorer(const genmodel::Denoiser& model, genmodel::SamplerConfig cfg) : model_(model), cfg_(cfg) {}
    Image restore(const Image& patch, std::uint64_t seed) const override;

private:
    const genmodel::Denoiser& model_;
    genmodel::SamplerConfig cfg_;
};

struct RestoreOptions {
    int patch = kDefaultPatch;
    int overlap = kDefaultOverlap;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

/// Tiles, restores each patch with seed derive_seed(opts.seed, patch index),
/// and reassembles. Images smaller than the patch are rejected.
Image restore_image(const PatchRestorer& restorer, const Image& img, const RestoreOptions& opts = {});

Image restore_image(const genmodel::Denoiser& model, const genmodel::SamplerConfig& sampler, const Image& img,
                    const RestoreOptions& opts = {});

/// Nearest row upsampling by `factor` (2 or 4), then restore_image.
Image super_resolve(const PatchRestorer& restorer, const Image& img, int factor, const RestoreOptions& opts = {});

Image super_resolve(const genmodel::Denoiser& model, const genmodel::SamplerConfig& sampler, const Image& img,
                    int factor, const RestoreOptions& opts = {});

}  // namespace stmforge::patchwork
