#include "stmforge/app/probe.hpp"

#include <cstdio>

#include "stmforge/common/parallel.hpp"
#include "stmforge/metrics/embedding.hpp"

namespace stmforge::app {

using imagecore::Image;

std::vector<ProbeRow> difficulty_probe(const std::vector<degrade::PristineImage>& sources,
                                       const genmodel::Denoiser* model, const ProbeOptions& opts) {
    using degrade::TargetedDegradation;
    const TargetedDegradation kinds[] = {TargetedDegradation::multitip, TargetedDegradation::misalign,
                                         TargetedDegradation::tipchange, TargetedDegradation::blunt,
                                         TargetedDegradation::scanline, TargetedDegradation::lowres_only};
    const metrics::RandomProjectionEmbedder embedder;
    std::vector<ProbeRow> rows;
    for (const auto kind : kinds) {
        const degrade::Task task = kind == TargetedDegradation::lowres_only ? opts.sr_task : degrade::Task::restore;
        const auto samples =
            degrade::generate_samples(sources, task, static_cast<std::size_t>(opts.count), opts.seed,
                                      degrade::targeted_stream(kind), degrade::targeted_config(opts.base, kind), opts.jobs);
        std::vector<metrics::ImagePair> pairs(samples.size());
        parallel_for(samples.size(), opts.jobs, [&](std::size_t i) {
            const auto& s = samples[i];
            Image pred = model ? genmodel::run_sampler(*model, s.degraded, opts.sampler, derive_seed(opts.seed, i))
                               : s.degraded;
            pairs[i] = {std::to_string(i), s.ground_truth, std::move(pred)};
        });
        const auto report = metrics::evaluate_pairs(pairs, opts.ssim);
        std::vector<Image> gt, pred;
        for (const auto& p : pairs) {
            gt.push_back(p.ground_truth);
            pred.push_back(p.prediction);
        }
        const auto eg = metrics::embed_all(embedder, gt), ep = metrics::embed_all(embedder, pred);
        ProbeRow row;
        row.degradation = std::string(degrade::to_string(kind));
        row.task = std::string(degrade::to_string(task));
        row.samples = opts.count;
        row.mean_psnr = report.mean_psnr;
        row.mean_ssim = report.mean_ssim;
        row.kid = opts.count >= 2 ? metrics::kid(eg, ep) : 0.0;
        row.cmmd = opts.count >= 2 ? metrics::cmmd(eg, ep) : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string probe_csv(const std::vector<ProbeRow>& rows) {
    std::string out = std::string(kProbeHeader) + "\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%d,%.6f,%.6f,%.6g,%.6g\n", r.degradation.c_str(), r.task.c_str(), r.samples,
                      r.mean_psnr, r.mean_ssim, r.kid, r.cmmd);
        out += buf;
    }
    return out;
}

}  // namespace stmforge::app
