#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stmforge/degrade/dataset.hpp"
#include "stmforge/genmodel/denoiser.hpp"
#include "stmforge/genmodel/processes.hpp"
#include "stmforge/metrics/report.hpp"

namespace stmforge::app {

/// One line of the per-degradation difficulty report.
struct ProbeRow {
    std::string degradation;
    std::string task;
    int samples = 0;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    double kid = 0.0;
    double cmmd = 0.0;
};

struct ProbeOptions {
    int count = 50;
    std::uint64_t seed = 0;
    degrade::Task sr_task = degrade::Task::sr4;
    degrade::DegradeConfig base;
    genmodel::SamplerConfig sampler;
    metrics::SsimMode ssim = metrics::SsimMode::windowed;
    unsigned jobs = 1;
};

/// Builds an in-memory targeted set for each of the five degradation types
/// (restore task) and for lowres_only (opts.sr_task), restores every sample
/// with `model` (or scores the degraded input when model is null), and scores
/// against ground truth.
std::vector<ProbeRow> difficulty_probe(const std::vector<degrade::PristineImage>& sources,
                                       const genmodel::Denoiser* model, const ProbeOptions& opts);

inline constexpr const char* kProbeHeader = "degradation,task,samples,psnr,ssim,kid,cmmd";
std::string probe_csv(const std::vector<ProbeRow>& rows);

}  // namespace stmforge::app
