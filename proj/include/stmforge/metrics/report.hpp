#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stmforge/metrics/reference.hpp"

namespace stmforge::metrics {

struct ImagePair {
    std::string id;
    Image ground_truth;
    Image prediction;
};

struct PairRow {
    std::string id;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct Report {
    std::vector<PairRow> rows;
    double mean_psnr = 0.0;
    double median_psnr = 0.0;
    double mean_ssim = 0.0;
    double median_ssim = 0.0;
    SsimMode ssim_mode = SsimMode::windowed;
    std::optional<double> kid;
    std::optional<double> cmmd;
};

/// Both images of each pair are mapped to [0, 1] by their norm state
/// (symmetric via (x + 1) / 2) before scoring. Identical pairs give an
/// infinite PSNR, which propagates into the mean.
Report evaluate_pairs(const std::vector<ImagePair>& pairs, SsimMode mode = SsimMode::windowed);

/// "id,psnr,ssim" rows, then mean and median rows, then kid/cmmd if set.
void write_report_csv(const std::filesystem::path& path, const Report& report);
std::string report_csv(const Report& report);

}  // namespace stmforge::metrics
