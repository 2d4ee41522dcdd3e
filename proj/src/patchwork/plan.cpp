#include "stmforge/patchwork/plan.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::patchwork {

namespace {

std::vector<int> axis_positions(int n, int patch, int stride) {
    std::vector<int> pos{0};
    while (pos.back() + patch < n) pos.push_back(std::min(pos.back() + stride, n - patch));
    return pos;
}

// Nominal profile: ramps on interior edges, flat on image borders, then
// renormalized so the profiles sum to 1 along the axis.
std::vector<std::vector<double>> axis_weights(int n, int patch, int overlap, const std::vector<int>& pos) {
    const std::size_t m = pos.size();
    std::vector<std::vector<double>> w(m, std::vector<double>(static_cast<std::size_t>(patch), 1.0));
    for (std::size_t i = 0; i < m; ++i)
        for (int j = 0; j < overlap; ++j) {
            const double up = rising_ramp(j, overlap);
            if (i > 0) w[i][static_cast<std::size_t>(j)] *= up;
            if (i + 1 < m) w[i][static_cast<std::size_t>(patch - 1 - j)] *= up;
        }
    std::vector<double> total(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (int j = 0; j < patch; ++j) total[static_cast<std::size_t>(pos[i] + j)] += w[i][static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < m; ++i)
        for (int j = 0; j < patch; ++j) w[i][static_cast<std::size_t>(j)] /= total[static_cast<std::size_t>(pos[i] + j)];
    return w;
}

}  // namespace

double rising_ramp(int j, int overlap) {
    const double s = std::sin(0.5 * std::numbers::pi * (j + 0.5) / overlap);
    return s * s;
}

Placement PatchPlan::placement(std::size_t k) const {
    const std::size_t nc = col_positions.size();
    return {row_positions.at(k / nc), col_positions.at(k % nc)};
}

Image PatchPlan::window(std::size_t k) const {
    const std::size_t nc = col_positions.size();
    const auto& wr = row_weights.at(k / nc);
    const auto& wc = col_weights.at(k % nc);
    std::vector<double> px(static_cast<std::size_t>(patch) * patch);
    for (int r = 0; r < patch; ++r)
        for (int c = 0; c < patch; ++c)
            px[static_cast<std::size_t>(r) * patch + c] = wr[static_cast<std::size_t>(r)] * wc[static_cast<std::size_t>(c)];
    return Image(patch, patch, std::move(px));
}

PatchPlan plan_patches(int h, int w, int patch, int overlap) {
    if (patch <= 0) throw std::invalid_argument("patch size must be positive");
    if (overlap <= 0 || 2 * overlap > patch)
        throw std::invalid_argument("overlap must satisfy 0 < overlap <= patch / 2, got " + std::to_string(overlap));
    if (h < patch || w < patch)
        throw std::invalid_argument("image " + std::to_string(h) + "x" + std::to_string(w) + " is smaller than patch " +
                                    std::to_string(patch));
    PatchPlan p;
    p.height = h;
    p.width = w;
    p.patch = patch;
    p.overlap = overlap;
    p.row_positions = axis_positions(h, patch, patch - overlap);
    p.col_positions = axis_positions(w, patch, patch - overlap);
    p.row_weights = axis_weights(h, patch, overlap, p.row_positions);
    p.col_weights = axis_weights(w, patch, overlap, p.col_positions);
    return p;
}

Image cos2_window(int patch, int overlap) {
    if (patch <= 0 || overlap <= 0 || 2 * overlap > patch)
        throw std::invalid_argument("cos2_window needs 0 < overlap <= patch / 2");
    std::vector<double> prof(static_cast<std::size_t>(patch), 1.0);
    for (int j = 0; j < overlap; ++j) {
        prof[static_cast<std::size_t>(j)] = rising_ramp(j, overlap);
        prof[static_cast<std::size_t>(patch - 1 - j)] = rising_ramp(j, overlap);
    }
    std::vector<double> px(static_cast<std::size_t>(patch) * patch);
    for (int r = 0; r < patch; ++r)
        for (int c = 0; c < patch; ++c)
            px[static_cast<std::size_t>(r) * patch + c] = prof[static_cast<std::size_t>(r)] * prof[static_cast<std::size_t>(c)];
    return Image(patch, patch, std::move(px), imagecore::NormState::unit);
}

std::vector<Image> extract_patches(const Image& img, const PatchPlan& plan) {
    if (img.height() != plan.height || img.width() != plan.width)
        throw std::invalid_argument("image does not match the patch plan");
    std::vector<Image> out;
    out.reserve(plan.size());
    for (std::size_t k = 0; k < plan.size(); ++k) {
        const auto pl = plan.placement(k);
        out.push_back(imagecore::crop(img, pl.top, pl.left, plan.patch, plan.patch));
    }
    return out;
}

Image assemble(const std::vector<Image>& patches, const PatchPlan& plan) {
    if (patches.size() != plan.size())
        throw std::invalid_argument("expected " + std::to_string(plan.size()) + " patches, got " +
                                    std::to_string(patches.size()));
    std::vector<double> acc(static_cast<std::size_t>(plan.height) * plan.width, 0.0);
    const std::size_t nc = plan.col_positions.size();
    for (std::size_t k = 0; k < patches.size(); ++k) {
        const Image& p = patches[k];
        if (p.height() != plan.patch || p.width() != plan.patch)
            throw std::invalid_argument("patch " + std::to_string(k) + " has the wrong size");
        const auto pl = plan.placement(k);
        const auto& wr = plan.row_weights[k / nc];
        const auto& wc = plan.col_weights[k % nc];
        for (int r = 0; r < plan.patch; ++r) {
            double* dst = acc.data() + static_cast<std::size_t>(pl.top + r) * plan.width + pl.left;
            const auto src = p.row(r);
            const double a = wr[static_cast<std::size_t>(r)];
            for (int c = 0; c < plan.patch; ++c) dst[c] += a * wc[static_cast<std::size_t>(c)] * src[static_cast<std::size_t>(c)];
        }
    }
    auto state = patches.empty() ? imagecore::NormState::raw : patches[0].norm_state();
    for (const auto& p : patches)
        if (p.norm_state() != state) state = imagecore::NormState::raw;
    Image out(plan.height, plan.width, std::move(acc));
    // Convex combinations stay in range up to rounding; clamp before retagging.
    return state == imagecore::NormState::raw ? out : imagecore::clamp_to(out, state);
}

}  // namespace stmforge::patchwork
