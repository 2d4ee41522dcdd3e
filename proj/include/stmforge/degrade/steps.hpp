#pragma once

#include <array>
#include <optional>
#include <vector>

#include "stmforge/common/rng.hpp"
#include "stmforge/degrade/trace.hpp"

namespace stmforge::degrade {

// --- multi-tip ghosts -------------------------------------------------------

/// f = h + sum_i K_i(A_i / (1 + exp(c_i - d_i * h(x - dx_i, y - dy_i)))).
/// `img` must be unit-normalized; the result is raw and not renormalized.
Image apply_multi_tip(const Image& img, const MultiTipParams& params);

/// Applies a ghost's tip-shape kernel.
Image apply_copy_kernel(const Image& img, const CopyKernel& kernel);

/// Tip count weights for 2, 3 and 4 tips.
inline constexpr std::array<double, 3> kTipCountWeights{0.5, 0.3, 0.2};

/// Draws a multi-tip configuration: n_tips ~ Cat({2,3,4}), n_tips - 1 ghosts.
MultiTipParams sample_multi_tip(Rng& rng, const std::array<double, 3>& tip_count_weights = kTipCountWeights);
/// Draws one ghost kernel: gaussian (0.3), median (0.4), random (0.3).
CopyKernel sample_copy_kernel(Rng& rng);
/// Random k x k kernel, k in {5, 6}, entries U(-0.5, 1) normalized to unit sum;
/// draws with |sum| <= 0.1 are rejected and redrawn.
Kernel sample_random_kernel(Rng& rng);

// --- scan line misalignment -------------------------------------------------

/// round(N(0, sigma^2)) per row.
std::vector<int> sample_row_shifts(int rows, double sigma, Rng& rng);
/// Shifts every row by its own draw, edge-replicate fill.
Image apply_misalignment(const Image& img, double sigma, Rng& rng);

// --- blur-type steps --------------------------------------------------------

/// Blunt tip: delegates to gaussian_blur.
Image apply_blunt_tip(const Image& img, double sigma);

/// Rows >= start_row replaced by their blurred version; `offset` (absolute
/// units) is added to row start_row only.
Image apply_tip_change(const Image& img, int start_row, double sigma, std::optional<double> offset);

// --- scan line noise --------------------------------------------------------

inline constexpr std::array<double, 3> kPerturbationWeights{0.3, 0.45, 0.25};

struct ScanlineConfig {
    int min_lines = 25;
    int max_lines = 35;
    /// Segment length cap as a fraction of the image width.
    double max_length_fraction = 0.8;
    std::array<double, 3> perturbation_weights = kPerturbationWeights;
};

/// Draws the segments for an h x w image.
ScanlineParams sample_scanline_noise(int h, int w, Rng& rng, const ScanlineConfig& cfg = {});

/// Unsigned, unscaled perturbation values along the segment.
std::vector<double> segment_profile(const ScanlineSegment& seg);

/// Adds sign * scale * profile to each segment's pixels.
Image apply_scanline_segments(const Image& img, const ScanlineParams& params, double scale = 1.0);

/// Samples and applies scan line noise in one call (scale 1).
Image apply_scanline_noise(const Image& img, Rng& rng, const ScanlineConfig& cfg = {});

}  // namespace stmforge::degrade
