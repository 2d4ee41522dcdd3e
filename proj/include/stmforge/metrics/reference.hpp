#pragma once

#include <string_view>

#include "stmforge/imagecore/image.hpp"

namespace stmforge::metrics {

using imagecore::Image;

/// 10 log10(max^2 / MSE); +infinity for identical images.
double psnr(const Image& a, const Image& b, double max_value = 1.0);

enum class SsimMode { global, windowed };

std::string_view to_string(SsimMode m);
SsimMode ssim_mode_from_string(std::string_view s);

inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

/// SSIM for unit-range images. Global mode uses whole-image population
/// moments; windowed mode averages over every fully contained 11 x 11
/// Gaussian window (sigma 1.5) and needs images of at least 11 x 11.
double ssim(const Image& a, const Image& b, SsimMode mode = SsimMode::windowed);

}  // namespace stmforge::metrics
