#pragma once

#include <vector>

#include "stmforge/imagecore/image.hpp"

namespace stmforge::imagecore {

/// Normalized 1-D Gaussian taps of radius ceil(3 sigma), length 2r + 1.
std::vector<double> gaussian_taps(double sigma);

/// Separable Gaussian blur with edge-replicate padding. Throws for sigma <= 0.
/// Output keeps the input's norm contract (a convex combination stays in range).
Image gaussian_blur(const Image& img, double sigma);

/// k x k median over the edge-replicated neighborhood. k must be odd and >= 1.
Image median_filter(const Image& img, int k);

/// Correlation with the kernel at its anchor, edge-replicate padding:
/// out(r, c) = sum_ij K(i, j) * in(r + i - anchor_row, c + j - anchor_col).
Image convolve(const Image& img, const Kernel& kernel);

}  // namespace stmforge::imagecore
