#pragma once

#include "stmforge/imagecore/image.hpp"

namespace stmforge::imagecore {

/// Affine map onto [0, 1]. Throws "degenerate dynamic range" for constant images.
Image normalize_unit(const Image& img);
/// Affine map onto [-1, 1]. Same error contract as normalize_unit.
Image normalize_sym(const Image& img);

/// Maps an image onto [0, 1] according to its contract: symmetric images via
/// (x + 1) / 2, unit images unchanged, raw images by min-max normalization.
Image to_unit_range(const Image& img);
/// Maps an image onto [-1, 1]: unit via 2x - 1, symmetric unchanged, raw by min-max.
Image to_symmetric_range(const Image& img);
/// Clips values into the range of `state` and tags the result with it.
Image clamp_to(const Image& img, NormState state);

/// Quarter-turn rotation, counter-clockwise with row 0 at the bottom of the
/// frame: input (r, c) lands at output (c, h - 1 - r).
Image rotate_quarter(const Image& img, int turns);

/// Exact sub-grid copy. Throws std::out_of_range when the window leaves the image.
Image crop(const Image& img, int top, int left, int h, int w);

/// Translation with edge-replicate fill: out(r, c) = in(r - dy, c - dx).
Image shift(const Image& img, int dx, int dy);

/// Shifts each row horizontally by its own amount, edge-replicate fill.
Image shift_rows(const Image& img, std::span<const int> row_shifts);

enum class ResampleDirection { down, up_nearest };

/// Row-only resampling: `down` keeps every factor-th row starting at row 0,
/// `up_nearest` repeats each row `factor` times.
Image resample_y(const Image& img, int factor, ResampleDirection direction);

/// a * wa + b * wb elementwise; raw contract.
Image lincomb(const Image& a, double wa, const Image& b, double wb);
/// img * scale + offset elementwise; raw contract.
Image affine(const Image& img, double scale, double offset);

double mean(const Image& img);
double variance(const Image& img);

}  // namespace stmforge::imagecore
