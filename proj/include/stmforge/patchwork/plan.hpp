#pragma once

#include <vector>

#include "stmforge/imagecore/image.hpp"

namespace stmforge::patchwork {

using imagecore::Image;

inline constexpr int kDefaultPatch = 128;
inline constexpr int kDefaultOverlap = 32;

struct Placement {
    int top = 0;
    int left = 0;
};

/// Tiling of an image into overlapping square patches. The window of
/// placement k is row_weights[row_index] x col_weights[col_index], and the
/// windows sum to 1 at every pixel.
struct PatchPlan {
    int height = 0;
    int width = 0;
    int patch = kDefaultPatch;
    int overlap = kDefaultOverlap;
    std::vector<int> row_positions;
    std::vector<int> col_positions;
    std::vector<std::vector<double>> row_weights;  // one profile per row position
    std::vector<std::vector<double>> col_weights;

    std::size_t size() const { return row_positions.size() * col_positions.size(); }
    /// Row-major over (row position, column position).
    Placement placement(std::size_t k) const;
    /// patch x patch weight grid of placement k.
    Image window(std::size_t k) const;
};

/// Uniform stride patch - overlap; the last row and column are clamped to the
/// image edge. Requires h, w >= patch and 0 < overlap <= patch / 2.
PatchPlan plan_patches(int h, int w, int patch = kDefaultPatch, int overlap = kDefaultOverlap);

/// Separable window: 1 in the core and a cos^2 ramp of width `overlap` on each edge.
Image cos2_window(int patch, int overlap);

/// 1D ramp weight of pixel j (0 <= j < overlap) on a rising edge: sin^2(pi/2 (j + 1/2) / overlap).
double rising_ramp(int j, int overlap);

/// Cuts the planned patches out of an image.
std::vector<Image> extract_patches(const Image& img, const PatchPlan& plan);

/// Window-weighted sum of the patches; the result keeps the patches' common
/// norm state, or is raw if they differ.
Image assemble(const std::vector<Image>& patches, const PatchPlan& plan);

}  // namespace stmforge::patchwork
