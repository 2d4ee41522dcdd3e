#pragma once

#include <cstdint>
#include <vector>

#include "stmforge/imagecore/image.hpp"

namespace stmforge::imagecore {

/// Direction in which the dimer rows run.
enum class RowOrientation { horizontal, vertical };

struct LatticeDefect {
    int row = 0;
    int col = 0;
    bool bright = false;
};

struct LatticeSurface {
    Image image;
    std::vector<LatticeDefect> defects;
};

/// Procedural dimer-row surface for self-contained tests and demos.
///
/// Rows of period `period` px run along `orientation`; a weaker modulation
/// with half that period runs along each row. Each pixel independently hosts
/// a defect (bright or dark Gaussian bump) with probability `defect_density`.
/// The result is unit-normalized and fully determined by `seed`.
LatticeSurface synth_lattice_surface(int h, int w, double period, RowOrientation orientation, double defect_density,
                                     std::uint64_t seed);

Image synth_lattice(int h, int w, double period, RowOrientation orientation, double defect_density, std::uint64_t seed);

}  // namespace stmforge::imagecore
