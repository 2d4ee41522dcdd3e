#include "stmforge/imagecore/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stmforge/common/rng.hpp"
#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::imagecore {

LatticeSurface synth_lattice_surface(int h, int w, double period, RowOrientation orientation, double defect_density,
                                     std::uint64_t seed) {
    if (h < 1 || w < 1) throw std::invalid_argument("lattice dimensions must be positive");
    if (!(period >= 2.0)) throw std::invalid_argument("lattice period must be >= 2 px");
    if (!(defect_density >= 0.0 && defect_density <= 1.0)) throw std::invalid_argument("defect density must be in [0, 1]");

    constexpr double pi = std::numbers::pi;
    Rng rng(seed);
    const double across_phase = rng.uniform(0.0, period);
    const double along_phase = rng.uniform(0.0, period);

    std::vector<double> px(static_cast<std::size_t>(h) * w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double across = orientation == RowOrientation::horizontal ? r : c;
            const double along = orientation == RowOrientation::horizontal ? c : r;
            const double ridge = std::cos(pi * (across + across_phase) / period);
            const double dimer = std::cos(2.0 * pi * (along + along_phase) / period);
            px[static_cast<std::size_t>(r) * w + c] = ridge * ridge * (0.75 + 0.25 * dimer * dimer);
        }
    }

    LatticeSurface surface;
    const double radius = period / 3.0;
    const int reach = static_cast<int>(std::ceil(3.0 * radius));
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!rng.bernoulli(defect_density)) continue;
            const bool bright = rng.bernoulli(0.5);
            surface.defects.push_back({r, c, bright});
            const double amp = bright ? 0.8 : -0.8;
            for (int y = std::max(0, r - reach); y <= std::min(h - 1, r + reach); ++y)
                for (int x = std::max(0, c - reach); x <= std::min(w - 1, c + reach); ++x) {
                    const double d2 = static_cast<double>((y - r) * (y - r) + (x - c) * (x - c));
                    px[static_cast<std::size_t>(y) * w + x] += amp * std::exp(-0.5 * d2 / (radius * radius));
                }
        }
    }
    surface.image = normalize_unit(Image(h, w, std::move(px)));
    return surface;
}

Image synth_lattice(int h, int w, double period, RowOrientation orientation, double defect_density, std::uint64_t seed) {
    return synth_lattice_surface(h, w, period, orientation, defect_density, seed).image;
}

}  // namespace stmforge::imagecore
