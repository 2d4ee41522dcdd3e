#include "stmforge/tipphysics/double_tip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stmforge/common/rng.hpp"
#include "stmforge/degrade/steps.hpp"
#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::tipphysics {

namespace {

constexpr double kGridTolerance = 1e-9;

int whole_pixels(double length_nm, double pixel_nm) {
    const double px = length_nm / pixel_nm;
    const double rounded = std::round(px);
    if (std::abs(px - rounded) > kGridTolerance * std::max(1.0, px))
        throw std::invalid_argument("tip separation is not a whole number of pixels");
    return static_cast<int>(rounded);
}

GridOffset resolve_offset(const PhysicalTipParams& p, double pixel_nm, std::optional<GridOffset> offset) {
    if (!(pixel_nm > 0.0)) throw std::invalid_argument("pixel size must be positive");
    if (!offset) return {whole_pixels(p.s, pixel_nm), 0};
    const double len = std::hypot(offset->dx, offset->dy) * pixel_nm;
    if (std::abs(len - p.s) > kGridTolerance * std::max(1.0, p.s))
        throw std::invalid_argument("grid offset length does not match the tip separation");
    return *offset;
}

}  // namespace

void PhysicalTipParams::validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    if (!(current > 0.0)) throw std::invalid_argument("tunnelling current must be positive");
    if (!(s >= 0.0)) throw std::invalid_argument("tip separation must be non-negative");
}

double ghost_term(double b_displaced, const PhysicalTipParams& p) {
    return p.current * std::exp(p.gamma) /
           (1.0 + std::exp(-2.0 * p.kappa * (b_displaced - p.gamma / (2.0 * p.kappa) - p.a)));
}

double double_tip_height(double b_here, double b_displaced, const PhysicalTipParams& p) {
    return ghost_term(b_displaced, p) + b_here;
}

std::vector<double> double_tip_height(std::span<const double> b, const PhysicalTipParams& p, double pixel_nm) {
    p.validate();
    if (!(pixel_nm > 0.0)) throw std::invalid_argument("pixel size must be positive");
    const int shift = whole_pixels(p.s, pixel_nm);
    const int n = static_cast<int>(b.size());
    std::vector<double> h(b.size());
    for (int i = 0; i < n; ++i) {
        const int src = std::clamp(i - shift, 0, n - 1);
        h[static_cast<std::size_t>(i)] = double_tip_height(b[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(src)], p);
    }
    return h;
}

Image double_tip_height(const Image& b, const PhysicalTipParams& p, double pixel_nm, std::optional<GridOffset> offset) {
    p.validate();
    const GridOffset o = resolve_offset(p, pixel_nm, offset);
    std::vector<double> h(b.size());
    for (int r = 0; r < b.height(); ++r)
        for (int c = 0; c < b.width(); ++c)
            h[static_cast<std::size_t>(r) * b.width() + c] = double_tip_height(b(r, c), b.clamped(r - o.dy, c - o.dx), p);
    return Image(b.height(), b.width(), std::move(h));
}

Eq1Params map_physical_to_eq1(const PhysicalTipParams& p, double pixel_nm, std::optional<GridOffset> offset) {
    p.validate();
    const GridOffset o = resolve_offset(p, pixel_nm, offset);
    return {p.current * std::exp(p.gamma), p.gamma + 2.0 * p.kappa * p.a, 2.0 * p.kappa, o.dx, o.dy};
}

degrade::TipCopy to_tip_copy(const Eq1Params& e) {
    degrade::TipCopy copy;
    copy.amplitude = e.amplitude;
    copy.c = e.c;
    copy.d = e.d;
    copy.dx = e.dx;
    copy.dy = e.dy;
    return copy;
}

EquivalenceReport equivalence_sweep(int draws, std::uint64_t seed, int grid) {
    if (draws <= 0 || grid < 2) throw std::invalid_argument("sweep needs draws > 0 and grid >= 2");
    EquivalenceReport rep{draws, grid, 0.0};
    Rng rng(seed);
    const int reach = std::min(5, grid - 1);
    for (int i = 0; i < draws; ++i) {
        PhysicalTipParams p;
        p.current = rng.uniform(0.5, 2.5);
        p.gamma = rng.uniform(-1.0, 1.0);
        p.kappa = rng.uniform(2.0, 6.0);
        p.a = rng.uniform(0.0, 1.0);
        const GridOffset o{rng.uniform_int(0, reach), rng.uniform_int(0, reach)};
        p.s = std::hypot(o.dx, o.dy);

        std::vector<double> px(static_cast<std::size_t>(grid) * grid);
        for (double& v : px) v = rng.uniform();
        const Image b(grid, grid, std::move(px), imagecore::NormState::unit);

        const Image physical = double_tip_height(b, p, 1.0, o);
        degrade::MultiTipParams mt;
        mt.copies.push_back(to_tip_copy(map_physical_to_eq1(p, 1.0, o)));
        const Image empirical = degrade::apply_multi_tip(b, mt);
        for (std::size_t k = 0; k < b.size(); ++k)
            rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(physical.pixels()[k] - empirical.pixels()[k]));
    }
    return rep;
}

}  // namespace stmforge::tipphysics
