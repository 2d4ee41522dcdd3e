#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stmforge/degrade/trace.hpp"
#include "stmforge/imagecore/image.hpp"

namespace stmforge::tipphysics {

using imagecore::Image;

/// Two-tip tunnelling model with interference terms neglected.
struct PhysicalTipParams {
    double current = 1.0;  // I_T, pA
    double gamma = 0.0;    // e^gamma = C_beta / C_alpha
    double kappa = 1.0;    // sqrt(2 m phi) / hbar, 1/nm
    double a = 0.0;        // height difference of the second tip, nm
    double s = 0.0;        // lateral tip separation, nm

    /// Throws std::invalid_argument unless kappa > 0, current > 0, s >= 0.
    void validate() const;
};

/// Grid displacement of the second tip, in pixels.
struct GridOffset {
    int dx = 0;
    int dy = 0;
};

/// I_T e^gamma / (1 + exp(-2 kappa (b_displaced - gamma / (2 kappa) - a))).
double ghost_term(double b_displaced, const PhysicalTipParams& p);

/// h(x1) = ghost_term(b(x1 - s)) + b(x1) for one point.
double double_tip_height(double b_here, double b_displaced, const PhysicalTipParams& p);

/// 1D profile sampled every `pixel_nm` nm. s must be a whole number of
/// samples; samples before the profile start replicate b[0].
std::vector<double> double_tip_height(std::span<const double> b, const PhysicalTipParams& p, double pixel_nm = 1.0);

/// 2D height map. The second tip sits at `offset` (pixels) whose length must
/// equal s / pixel_nm; without an offset the tips are separated along x.
Image double_tip_height(const Image& b, const PhysicalTipParams& p, double pixel_nm = 1.0,
                        std::optional<GridOffset> offset = std::nullopt);

/// Empirical ghost parameters: A/(1 + exp(c - d h(x - dx, y - dy))).
struct Eq1Params {
    double amplitude = 0.0;  // A = I_T e^gamma
    double c = 0.0;          // gamma + 2 kappa a
    double d = 0.0;          // 2 kappa
    int dx = 0;
    int dy = 0;
};

/// Maps physical parameters to the empirical ghost. Heights must be expressed
/// in nm for the two forms to agree. Throws std::invalid_argument if s is not
/// a whole number of pixels along x, or if `offset` does not have length s.
Eq1Params map_physical_to_eq1(const PhysicalTipParams& p, double pixel_nm = 1.0,
                              std::optional<GridOffset> offset = std::nullopt);

/// Single ghost copy with an identity kernel.
degrade::TipCopy to_tip_copy(const Eq1Params& e);

struct EquivalenceReport {
    int draws = 0;
    int grid = 0;
    double max_abs_deviation = 0.0;
};

/// Compares the physical model with a one-copy multi-tip ghost on random
/// parameters and random unit-range height grids.
EquivalenceReport equivalence_sweep(int draws, std::uint64_t seed, int grid = 24);

}  // namespace stmforge::tipphysics
