#include <doctest.h>

#include <cmath>
#include <random>

#include "stmforge/degrade/steps.hpp"
#include "stmforge/tipphysics/double_tip.hpp"
#include "support.hpp"

using namespace stmforge;
using namespace stmforge::tipphysics;
using imagecore::NormState;

namespace {

// Direct transcription of the two-tip height formula.
double oracle_height(double b_here, double b_shift, double I, double gamma, double kappa, double a) {
    const double expo = -2.0 * kappa * (b_shift - gamma / (2.0 * kappa) - a);
    return I * std::exp(gamma) / (1.0 + std::exp(expo)) + b_here;
}

PhysicalTipParams random_params(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PhysicalTipParams p;
    p.current = 0.1 + 3.0 * u(gen);
    p.gamma = -2.0 + 4.0 * u(gen);
    p.kappa = 0.5 + 8.0 * u(gen);
    p.a = -1.0 + 2.0 * u(gen);
    return p;
}

}  // namespace

TEST_CASE("double-tip height examples") {
    SUBCASE("flat surface") {
        PhysicalTipParams p;
        const std::vector<double> b(10, 0.0);
        for (double h : double_tip_height(b, p)) CHECK(h == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("vanishing current leaves the profile unchanged") {
        PhysicalTipParams p;
        p.current = 1e-300;
        p.s = 3.0;
        const Image b = stmtest::random_image(9, 11, 2);
        CHECK(stmtest::max_abs_diff(double_tip_height(b, p), b) < 1e-15);
    }
    SUBCASE("random 1D profiles match the scalar oracle") {
        std::mt19937_64 gen(17);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            PhysicalTipParams p = random_params(gen);
            const int shift = trial % 7;
            const double pixel = 0.25;
            p.s = shift * pixel;
            std::vector<double> b(40);
            for (double& v : b) v = u(gen);
            const auto h = double_tip_height(b, p, pixel);
            for (int i = 0; i < 40; ++i) {
                const double want = oracle_height(b[i], b[std::max(i - shift, 0)], p.current, p.gamma, p.kappa, p.a);
                REQUIRE(std::abs(h[i] - want) < 1e-12);
            }
        }
    }
    SUBCASE("invalid parameters") {
        PhysicalTipParams p;
        p.kappa = 0.0;
        CHECK_THROWS_AS(double_tip_height(std::vector<double>{0.0}, p), std::invalid_argument);
        p = {};
        p.current = -1.0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
        p = {};
        p.s = -0.1;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
}

TEST_CASE("mapping to the empirical ghost") {
    SUBCASE("gamma = 0, a = 0") {
        PhysicalTipParams p;
        p.current = 1.7;
        p.kappa = 3.0;
        const auto e = map_physical_to_eq1(p);
        CHECK(e.c == 0.0);
        CHECK(e.amplitude == doctest::Approx(1.7).epsilon(1e-15));
    }
    SUBCASE("kappa 4, a 0.5, gamma 1") {
        PhysicalTipParams p;
        p.kappa = 4.0;
        p.a = 0.5;
        p.gamma = 1.0;
        const auto e = map_physical_to_eq1(p);
        CHECK(e.c == doctest::Approx(5.0).epsilon(1e-15));
        CHECK(e.d == doctest::Approx(8.0).epsilon(1e-15));
        CHECK(e.amplitude == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    }
    SUBCASE("separation must resolve to grid offsets") {
        PhysicalTipParams p;
        p.s = 1.5;
        CHECK_THROWS_AS(map_physical_to_eq1(p), std::invalid_argument);
        CHECK(map_physical_to_eq1(p, 0.5).dx == 3);
        p.s = 5.0;
        const auto e = map_physical_to_eq1(p, 1.0, GridOffset{3, 4});
        CHECK(e.dx == 3);
        CHECK(e.dy == 4);
        CHECK_THROWS_AS(map_physical_to_eq1(p, 1.0, GridOffset{3, 3}), std::invalid_argument);
    }
    SUBCASE("1000 random draws agree with a one-copy multi-tip ghost") {
        std::mt19937_64 gen(99);
        std::uniform_int_distribution<int> off(0, 6);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            PhysicalTipParams p = random_params(gen);
            const GridOffset o{off(gen), off(gen)};
            p.s = std::hypot(o.dx, o.dy);
            const Image b = stmtest::random_image(12, 12, 1000 + i, 0.0, 1.0, NormState::unit);
            degrade::MultiTipParams mt;
            mt.copies.push_back(to_tip_copy(map_physical_to_eq1(p, 1.0, o)));
            worst = std::max(worst, stmtest::max_abs_diff(degrade::apply_multi_tip(b, mt), double_tip_height(b, p, 1.0, o)));
        }
        CHECK(worst < 1e-9);
    }
    SUBCASE("library sweep") {
        const auto rep = equivalence_sweep(200, 4);
        CHECK(rep.draws == 200);
        CHECK(rep.max_abs_deviation < 1e-9);
    }
}

TEST_CASE("double-tip properties") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const PhysicalTipParams p = random_params(gen);
        const double here = u(gen);
        double lo = u(gen), hi = u(gen);
        if (lo > hi) std::swap(lo, hi);
        CHECK(double_tip_height(here, lo, p) <= double_tip_height(here, hi, p));
        const double g = ghost_term(lo, p);
        CHECK(g > 0.0);
        CHECK(g < p.current * std::exp(p.gamma));
    }
}
