#pragma once

#include <vector>

namespace stmforge::genmodel {

/// Largest per-step beta; keeps alpha_bar(T) positive.
inline constexpr double kMaxBeta = 0.9999;

struct NoiseSchedule {
    int T = 0;
    std::vector<double> alpha_bar;  // T + 1 entries, alpha_bar[0] = 1

    double operator[](int t) const { return alpha_bar.at(static_cast<std::size_t>(t)); }
};

/// alpha_bar(t) = f(t) / f(0), f(t) = cos^2(((t/T + s) / (1 + s)) * pi/2), with
/// each step's beta = 1 - alpha_bar(t)/alpha_bar(t-1) capped at kMaxBeta.
NoiseSchedule cosine_schedule(int T, double s = 0.008);

}  // namespace stmforge::genmodel
