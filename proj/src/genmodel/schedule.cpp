#include "stmforge/genmodel/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stmforge::genmodel {

NoiseSchedule cosine_schedule(int T, double s) {
    if (T < 1) throw std::invalid_argument("schedule needs T >= 1");
    auto f = [&](int t) {
        const double c = std::cos((static_cast<double>(t) / T + s) / (1.0 + s) * std::numbers::pi / 2.0);
        return c * c;
    };
    const double f0 = f(0);
    NoiseSchedule sched;
    sched.T = T;
    sched.alpha_bar.resize(static_cast<std::size_t>(T) + 1);
    sched.alpha_bar[0] = 1.0;
    for (int t = 1; t <= T; ++t) {
        const double prev = sched.alpha_bar[static_cast<std::size_t>(t - 1)];
        sched.alpha_bar[static_cast<std::size_t>(t)] = std::max(f(t) / f0, prev * (1.0 - kMaxBeta));
    }
    return sched;
}

}  // namespace stmforge::genmodel
