#include "stmforge/genmodel/processes.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::genmodel {

using imagecore::lincomb;

namespace {

void check_step(int t, const NoiseSchedule& sched) {
    if (t < 0 || t > sched.T) throw std::invalid_argument("time step outside the schedule");
}

}  // namespace

Image gaussian_noise(int height, int width, Rng& rng) {
    std::vector<double> px(static_cast<std::size_t>(height) * width);
    for (double& v : px) v = rng.normal();
    return Image(height, width, std::move(px));
}

Image ddim_forward(const Image& x0, const Image& eps, int t, const NoiseSchedule& sched) {
    check_step(t, sched);
    const double ab = sched[t];
    return lincomb(x0, std::sqrt(ab), eps, std::sqrt(1.0 - ab));
}

Image reconstruct_x0(const Image& x_t, const Image& eps_pred, int t, const NoiseSchedule& sched) {
    check_step(t, sched);
    const double ab = sched[t];
    return lincomb(x_t, 1.0 / std::sqrt(ab), eps_pred, -std::sqrt(1.0 - ab) / std::sqrt(ab));
}

Image ddim_reverse_step(const Image& x_t, const Image& eps_pred, int t, int t_prev, const NoiseSchedule& sched) {
    check_step(t, sched);
    check_step(t_prev, sched);
    if (t_prev >= t) throw std::invalid_argument("reverse step needs t_prev < t");
    const Image x0 = reconstruct_x0(x_t, eps_pred, t, sched);
    const double ab = sched[t_prev];
    return lincomb(x0, std::sqrt(ab), eps_pred, std::sqrt(1.0 - ab));
}

std::vector<int> ddim_timesteps(int T, int steps) {
    if (steps < 1) throw std::invalid_argument("sampler needs at least one step");
    if (steps > T) throw std::invalid_argument("more sampling steps than schedule steps");
    std::vector<int> ts(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i)
        ts[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(static_cast<double>(T) * (steps - i) / steps));
    return ts;
}

Image ddim_sample(const Denoiser& model, const Image& condition, int steps, const NoiseSchedule& sched, std::uint64_t seed) {
    const auto ts = ddim_timesteps(sched.T, steps);
    Rng rng(seed);
    Image x = gaussian_noise(condition.height(), condition.width(), rng);
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const Image eps = model.predict(x, static_cast<double>(ts[i]) / sched.T, condition);
        x = ddim_reverse_step(x, eps, ts[i], ts[i + 1], sched);
    }
    return x;
}

Image fm_forward(const Image& x0, const Image& eps, double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("flow time must lie in [0, 1]");
    return lincomb(x0, s, eps, 1.0 - s);
}

Image fm_target_velocity(const Image& x0, const Image& eps) { return lincomb(x0, 1.0, eps, -1.0); }

Image rk2_step(const Denoiser& model, const Image& x, double s, double ds, const Image& condition) {
    const Image k1 = model.predict(x, s, condition);
    const Image mid = lincomb(x, 1.0, k1, ds / 2.0);
    const Image k2 = model.predict(mid, s + ds / 2.0, condition);
    return lincomb(x, 1.0, k2, ds);
}

Image fm_integrate_rk2(const Denoiser& model, const Image& x_start, const Image& condition, int steps) {
    if (steps < 1) throw std::invalid_argument("sampler needs at least one step");
    const double ds = 1.0 / steps;
    Image x = x_start;
    for (int i = 0; i < steps; ++i) x = rk2_step(model, x, i * ds, ds, condition);
    return x;
}

Image fm_sample_rk2(const Denoiser& model, const Image& condition, int steps, std::uint64_t seed) {
    if (steps < 1) throw std::invalid_argument("sampler needs at least one step");
    Rng rng(seed);
    return fm_integrate_rk2(model, gaussian_noise(condition.height(), condition.width(), rng), condition, steps);
}

}  // namespace stmforge::genmodel

namespace stmforge::genmodel {

Image direct_predict(const Denoiser& model, const Image& condition) {
    const Image zeros(condition.height(), condition.width(), std::vector<double>(condition.size(), 0.0));
    return model.predict(zeros, 0.0, condition);
}

std::string_view to_string(SamplerKind k) {
    switch (k) {
        case SamplerKind::ddim: return "ddim";
        case SamplerKind::fm: return "fm";
        case SamplerKind::direct: return "direct";
    }
    return "fm";
}

SamplerKind sampler_from_string(std::string_view s) {
    for (auto k : {SamplerKind::ddim, SamplerKind::fm, SamplerKind::direct})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown sampler: " + std::string(s));
}

Image run_sampler(const Denoiser& model, const Image& condition, const SamplerConfig& cfg, std::uint64_t seed) {
    Image x;
    switch (cfg.kind) {
        case SamplerKind::ddim: x = ddim_sample(model, condition, cfg.steps, cosine_schedule(cfg.T), seed); break;
        case SamplerKind::fm: x = fm_sample_rk2(model, condition, cfg.steps, seed); break;
        case SamplerKind::direct: x = direct_predict(model, condition); break;
    }
    return imagecore::clamp_to(x, imagecore::NormState::symmetric);
}

}  // namespace stmforge::genmodel
