#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "stmforge/common/rng.hpp"
#include "stmforge/genmodel/denoiser.hpp"
#include "stmforge/genmodel/schedule.hpp"

namespace stmforge::genmodel {

/// Standard-normal image.
Image gaussian_noise(int height, int width, Rng& rng);

// --- DDIM (eta = 0) ---------------------------------------------------------

/// x_t = sqrt(ab_t) x0 + sqrt(1 - ab_t) eps.
Image ddim_forward(const Image& x0, const Image& eps, int t, const NoiseSchedule& sched);
/// x0 estimate from an epsilon prediction: (x_t - sqrt(1 - ab_t) eps) / sqrt(ab_t).
Image reconstruct_x0(const Image& x_t, const Image& eps_pred, int t, const NoiseSchedule& sched);
/// Deterministic update to t_prev < t.
Image ddim_reverse_step(const Image& x_t, const Image& eps_pred, int t, int t_prev, const NoiseSchedule& sched);
/// round(T (steps - i) / steps) for i = 0..steps: T first, 0 last. Needs 1 <= steps <= T.
std::vector<int> ddim_timesteps(int T, int steps);
/// Starts from seeded noise at t = T; the model sees time t / T.
Image ddim_sample(const Denoiser& model, const Image& condition, int steps, const NoiseSchedule& sched, std::uint64_t seed);

// --- flow matching (x(0) = noise, x(1) = data) -------------------------------

/// x_s = s x0 + (1 - s) eps, s in [0, 1].
Image fm_forward(const Image& x0, const Image& eps, double s);
/// v = x0 - eps.
Image fm_target_velocity(const Image& x0, const Image& eps);
/// One RK2 midpoint step of size ds from time s.
Image rk2_step(const Denoiser& model, const Image& x, double s, double ds, const Image& condition);
/// Midpoint integration from s = 0 (seeded noise) to s = 1 in `steps` uniform steps.
Image fm_sample_rk2(const Denoiser& model, const Image& condition, int steps, std::uint64_t seed);
/// Same integration from a given starting state.
Image fm_integrate_rk2(const Denoiser& model, const Image& x_start, const Image& condition, int steps);

}  // namespace stmforge::genmodel

namespace stmforge::genmodel {

/// Single forward pass with x = 0 and time 0 (autoencoder baseline).
Image direct_predict(const Denoiser& model, const Image& condition);

enum class SamplerKind { ddim, fm, direct };

std::string_view to_string(SamplerKind k);
SamplerKind sampler_from_string(std::string_view s);

struct SamplerConfig {
    SamplerKind kind = SamplerKind::fm;
    int steps = 10;
    int T = 1000;  // DDIM schedule length
};

/// Dispatches to ddim_sample, fm_sample_rk2 or direct_predict. The model works
/// in the [-1, 1] convention, so the result is clamped and tagged symmetric.
Image run_sampler(const Denoiser& model, const Image& condition, const SamplerConfig& cfg, std::uint64_t seed);

}  // namespace stmforge::genmodel
