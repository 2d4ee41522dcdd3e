#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "stmforge/common/rng.hpp"
#include "stmforge/degrade/pipeline.hpp"
#include "stmforge/genmodel/losses.hpp"
#include "stmforge/genmodel/schedule.hpp"
#include "stmforge/genmodel/tiny_denoiser.hpp"

namespace stmforge::genmodel {

enum class Objective { fm, ddim, ddim_fft, mae };

std::string_view to_string(Objective o);
Objective objective_from_string(std::string_view s);

struct TrainConfig {
    int epochs = 3;
    int batch = 8;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    TinyDenoiser::Config model;
    int T = 1000;
    LossNorm norm = LossNorm::l1;
    /// Samples in the fixed probe set used for the loss curve.
    int probe_size = 32;
    /// Wall-clock budget (0 = none): no epoch starts if, at the pace of the
    /// previous one, it would end past this many seconds.
    double max_seconds = 0.0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

/// Noise level and noise image for one training example.
struct NoiseDraw {
    double s = 0.0;  // flow time
    int t = 0;       // DDIM step, 1..T
    Image eps;
};

NoiseDraw draw_noise(Objective objective, int height, int width, int T, Rng& rng);

/// Objective value for one sample. With `accumulate`, adds its parameter
/// gradient scaled by `grad_scale` to the model's gradients.
double sample_loss(TinyDenoiser& model, const degrade::SampleRecord& rec, Objective objective, const NoiseDraw& draw,
                   const NoiseSchedule& sched, LossNorm norm, bool accumulate, double grad_scale = 1.0);

class Adam {
public:
    Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}
    void step(const std::vector<Param*>& params);

private:
    double lr_, b1_, b2_, eps_;
    long step_ = 0;
    std::vector<Eigen::MatrixXd> m_, v_;
};

struct TrainResult {
    TinyDenoiser model;
    /// Probe-set loss before training and after each epoch.
    std::vector<double> loss_curve;
    /// Mean minibatch loss of each epoch.
    std::vector<double> epoch_loss;
    double seconds = 0.0;
};

using EpochCallback = std::function<void(int epoch, double probe_loss, double train_loss)>;

/// Trains a TinyDenoiser on (ground truth, degraded) pairs. Deterministic for
/// a fixed seed and no time limit.
TrainResult train_toy(const std::vector<degrade::SampleRecord>& data, Objective objective, const TrainConfig& cfg,
                      const EpochCallback& on_epoch = {});

/// Mean objective over a fixed set of draws (no gradient).
double probe_loss(TinyDenoiser& model, const std::vector<degrade::SampleRecord>& data, Objective objective,
                  const std::vector<NoiseDraw>& draws, const NoiseSchedule& sched, LossNorm norm);

}  // namespace stmforge::genmodel
