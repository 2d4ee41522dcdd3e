#include "stmforge/genmodel/train.hpp"

#include <chrono>
#if defined(__GLIBC__)
#include <malloc.h>
#endif
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "stmforge/genmodel/processes.hpp"
#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::genmodel {

namespace {

// Activation buffers of a few MB are allocated every step; above glibc's
// default threshold each one costs an mmap/munmap pair and fresh page faults.
void keep_large_buffers_on_heap() {
#if defined(__GLIBC__)
    static const bool done = [] {
        mallopt(M_MMAP_THRESHOLD, 64 << 20);
        mallopt(M_TRIM_THRESHOLD, 256 << 20);
        return true;
    }();
    (void)done;
#endif
}

}  // namespace

std::string_view to_string(Objective o) {
    switch (o) {
        case Objective::fm: return "fm";
        case Objective::ddim: return "ddim";
        case Objective::ddim_fft: return "ddim_fft";
        case Objective::mae: return "mae";
    }
    return "fm";
}

Objective objective_from_string(std::string_view s) {
    for (auto o : {Objective::fm, Objective::ddim, Objective::ddim_fft, Objective::mae})
        if (to_string(o) == s) return o;
    throw std::invalid_argument("unknown objective: " + std::string(s));
}

NoiseDraw draw_noise(Objective objective, int height, int width, int T, Rng& rng) {
    NoiseDraw d;
    switch (objective) {
        case Objective::fm: d.s = rng.uniform(); break;
        case Objective::ddim:
        case Objective::ddim_fft: d.t = rng.uniform_int(1, T); break;
        case Objective::mae: break;
    }
    d.eps = objective == Objective::mae ? Image(height, width, std::vector<double>(static_cast<std::size_t>(height) * width, 0.0))
                                        : gaussian_noise(height, width, rng);
    return d;
}

namespace {

Tensor to_tensor(const Image& g, double scale) {
    Tensor t(1, g.height(), g.width());
    t.data.col(0) = scale * Eigen::Map<const Eigen::VectorXd>(g.pixels().data(), t.pixels());
    return t;
}

}  // namespace

double sample_loss(TinyDenoiser& model, const degrade::SampleRecord& rec, Objective objective, const NoiseDraw& draw,
                   const NoiseSchedule& sched, LossNorm norm, bool accumulate, double grad_scale) {
    const Image& x0 = rec.ground_truth;
    const Image& cond = rec.degraded;
    Image x;
    double time = 0.0;
    switch (objective) {
        case Objective::fm:
            x = fm_forward(x0, draw.eps, draw.s);
            time = draw.s;
            break;
        case Objective::ddim:
        case Objective::ddim_fft:
            x = ddim_forward(x0, draw.eps, draw.t, sched);
            time = static_cast<double>(draw.t) / sched.T;
            break;
        case Objective::mae: x = draw.eps; break;
    }

    TinyDenoiser::Cache cache;
    const Tensor out = model.forward(TinyDenoiser::make_input(x, cond), time, accumulate ? &cache : nullptr);
    const Image pred(x0.height(), x0.width(), std::vector<double>(out.data.data(), out.data.data() + out.data.size()));

    double loss = 0.0;
    Image grad;
    switch (objective) {
        case Objective::fm: {
            const Image target = fm_target_velocity(x0, draw.eps);
            loss = loss_fm(target, pred, norm);
            if (accumulate) grad = mean_error_grad(target, pred, norm);
            break;
        }
        case Objective::ddim:
            loss = loss_dm(draw.eps, pred, norm);
            if (accumulate) grad = mean_error_grad(draw.eps, pred, norm);
            break;
        case Objective::ddim_fft: {
            const Image x0_hat = reconstruct_x0(x, pred, draw.t, sched);
            loss = loss_fft_dm(x0, x0_hat, draw.eps, pred, norm);
            if (accumulate) {
                // x0_hat depends on pred through -sqrt(1 - ab) / sqrt(ab).
                const double ab = sched[draw.t];
                const double dx0 = -std::sqrt(1.0 - ab) / std::sqrt(ab);
                grad = imagecore::lincomb(mean_error_grad(draw.eps, pred, norm), 0.5, fft_spectral_grad(x0, x0_hat), dx0);
            }
            break;
        }
        case Objective::mae:
            loss = loss_mae(x0, pred);
            if (accumulate) grad = mean_error_grad(x0, pred, LossNorm::l1);
            break;
    }
    if (accumulate) model.backward(cache, to_tensor(grad, grad_scale));
    return loss;
}

void Adam::step(const std::vector<Param*>& params) {
    if (m_.empty())
        for (const Param* p : params) {
            m_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
            v_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
        }
    if (m_.size() != params.size()) throw std::invalid_argument("optimizer used with a different parameter set");
    ++step_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(step_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Param& p = *params[i];
        m_[i] = b1_ * m_[i] + (1.0 - b1_) * p.grad;
        v_[i] = b2_ * v_[i] + (1.0 - b2_) * p.grad.cwiseProduct(p.grad);
        p.value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
    }
}

double probe_loss(TinyDenoiser& model, const std::vector<degrade::SampleRecord>& data, Objective objective,
                  const std::vector<NoiseDraw>& draws, const NoiseSchedule& sched, LossNorm norm) {
    double acc = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) acc += sample_loss(model, data[i], objective, draws[i], sched, norm, false);
    return draws.empty() ? 0.0 : acc / static_cast<double>(draws.size());
}

TrainResult train_toy(const std::vector<degrade::SampleRecord>& data, Objective objective, const TrainConfig& cfg,
                      const EpochCallback& on_epoch) {
    if (data.empty()) throw std::invalid_argument("training set is empty");
    if (cfg.epochs < 0 || cfg.batch < 1 || cfg.probe_size < 1) throw std::invalid_argument("invalid training configuration");
    const int h = data.front().ground_truth.height();
    const int w = data.front().ground_truth.width();
    for (const auto& r : data)
        if (r.ground_truth.height() != h || r.ground_truth.width() != w || r.degraded.height() != h || r.degraded.width() != w)
            throw std::invalid_argument("training samples must share one shape");

    keep_large_buffers_on_heap();
    const auto start = std::chrono::steady_clock::now();
    const NoiseSchedule sched = cosine_schedule(cfg.T);
    TrainResult res{TinyDenoiser(cfg.model, derive_seed(cfg.seed, 0)), {}, {}, 0.0};

    Rng probe_rng(derive_seed(cfg.seed, 2));
    std::vector<NoiseDraw> probe;
    const std::size_t n_probe = std::min(data.size(), static_cast<std::size_t>(cfg.probe_size));
    for (std::size_t i = 0; i < n_probe; ++i) probe.push_back(draw_noise(objective, h, w, cfg.T, probe_rng));
    res.loss_curve.push_back(probe_loss(res.model, data, objective, probe, sched, cfg.norm));

    Rng rng(derive_seed(cfg.seed, 1));
    Adam adam(cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    const auto params = res.model.parameters();
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    double last_epoch = 0.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double begin = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (cfg.max_seconds > 0.0 && epoch > 0 && begin + last_epoch > cfg.max_seconds) break;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
        double total = 0.0;
        for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(cfg.batch));
            const double scale = 1.0 / static_cast<double>(e - b);
            res.model.zero_grad();
            for (std::size_t k = b; k < e; ++k) {
                const NoiseDraw d = draw_noise(objective, h, w, cfg.T, rng);
                total += sample_loss(res.model, data[order[k]], objective, d, sched, cfg.norm, true, scale);
            }
            adam.step(params);
        }
        res.epoch_loss.push_back(total / static_cast<double>(order.size()));
        res.loss_curve.push_back(probe_loss(res.model, data, objective, probe, sched, cfg.norm));
        if (on_epoch) on_epoch(epoch, res.loss_curve.back(), res.epoch_loss.back());
        last_epoch = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() - begin;
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace stmforge::genmodel
