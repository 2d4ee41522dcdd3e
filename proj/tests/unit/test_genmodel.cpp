#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "stmforge/common/binary_io.hpp"
#include "stmforge/degrade/dataset.hpp"
#include "stmforge/genmodel/checkpoint.hpp"
#include "stmforge/genmodel/losses.hpp"
#include "stmforge/genmodel/processes.hpp"
#include "stmforge/genmodel/schedule.hpp"
#include "stmforge/genmodel/tiny_denoiser.hpp"
#include "stmforge/genmodel/train.hpp"
#include "stmforge/imagecore/transforms.hpp"
#include "support.hpp"

using namespace stmforge;
using namespace stmforge::genmodel;
using imagecore::NormState;
using stmtest::max_abs_diff;

namespace {

double oracle_alpha_bar(int t, int T) {
    const double s = 0.008;
    auto f = [&](double x) {
        const double c = std::cos((x / T + s) / (1 + s) * std::numbers::pi / 2);
        return c * c;
    };
    return f(t) / f(0);
}

// Model that knows x0 and returns the exact epsilon of whatever state it sees.
class OracleEps : public Denoiser {
public:
    OracleEps(Image x0, const NoiseSchedule& s) : x0_(std::move(x0)), sched_(s) {}
    Image predict(const Image& x, double time, const Image&) const override {
        const int t = static_cast<int>(std::lround(time * sched_.T));
        const double ab = sched_[t];
        std::vector<double> px(x.size());
        for (std::size_t i = 0; i < px.size(); ++i) px[i] = (x.pixels()[i] - std::sqrt(ab) * x0_.pixels()[i]) / std::sqrt(1 - ab);
        return Image(x.height(), x.width(), std::move(px));
    }

private:
    Image x0_;
    const NoiseSchedule& sched_;
};

class ConstantField : public Denoiser {
public:
    explicit ConstantField(Image c) : c_(std::move(c)) {}
    Image predict(const Image&, double, const Image&) const override { return c_; }

private:
    Image c_;
};

// Exact flow for a point-mass target: v(x, s) = (x0 - x) / (1 - s).
class PointMassField : public Denoiser {
public:
    explicit PointMassField(Image x0) : x0_(std::move(x0)) {}
    Image predict(const Image& x, double s, const Image&) const override {
        std::vector<double> px(x.size());
        for (std::size_t i = 0; i < px.size(); ++i) px[i] = (x0_.pixels()[i] - x.pixels()[i]) / (1 - s);
        return Image(x.height(), x.width(), std::move(px));
    }

private:
    Image x0_;
};

// v = x cos(s); exact endpoint x(1) = x(0) exp(sin 1).
class CosField : public Denoiser {
public:
    Image predict(const Image& x, double s, const Image&) const override { return imagecore::affine(x, std::cos(s), 0.0); }
};

double rk2_error(int steps) {
    const Image x0 = stmtest::from_rows({{0.3, -1.2}, {2.0, 0.7}});
    const Image end = fm_integrate_rk2(CosField{}, x0, x0, steps);
    return max_abs_diff(end, imagecore::affine(x0, std::exp(std::sin(1.0)), 0.0));
}

double naive_fft_loss(const Image& x0, const Image& xh, const Image& eps, const Image& ep) {
    const auto X = stmtest::naive_dft2(x0);
    const auto Y = stmtest::naive_dft2(xh);
    double mag = 0, ph = 0, dm = 0;
    for (std::size_t k = 0; k < X.size(); ++k) {
        mag += std::abs(std::abs(X[k]) - std::abs(Y[k]));
        double d = std::arg(X[k]) - std::arg(Y[k]);
        while (d <= -std::numbers::pi) d += 2 * std::numbers::pi;
        while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
        ph += std::abs(d);
    }
    for (std::size_t i = 0; i < eps.size(); ++i) dm += std::abs(eps.pixels()[i] - ep.pixels()[i]);
    const double n = static_cast<double>(X.size());
    return 0.5 * dm / n + 0.25 * mag / n + 0.25 * ph / n;
}

Image shift_image(const Image& a, double by) { return imagecore::affine(a, 1.0, by); }

std::vector<degrade::SampleRecord> toy_set(std::size_t n, int crop, std::uint64_t seed) {
    const auto sources = degrade::synthetic_pristine_set(6, crop + 32, seed);
    degrade::DegradeConfig cfg;
    cfg.crop_size = crop;
    cfg.multitip_prob = 0.0;
    cfg.misalign_prob = 1.0;
    cfg.scanline_prob = 1.0;
    cfg.blunt_prob = cfg.tipchange_prob = 0.0;
    return degrade::generate_samples(sources, degrade::Task::restore, n, seed, 1, cfg);
}

}  // namespace

TEST_CASE("cosine schedule") {
    const auto s = cosine_schedule(1000);
    CHECK(s.alpha_bar.size() == 1001);
    CHECK(s[0] == 1.0);
    for (int t = 1; t <= 1000; ++t) REQUIRE(s[t] < s[t - 1]);
    CHECK(s[500] == doctest::Approx(oracle_alpha_bar(500, 1000)).epsilon(1e-12));
    CHECK(std::abs(s[500] - oracle_alpha_bar(500, 1000)) < 1e-12);
    CHECK(std::abs(s[123] - oracle_alpha_bar(123, 1000)) < 1e-12);
    CHECK(s[1000] > 0.0);
    CHECK(std::sqrt(s[1000]) < 0.032);
    for (int T : {1, 2, 3, 10, 50, 1000, 4000}) {
        const auto q = cosine_schedule(T);
        CHECK(q[T] < 1e-3);
        CHECK(q[T] > 0.0);
        for (int t = 1; t <= T; ++t) REQUIRE(q[t] < q[t - 1]);
    }
    CHECK_THROWS_AS(cosine_schedule(0), std::invalid_argument);
}

TEST_CASE("DDIM forward and reverse") {
    const auto sched = cosine_schedule(1000);
    const Image x0 = stmtest::random_image(8, 9, 1, -1, 1);
    const Image eps = stmtest::gaussian_image(8, 9, 2);
    CHECK(ddim_forward(x0, eps, 0, sched) == x0);
    CHECK(max_abs_diff(ddim_forward(x0, eps, 1000, sched), eps) < 0.032 * 1.0 + 1e-6);
    {
        const Image xt = ddim_forward(x0, eps, 437, sched);
        const double ab = oracle_alpha_bar(437, 1000);
        for (std::size_t i = 0; i < xt.size(); ++i)
            REQUIRE(std::abs(xt.pixels()[i] - (std::sqrt(ab) * x0.pixels()[i] + std::sqrt(1 - ab) * eps.pixels()[i])) < 1e-12);
    }
    CHECK_THROWS_AS(ddim_forward(x0, stmtest::gaussian_image(8, 8, 1), 3, sched), std::invalid_argument);

    SUBCASE("true epsilon to t_prev = 0 returns x0") {
        for (int t : {1, 10, 500, 999, 1000}) {
            const Image xt = ddim_forward(x0, eps, t, sched);
            CHECK(max_abs_diff(ddim_reverse_step(xt, eps, t, 0, sched), x0) < 1e-9);
        }
    }
    SUBCASE("zero epsilon is a rescale") {
        const Image xt = stmtest::random_image(8, 9, 5, -2, 2);
        const Image zero = stmtest::constant_image(8, 9, 0.0);
        const Image out = ddim_reverse_step(xt, zero, 700, 300, sched);
        CHECK(max_abs_diff(out, imagecore::affine(xt, std::sqrt(sched[300] / sched[700]), 0.0)) < 1e-12);
    }
    SUBCASE("random inputs match a scalar oracle") {
        const Image xt = stmtest::gaussian_image(8, 9, 6);
        const Image ep = stmtest::gaussian_image(8, 9, 7);
        const Image out = ddim_reverse_step(xt, ep, 800, 650, sched);
        const double a = sched[800], b = sched[650];
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double want = std::sqrt(b) * (xt.pixels()[i] - std::sqrt(1 - a) * ep.pixels()[i]) / std::sqrt(a) +
                                std::sqrt(1 - b) * ep.pixels()[i];
            REQUIRE(std::abs(out.pixels()[i] - want) < 1e-9);
        }
    }
    CHECK_THROWS_AS(ddim_reverse_step(x0, eps, 5, 5, sched), std::invalid_argument);
    CHECK_THROWS_AS(ddim_reverse_step(x0, eps, 5, 7, sched), std::invalid_argument);
}

TEST_CASE("DDIM sampling") {
    const auto sched = cosine_schedule(1000);
    const Image x0 = stmtest::random_image(8, 8, 11, -1, 1);
    const OracleEps oracle(x0, sched);
    for (int steps : {1, 2, 5, 10, 1000}) CHECK(max_abs_diff(ddim_sample(oracle, x0, steps, sched, 3), x0) < 1e-6);

    const auto ts = ddim_timesteps(1000, 1000);
    for (int i = 0; i <= 1000; ++i) REQUIRE(ts[static_cast<std::size_t>(i)] == 1000 - i);
    CHECK(ddim_timesteps(1000, 5) == std::vector<int>{1000, 800, 600, 400, 200, 0});
    CHECK_THROWS_AS(ddim_timesteps(1000, 0), std::invalid_argument);
    CHECK_THROWS_AS(ddim_timesteps(10, 11), std::invalid_argument);

    const TinyDenoiser model({}, 5);
    const Image cond = stmtest::random_image(16, 16, 4, -1, 1);
    CHECK(ddim_sample(model, cond, 5, sched, 9) == ddim_sample(model, cond, 5, sched, 9));
}

TEST_CASE("flow matching interpolation") {
    const Image x0 = stmtest::random_image(6, 7, 1, -1, 1);
    const Image eps = stmtest::gaussian_image(6, 7, 2);
    CHECK(fm_forward(x0, eps, 1.0) == x0);
    CHECK(fm_forward(x0, eps, 0.0) == eps);
    const Image mid = fm_forward(x0, eps, 0.5);
    for (std::size_t i = 0; i < mid.size(); ++i) REQUIRE(std::abs(mid.pixels()[i] - 0.5 * (x0.pixels()[i] + eps.pixels()[i])) < 1e-15);
    CHECK_THROWS_AS(fm_forward(x0, eps, 1.01), std::invalid_argument);
    CHECK_THROWS_AS(fm_forward(x0, eps, -0.01), std::invalid_argument);

    CHECK(fm_target_velocity(x0, x0).max() == 0.0);
    CHECK(fm_target_velocity(x0, x0).min() == 0.0);
    CHECK(fm_target_velocity(x0, stmtest::constant_image(6, 7, 0.0)) == x0.with_state(NormState::raw));
    const Image v = fm_target_velocity(x0, eps);
    for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(v.pixels()[i] == x0.pixels()[i] - eps.pixels()[i]);

    for (double s : {0.0, 0.13, 0.5, 0.77, 1.0}) {
        const Image back = imagecore::lincomb(fm_forward(x0, eps, s), 1.0, fm_target_velocity(x0, eps), 1.0 - s);
        CHECK(max_abs_diff(back, x0) < 1e-9);
    }
}

TEST_CASE("RK2 sampler") {
    const Image c = stmtest::random_image(5, 5, 3, -1, 1);
    SUBCASE("constant field is integrated exactly") {
        const ConstantField field(c);
        const Image start = stmtest::gaussian_image(5, 5, 8);
        for (int steps : {1, 3, 7}) CHECK(max_abs_diff(fm_integrate_rk2(field, start, c, steps), imagecore::lincomb(start, 1, c, 1)) < 1e-12);
    }
    SUBCASE("point-mass field recovers the target") {
        const PointMassField field(c);
        CHECK(max_abs_diff(fm_sample_rk2(field, c, 2, 42), c) < 1e-9);
        Rng rng(42);
        const Image eps = gaussian_noise(5, 5, rng);
        CHECK(max_abs_diff(fm_integrate_rk2(ConstantField(fm_target_velocity(c, eps)), eps, c, 2), c) < 1e-9);
    }
    SUBCASE("second-order convergence") {
        for (int n : {16, 32, 64}) {
            const double ratio = rk2_error(n) / rk2_error(2 * n);
            CHECK(ratio >= 3.5);
            CHECK(ratio <= 4.5);
            const double order = std::log2(ratio);
            CHECK(order >= 1.8);
            CHECK(order <= 2.2);
        }
    }
    CHECK_THROWS_AS(fm_sample_rk2(ConstantField(c), c, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(ddim_sample(ConstantField(c), c, 0, cosine_schedule(10), 1), std::invalid_argument);
}

TEST_CASE("pointwise losses") {
    const Image a = stmtest::random_image(7, 6, 1, -1, 1);
    const Image b = stmtest::random_image(7, 6, 2, -1, 1);
    CHECK(loss_dm(a, a) == 0.0);
    CHECK(loss_fm(a, a) == 0.0);
    CHECK(loss_mae(a, a) == 0.0);
    CHECK(loss_dm(a, shift_image(a, 0.1)) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(loss_fm(a, shift_image(a, -0.25)) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(loss_mae(a, shift_image(a, 0.3)) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(loss_dm(a, shift_image(a, 0.1), LossNorm::l2) == doctest::Approx(0.01).epsilon(1e-12));
    double l1 = 0, l2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.pixels()[i] - b.pixels()[i];
        l1 += std::abs(d);
        l2 += d * d;
    }
    CHECK(std::abs(loss_dm(a, b) - l1 / 42) < 1e-12);
    CHECK(std::abs(loss_fm(a, b) - l1 / 42) < 1e-12);
    CHECK(std::abs(loss_mae(a, b) - l1 / 42) < 1e-12);
    CHECK(std::abs(loss_fm(a, b, LossNorm::l2) - l2 / 42) < 1e-12);
    CHECK(loss_dm(a, b) > 0.0);
}

TEST_CASE("FFT loss") {
    const Image x0 = stmtest::random_image(8, 10, 3, -1, 1);
    const Image eps = stmtest::gaussian_image(8, 10, 4);
    CHECK(loss_fft_dm(x0, x0, eps, eps) == 0.0);

    SUBCASE("matching spectra leave half the epsilon loss") {
        const Image ep = shift_image(eps, 0.2);
        CHECK(loss_fft_dm(x0, x0, eps, ep) == doctest::Approx(0.5 * loss_dm(eps, ep)).epsilon(1e-12));
    }
    SUBCASE("circular translation changes only the phase") {
        std::vector<double> px(x0.size());
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 10; ++c) px[static_cast<std::size_t>(r * 10 + c)] = x0((r + 3) % 8, (c + 1) % 10);
        const Image rolled(8, 10, px);
        const auto terms = fft_loss_terms(x0, rolled, eps, eps);
        CHECK(terms.magnitude < 1e-12);
        CHECK(terms.phase > 0.1);
    }
    SUBCASE("random case against the naive DFT") {
        const Image xh = stmtest::random_image(8, 10, 9, -1, 1);
        const Image ep = stmtest::gaussian_image(8, 10, 10);
        CHECK(std::abs(loss_fft_dm(x0, xh, eps, ep) - naive_fft_loss(x0, xh, eps, ep)) < 1e-6);
        CHECK(loss_fft_dm(x0, xh, eps, ep) > 0.0);
    }
    SUBCASE("spectral gradient matches finite differences") {
        const Image xh = stmtest::random_image(6, 8, 12, -1, 1);
        const Image x = stmtest::random_image(6, 8, 13, -1, 1);
        const Image g = fft_spectral_grad(x, xh);
        auto spectral = [&](const Image& y) {
            const auto t = fft_loss_terms(x, y, x, x);
            return 0.25 * t.magnitude + 0.25 * t.phase;
        };
        const double h = 1e-6;
        for (std::size_t i = 0; i < xh.size(); i += 5) {
            std::vector<double> p(xh.pixels().begin(), xh.pixels().end()), m = p;
            p[i] += h;
            m[i] -= h;
            const double fd = (spectral(Image(6, 8, p)) - spectral(Image(6, 8, m))) / (2 * h);
            CHECK(g.pixels()[i] == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("TinyDenoiser") {
    const TinyDenoiser model({}, 1);
    // 3x3 convs: (cin*9 + 1) * cout; dense: (16 + 1) * c.
    const std::size_t expect = (2 * 9 + 1) * 8 + (8 * 9 + 1) * 8 + 17 * 8 + (8 * 9 + 1) * 16 + (16 * 9 + 1) * 16 + 17 * 16 +
                               (16 * 9 + 1) * 32 + (32 * 9 + 1) * 32 + 17 * 32 + (48 * 9 + 1) * 16 + (24 * 9 + 1) * 8 + (8 * 9 + 1);
    CHECK(model.parameter_count() == expect);
    CHECK(model.size_multiple() == 4);

    const Image x = stmtest::gaussian_image(16, 12, 3);
    const Image cond = stmtest::random_image(16, 12, 4, -1, 1);
    const Image y = model.predict(x, 0.3, cond);
    CHECK(y.height() == 16);
    CHECK(y.width() == 12);
    for (double v : y.pixels()) REQUIRE(std::isfinite(v));
    CHECK(model.predict(x, 0.3, cond) == y);
    CHECK_FALSE(model.predict(x, 0.7, cond) == y);
    CHECK_THROWS_AS(model.predict(stmtest::gaussian_image(10, 12, 1), 0.3, stmtest::gaussian_image(10, 12, 2)), std::invalid_argument);
    CHECK_THROWS_AS(TinyDenoiser(TinyDenoiser::Config{{}, 16}), std::invalid_argument);
}

TEST_CASE("TinyDenoiser gradient check") {
    TinyDenoiser model({}, 7);
    const Tensor input = TinyDenoiser::make_input(stmtest::gaussian_image(8, 8, 1), stmtest::random_image(8, 8, 2, -1, 1));
    const Image weights = stmtest::gaussian_image(8, 8, 3);
    Tensor dout(1, 8, 8);
    dout.data.col(0) = Eigen::Map<const Eigen::VectorXd>(weights.pixels().data(), 64);
    auto objective = [&](TinyDenoiser& m) { return m.forward(input, 0.42, nullptr).data.col(0).dot(dout.data.col(0)); };

    TinyDenoiser::Cache cache;
    model.zero_grad();
    model.forward(input, 0.42, &cache);
    model.backward(cache, dout);

    const std::vector<std::pair<std::string, Eigen::Index>> probe{
        {"enc0.conv_a.weight", 5}, {"enc1.time.weight", 17}, {"enc2.conv_b.bias", 3}, {"dec0.conv.weight", 101}, {"out.conv.weight", 4}};
    for (const auto& [name, idx] : probe) {
        Param* p = nullptr;
        for (Param* q : model.parameters())
            if (q->name == name) p = q;
        REQUIRE(p != nullptr);
        const double analytic = p->grad.data()[idx];
        const double h = 1e-6;
        const double keep = p->value.data()[idx];
        p->value.data()[idx] = keep + h;
        const double up = objective(model);
        p->value.data()[idx] = keep - h;
        const double down = objective(model);
        p->value.data()[idx] = keep;
        const double fd = (up - down) / (2 * h);
        CAPTURE(name);
        CHECK(std::abs(analytic - fd) <= 1e-3 * std::max(std::abs(fd), 1e-8));
    }
}

TEST_CASE("training objective gradients") {
    const auto data = toy_set(2, 16, 3);
    const auto sched = cosine_schedule(1000);
    for (Objective obj : {Objective::fm, Objective::ddim, Objective::ddim_fft, Objective::mae}) {
        CAPTURE(to_string(obj));
        TinyDenoiser model({}, 2);
        Rng rng(5);
        NoiseDraw d = draw_noise(obj, 16, 16, 1000, rng);
        if (obj == Objective::ddim_fft) d.t = 200;
        model.zero_grad();
        sample_loss(model, data[0], obj, d, sched, LossNorm::l2, true);
        Param* p = model.parameters()[8];  // enc1.conv_a.weight
        for (Eigen::Index idx : {3, 40}) {
            const double analytic = p->grad.data()[idx];
            const double h = 1e-6, keep = p->value.data()[idx];
            p->value.data()[idx] = keep + h;
            const double up = sample_loss(model, data[0], obj, d, sched, LossNorm::l2, false);
            p->value.data()[idx] = keep - h;
            const double down = sample_loss(model, data[0], obj, d, sched, LossNorm::l2, false);
            p->value.data()[idx] = keep;
            const double fd = (up - down) / (2 * h);
            CHECK(std::abs(analytic - fd) <= 1e-3 * std::max(std::abs(fd), 1e-6));
        }
    }
}

TEST_CASE("checkpoint round trip") {
    TinyDenoiser model({{4, 8}, 8}, 3);
    std::stringstream ss;
    write_checkpoint(ss, model);
    const TinyDenoiser back = read_checkpoint(ss);
    CHECK(back.config().channels == std::vector<int>{4, 8});
    CHECK(back.config().time_dim == 8);
    const auto a = model.parameters();
    const auto b = back.parameters();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i]->name == b[i]->name);
        CHECK(a[i]->shape == b[i]->shape);
        CHECK((a[i]->value.cast<float>().cast<double>() - b[i]->value).cwiseAbs().maxCoeff() == 0.0);
    }
    std::stringstream again;
    write_checkpoint(again, back);
    std::stringstream first;
    write_checkpoint(first, model);
    CHECK(again.str() == first.str());

    std::string bytes = first.str();
    SUBCASE("truncated") {
        std::stringstream cut(bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_AS(read_checkpoint(cut), IoError);
    }
    SUBCASE("bad magic") {
        bytes[0] = 'X';
        std::stringstream bad(bytes);
        CHECK_THROWS_AS(read_checkpoint(bad), IoError);
    }
    SUBCASE("file") {
        const auto dir = stmtest::temp_dir("ckpt");
        save_checkpoint(dir / "m.stmw", model);
        const Image x = stmtest::gaussian_image(8, 8, 1);
        CHECK(max_abs_diff(load_checkpoint(dir / "m.stmw").predict(x, 0.5, x), model.predict(x, 0.5, x)) < 1e-4);
        CHECK_THROWS_AS(load_checkpoint(dir / "missing.stmw"), IoError);
    }
}

TEST_CASE("train_toy") {
    const auto data = toy_set(24, 16, 8);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch = 4;
    cfg.seed = 5;
    cfg.probe_size = 8;

    SUBCASE("zero learning rate gives a constant curve") {
        cfg.lr = 0.0;
        const auto res = train_toy(data, Objective::fm, cfg);
        REQUIRE(res.loss_curve.size() == 3);
        CHECK(res.loss_curve[1] == res.loss_curve[0]);
        CHECK(res.loss_curve[2] == res.loss_curve[0]);
    }
    SUBCASE("same seed, same curve") {
        for (Objective obj : {Objective::fm, Objective::ddim, Objective::ddim_fft, Objective::mae}) {
            const auto a = train_toy(data, obj, cfg);
            const auto b = train_toy(data, obj, cfg);
            CHECK(a.loss_curve == b.loss_curve);
            CHECK(a.epoch_loss == b.epoch_loss);
        }
    }
    SUBCASE("empty dataset") { CHECK_THROWS_AS(train_toy({}, Objective::fm, cfg), std::invalid_argument); }
}

TEST_CASE("train_toy reduces the flow-matching loss on 200 lattice samples") {
    const auto data = toy_set(200, 32, 21);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch = 8;
    cfg.lr = 2e-3;
    cfg.seed = 1;
    const auto res = train_toy(data, Objective::fm, cfg);
    MESSAGE("loss curve " << res.loss_curve[0] << " -> " << res.loss_curve.back() << " in " << res.seconds << " s");
    CHECK(res.loss_curve.back() < res.loss_curve.front());
}
