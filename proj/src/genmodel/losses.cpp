#include "stmforge/genmodel/losses.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "stmforge/imagecore/fft.hpp"

namespace stmforge::genmodel {

using imagecore::require_same_shape;

std::string_view to_string(LossNorm n) { return n == LossNorm::l1 ? "l1" : "l2"; }

LossNorm loss_norm_from_string(std::string_view s) {
    if (s == "l1") return LossNorm::l1;
    if (s == "l2") return LossNorm::l2;
    throw std::invalid_argument("unknown loss norm: " + std::string(s));
}

double mean_error(const Image& target, const Image& pred, LossNorm norm) {
    require_same_shape(target, pred, "loss");
    auto a = target.pixels();
    auto b = pred.pixels();
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = b[i] - a[i];
        acc += norm == LossNorm::l1 ? std::abs(d) : d * d;
    }
    return acc / static_cast<double>(a.size());
}

Image mean_error_grad(const Image& target, const Image& pred, LossNorm norm) {
    require_same_shape(target, pred, "loss");
    auto a = target.pixels();
    auto b = pred.pixels();
    const double n = static_cast<double>(a.size());
    std::vector<double> g(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = b[i] - a[i];
        g[i] = norm == LossNorm::l1 ? ((d > 0) - (d < 0)) / n : 2.0 * d / n;
    }
    return Image(pred.height(), pred.width(), std::move(g));
}

double loss_dm(const Image& eps, const Image& eps_pred, LossNorm norm) { return mean_error(eps, eps_pred, norm); }
double loss_fm(const Image& v_target, const Image& v_pred, LossNorm norm) { return mean_error(v_target, v_pred, norm); }
double loss_mae(const Image& y, const Image& y_pred) { return mean_error(y, y_pred, LossNorm::l1); }

FftLossTerms fft_loss_terms(const Image& x0, const Image& x0_hat, const Image& eps, const Image& eps_pred, LossNorm norm) {
    require_same_shape(x0, x0_hat, "fft loss");
    FftLossTerms t;
    t.dm = loss_dm(eps, eps_pred, norm);
    const auto X = imagecore::fft2(x0);
    const auto Y = imagecore::fft2(x0_hat);
    for (std::size_t k = 0; k < X.bins.size(); ++k) {
        t.magnitude += std::abs(std::abs(X.bins[k]) - std::abs(Y.bins[k]));
        t.phase += std::abs(imagecore::wrap_phase(std::arg(X.bins[k]) - std::arg(Y.bins[k])));
    }
    const auto n = static_cast<double>(X.bins.size());
    t.magnitude /= n;
    t.phase /= n;
    t.total = 0.5 * t.dm + 0.25 * t.magnitude + 0.25 * t.phase;
    return t;
}

double loss_fft_dm(const Image& x0, const Image& x0_hat, const Image& eps, const Image& eps_pred, LossNorm norm) {
    return fft_loss_terms(x0, x0_hat, eps, eps_pred, norm).total;
}

Image fft_spectral_grad(const Image& x0, const Image& x0_hat) {
    require_same_shape(x0, x0_hat, "fft loss");
    const auto X = imagecore::fft2(x0);
    const auto Y = imagecore::fft2(x0_hat);
    const double scale = 0.25 / static_cast<double>(X.bins.size());
    imagecore::Spectrum g{Y.height, Y.width, std::vector<std::complex<double>>(Y.bins.size())};
    for (std::size_t k = 0; k < Y.bins.size(); ++k) {
        const std::complex<double> y = Y.bins[k];
        const double mag = std::abs(y);
        if (mag == 0.0) continue;
        const double dmag = std::abs(y) - std::abs(X.bins[k]);
        const double dphase = imagecore::wrap_phase(std::arg(X.bins[k]) - std::arg(y));
        const std::complex<double> grad =
            scale * (static_cast<double>((dmag > 0) - (dmag < 0)) * y / mag -
                     static_cast<double>((dphase > 0) - (dphase < 0)) * std::complex<double>(0.0, 1.0) * y / (mag * mag));
        g.bins[k] = std::conj(grad);
    }
    // d/dx_n = Re sum_k G_k exp(+i theta_kn) = Re F(conj G)_n.
    const auto back = imagecore::fft2(g);
    std::vector<double> px(back.bins.size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = back.bins[i].real();
    return Image(x0.height(), x0.width(), std::move(px));
}

}  // namespace stmforge::genmodel
