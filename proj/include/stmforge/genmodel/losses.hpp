#pragma once

#include <string_view>

#include "stmforge/imagecore/image.hpp"

namespace stmforge::genmodel {

using imagecore::Image;

/// Elementwise norm used by the epsilon and velocity losses.
enum class LossNorm { l1, l2 };

std::string_view to_string(LossNorm n);
LossNorm loss_norm_from_string(std::string_view s);

/// Mean |a - b| (l1) or mean (a - b)^2 (l2).
double mean_error(const Image& target, const Image& pred, LossNorm norm);
/// d mean_error / d pred.
Image mean_error_grad(const Image& target, const Image& pred, LossNorm norm);

double loss_dm(const Image& eps, const Image& eps_pred, LossNorm norm = LossNorm::l1);
double loss_fm(const Image& v_target, const Image& v_pred, LossNorm norm = LossNorm::l1);
/// Always mean absolute error.
double loss_mae(const Image& y, const Image& y_pred);

struct FftLossTerms {
    double dm = 0.0;         // loss_dm
    double magnitude = 0.0;  // mean | |F(x0)| - |F(x0_hat)| |
    double phase = 0.0;      // mean |wrap(arg F(x0) - arg F(x0_hat))|
    double total = 0.0;      // dm/2 + magnitude/4 + phase/4
};

/// F is the unnormalized 2-D DFT; x0_hat is the reconstruction from eps_pred.
FftLossTerms fft_loss_terms(const Image& x0, const Image& x0_hat, const Image& eps, const Image& eps_pred,
                            LossNorm norm = LossNorm::l1);
double loss_fft_dm(const Image& x0, const Image& x0_hat, const Image& eps, const Image& eps_pred,
                   LossNorm norm = LossNorm::l1);
/// Gradient of magnitude/4 + phase/4 with respect to x0_hat. Bins where
/// F(x0_hat) vanishes contribute nothing.
Image fft_spectral_grad(const Image& x0, const Image& x0_hat);

}  // namespace stmforge::genmodel
