#pragma once

#include "stmforge/imagecore/image.hpp"

namespace stmforge::genmodel {

using imagecore::Image;

/// Conditioned network: epsilon prediction for DDIM, velocity for flow
/// matching, a direct estimate for the autoencoder baseline.
class Denoiser {
public:
    virtual ~Denoiser() = default;
    /// `time` is in [0, 1]: t / T for DDIM, s for flow matching.
    /// The output has the shape of `x` and must not depend on hidden state.
    virtual Image predict(const Image& x, double time, const Image& condition) const = 0;
};

}  // namespace stmforge::genmodel
