#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "stmforge/imagecore/image.hpp"

namespace stmforge::imagecore {

/// Unnormalized 2-D DFT coefficients, row-major, same shape as the input.
struct Spectrum {
    int height = 0;
    int width = 0;
    std::vector<std::complex<double>> bins;

    const std::complex<double>& operator()(int r, int c) const { return bins[static_cast<std::size_t>(r) * width + c]; }
};

/// Forward transform X[k,l] = sum x[m,n] exp(-2 pi i (km/H + ln/W)).
Spectrum fft2(const Image& img);
/// Same transform applied to complex data (used by the FFT-loss gradient).
Spectrum fft2(const Spectrum& data);

/// Magnitude (>= 0) and phase in (-pi, pi] grids of fft2(img), raw contract.
std::pair<Image, Image> fft2_mag_phase(const Image& img);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

}  // namespace stmforge::imagecore
