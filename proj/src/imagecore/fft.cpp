#include "stmforge/imagecore/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace stmforge::imagecore {

namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

Spectrum transform(int h, int w, std::vector<std::complex<double>> data) {
    Spectrum out{h, w, std::vector<std::complex<double>>(data.size())};
    if (data.empty()) return out;
    auto* in = reinterpret_cast<fftw_complex*>(data.data());
    auto* dst = reinterpret_cast<fftw_complex*>(out.bins.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(h, w, in, dst, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

Spectrum fft2(const Image& img) {
    std::vector<std::complex<double>> data(img.pixels().begin(), img.pixels().end());
    return transform(img.height(), img.width(), std::move(data));
}

Spectrum fft2(const Spectrum& data) {
    return transform(data.height, data.width, data.bins);
}

double wrap_phase(double angle) {
    constexpr double pi = std::numbers::pi;
    double a = std::remainder(angle, 2.0 * pi);  // [-pi, pi]
    if (a <= -pi) a += 2.0 * pi;
    return a;
}

std::pair<Image, Image> fft2_mag_phase(const Image& img) {
    const Spectrum s = fft2(img);
    std::vector<double> mag(s.bins.size());
    std::vector<double> phase(s.bins.size());
    for (std::size_t i = 0; i < s.bins.size(); ++i) {
        mag[i] = std::abs(s.bins[i]);
        phase[i] = wrap_phase(std::arg(s.bins[i]));
    }
    return {Image(s.height, s.width, std::move(mag)), Image(s.height, s.width, std::move(phase))};
}

}  // namespace stmforge::imagecore
