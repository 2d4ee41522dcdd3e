#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "stmforge/imagecore/image.hpp"

namespace stmtest {

using stmforge::imagecore::Image;
using stmforge::imagecore::NormState;

// Test-side generators use std::mt19937_64 directly so the code under test
// never supplies its own inputs.
inline Image random_image(int h, int w, std::uint64_t seed, double lo = 0.0, double hi = 1.0,
                          NormState state = NormState::raw) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> px(static_cast<std::size_t>(h) * w);
    for (double& v : px) v = dist(gen);
    return Image(h, w, std::move(px), state);
}

inline Image gaussian_image(int h, int w, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> px(static_cast<std::size_t>(h) * w);
    for (double& v : px) v = dist(gen);
    return Image(h, w, std::move(px));
}

inline Image constant_image(int h, int w, double value, NormState state = NormState::raw) {
    return Image(h, w, std::vector<double>(static_cast<std::size_t>(h) * w, value), state);
}

inline Image from_rows(const std::vector<std::vector<double>>& rows, NormState state = NormState::raw) {
    std::vector<double> px;
    for (const auto& r : rows) px.insert(px.end(), r.begin(), r.end());
    return Image(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()), std::move(px), state);
}

inline double max_abs_diff(const Image& a, const Image& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
    return m;
}

/// Naive O(N^4) DFT, independent of the FFT backend.
inline std::vector<std::complex<double>> naive_dft2(const Image& img) {
    const int h = img.height();
    const int w = img.width();
    std::vector<std::complex<double>> out(img.size());
    for (int k = 0; k < h; ++k)
        for (int l = 0; l < w; ++l) {
            std::complex<double> acc{};
            for (int m = 0; m < h; ++m)
                for (int n = 0; n < w; ++n) {
                    const double ang = -2.0 * std::numbers::pi * (static_cast<double>(k * m) / h + static_cast<double>(l * n) / w);
                    acc += img(m, n) * std::complex<double>(std::cos(ang), std::sin(ang));
                }
            out[static_cast<std::size_t>(k) * w + l] = acc;
        }
    return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("stmforge_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Three binomial standard deviations around n * p.
inline bool within_3sigma(std::size_t count, std::size_t n, double p) {
    const double mean = static_cast<double>(n) * p;
    const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
    return std::abs(static_cast<double>(count) - mean) <= 3.0 * sd;
}

}  // namespace stmtest
