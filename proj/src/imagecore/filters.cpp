#include "stmforge/imagecore/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stmforge::imagecore {

std::vector<double> gaussian_taps(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("gaussian sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        taps[static_cast<std::size_t>(i + radius)] = v;
        total += v;
    }
    for (double& v : taps) v /= total;
    return taps;
}

Image gaussian_blur(const Image& img, double sigma) {
    const auto taps = gaussian_taps(sigma);
    const int radius = static_cast<int>(taps.size() / 2);
    const int h = img.height();
    const int w = img.width();
    if (img.empty()) return img;

    // Horizontal pass over an edge-padded row, then vertical pass.
    std::vector<double> tmp(img.size());
    std::vector<double> padded(static_cast<std::size_t>(w + 2 * radius));
    for (int r = 0; r < h; ++r) {
        auto row = img.row(r);
        for (int c = -radius; c < w + radius; ++c) padded[static_cast<std::size_t>(c + radius)] = row[static_cast<std::size_t>(std::clamp(c, 0, w - 1))];
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * padded[static_cast<std::size_t>(c) + k];
            tmp[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
    std::vector<double> out(img.size(), 0.0);
    for (int r = 0; r < h; ++r) {
        double* dst = out.data() + static_cast<std::size_t>(r) * w;
        for (int k = -radius; k <= radius; ++k) {
            const double t = taps[static_cast<std::size_t>(k + radius)];
            const double* src = tmp.data() + static_cast<std::size_t>(std::clamp(r + k, 0, h - 1)) * w;
            for (int c = 0; c < w; ++c) dst[c] += t * src[c];
        }
    }
    if (img.norm_state() != NormState::raw) {
        const double lo = img.norm_state() == NormState::unit ? 0.0 : -1.0;
        for (double& v : out) v = std::clamp(v, lo, 1.0);
    }
    return Image(h, w, std::move(out), img.norm_state());
}

Image median_filter(const Image& img, int k) {
    if (k < 1 || k % 2 == 0) throw std::invalid_argument("median kernel size must be odd and >= 1");
    if (k == 1) return img;
    const int h = img.height();
    const int w = img.width();
    const int r = k / 2;
    const std::size_t mid = static_cast<std::size_t>(k) * k / 2;
    std::vector<double> out(img.size());
    std::vector<double> window(static_cast<std::size_t>(k) * k);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t n = 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) window[n++] = img.clamped(y + dy, x + dx);
            std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(mid), window.end());
            out[static_cast<std::size_t>(y) * w + x] = window[mid];
        }
    }
    return Image(h, w, std::move(out), img.norm_state());
}

Image convolve(const Image& img, const Kernel& kernel) {
    kernel.validate();
    const int h = img.height();
    const int w = img.width();
    std::vector<double> out(img.size(), 0.0);
    for (int i = 0; i < kernel.size; ++i) {
        for (int j = 0; j < kernel.size; ++j) {
            const double kw = kernel(i, j);
            if (kw == 0.0) continue;
            const int oy = i - kernel.anchor_row;
            const int ox = j - kernel.anchor_col;
            for (int y = 0; y < h; ++y) {
                auto src = img.row(std::clamp(y + oy, 0, h - 1));
                double* dst = out.data() + static_cast<std::size_t>(y) * w;
                for (int x = 0; x < w; ++x) dst[x] += kw * src[static_cast<std::size_t>(std::clamp(x + ox, 0, w - 1))];
            }
        }
    }
    return Image(h, w, std::move(out));
}

}  // namespace stmforge::imagecore
