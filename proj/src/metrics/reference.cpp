#include "stmforge/metrics/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace stmforge::metrics {

double psnr(const Image& a, const Image& b, double max_value) {
    imagecore::require_same_shape(a, b, "psnr");
    double se = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.pixels()[i] - b.pixels()[i];
        se += d * d;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_value * max_value / (se / static_cast<double>(a.size())));
}

std::string_view to_string(SsimMode m) { return m == SsimMode::global ? "global" : "windowed"; }

SsimMode ssim_mode_from_string(std::string_view s) {
    if (s == "global") return SsimMode::global;
    if (s == "windowed") return SsimMode::windowed;
    throw std::invalid_argument("unknown SSIM mode: " + std::string(s));
}

namespace {

double ssim_formula(double ma, double mb, double va, double vb, double cov) {
    return ((2 * ma * mb + kSsimC1) * (2 * cov + kSsimC2)) / ((ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2));
}

double ssim_global(const Image& a, const Image& b) {
    const auto n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a.pixels()[i];
        mb += b.pixels()[i];
    }
    ma /= n;
    mb /= n;
    double va = 0, vb = 0, cov = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a.pixels()[i] - ma, db = b.pixels()[i] - mb;
        va += da * da;
        vb += db * db;
        cov += da * db;
    }
    return ssim_formula(ma, mb, va / n, vb / n, cov / n);
}

// Separable weighted sums over valid windows.
std::vector<double> window_sum(const std::vector<double>& src, int h, int w, const std::vector<double>& g) {
    const int k = static_cast<int>(g.size());
    const int oh = h - k + 1, ow = w - k + 1;
    std::vector<double> tmp(static_cast<std::size_t>(h) * ow, 0.0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (int j = 0; j < k; ++j) acc += g[static_cast<std::size_t>(j)] * src[static_cast<std::size_t>(r) * w + c + j];
            tmp[static_cast<std::size_t>(r) * ow + c] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow, 0.0);
    for (int r = 0; r < oh; ++r)
        for (int c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (int j = 0; j < k; ++j) acc += g[static_cast<std::size_t>(j)] * tmp[static_cast<std::size_t>(r + j) * ow + c];
            out[static_cast<std::size_t>(r) * ow + c] = acc;
        }
    return out;
}

double ssim_windowed(const Image& a, const Image& b) {
    const int h = a.height(), w = a.width(), k = kSsimWindow;
    if (h < k || w < k) throw std::invalid_argument("windowed SSIM needs images of at least 11 x 11");
    std::vector<double> g(static_cast<std::size_t>(k));
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        const double x = i - k / 2;
        g[static_cast<std::size_t>(i)] = std::exp(-x * x / (2 * kSsimSigma * kSsimSigma));
        total += g[static_cast<std::size_t>(i)];
    }
    for (double& v : g) v /= total;

    const std::vector<double> pa(a.pixels().begin(), a.pixels().end()), pb(b.pixels().begin(), b.pixels().end());
    std::vector<double> aa(pa.size()), bb(pa.size()), ab(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        aa[i] = pa[i] * pa[i];
        bb[i] = pb[i] * pb[i];
        ab[i] = pa[i] * pb[i];
    }
    const auto ma = window_sum(pa, h, w, g), mb = window_sum(pb, h, w, g);
    const auto saa = window_sum(aa, h, w, g), sbb = window_sum(bb, h, w, g), sab = window_sum(ab, h, w, g);
    double acc = 0.0;
    for (std::size_t i = 0; i < ma.size(); ++i)
        acc += ssim_formula(ma[i], mb[i], saa[i] - ma[i] * ma[i], sbb[i] - mb[i] * mb[i], sab[i] - ma[i] * mb[i]);
    return acc / static_cast<double>(ma.size());
}

}  // namespace

double ssim(const Image& a, const Image& b, SsimMode mode) {
    imagecore::require_same_shape(a, b, "ssim");
    return mode == SsimMode::global ? ssim_global(a, b) : ssim_windowed(a, b);
}

}  // namespace stmforge::metrics
