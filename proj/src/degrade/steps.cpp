#include "stmforge/degrade/steps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "stmforge/imagecore/filters.hpp"
#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::degrade {

using imagecore::NormState;

Image apply_copy_kernel(const Image& img, const CopyKernel& kernel) {
    switch (kernel.kind) {
        case CopyKernel::Kind::identity: return img;
        case CopyKernel::Kind::gaussian: return imagecore::gaussian_blur(img, kernel.sigma);
        case CopyKernel::Kind::median: return imagecore::median_filter(img, kernel.median_size);
        case CopyKernel::Kind::random: return imagecore::convolve(img, kernel.weights);
    }
    return img;
}

Image apply_multi_tip(const Image& img, const MultiTipParams& params) {
    if (img.norm_state() != NormState::unit) throw std::invalid_argument("apply_multi_tip expects a unit-normalized image");
    std::vector<double> out(img.pixels().begin(), img.pixels().end());
    for (const auto& copy : params.copies) {
        const Image displaced = imagecore::shift(img, copy.dx, copy.dy);
        std::vector<double> ghost(displaced.size());
        auto src = displaced.pixels();
        for (std::size_t i = 0; i < ghost.size(); ++i) ghost[i] = copy.amplitude / (1.0 + std::exp(copy.c - copy.d * src[i]));
        const Image shaped = apply_copy_kernel(Image(img.height(), img.width(), std::move(ghost)), copy.kernel);
        auto g = shaped.pixels();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += g[i];
    }
    return Image(img.height(), img.width(), std::move(out));
}

Kernel sample_random_kernel(Rng& rng) {
    const int size = rng.bernoulli(0.5) ? 5 : 6;
    std::vector<double> w(static_cast<std::size_t>(size) * size);
    while (true) {
        for (double& v : w) v = rng.uniform(-0.5, 1.0);
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        if (std::abs(sum) > 0.1) {
            for (double& v : w) v /= sum;
            return Kernel::centered(size, w);
        }
    }
}

CopyKernel sample_copy_kernel(Rng& rng) {
    static constexpr std::array<double, 3> kKindWeights{0.3, 0.4, 0.3};
    CopyKernel k;
    switch (rng.categorical(kKindWeights)) {
        case 0:
            k.kind = CopyKernel::Kind::gaussian;
            k.sigma = rng.uniform(1.0, 3.0);
            break;
        case 1: {
            k.kind = CopyKernel::Kind::median;
            const int size = rng.uniform_int(1, 9);
            k.median_size = size % 2 == 0 ? size + 1 : size;
            break;
        }
        default:
            k.kind = CopyKernel::Kind::random;
            k.weights = sample_random_kernel(rng);
            break;
    }
    return k;
}

MultiTipParams sample_multi_tip(Rng& rng, const std::array<double, 3>& tip_count_weights) {
    MultiTipParams p;
    p.n_tips = 2 + static_cast<int>(rng.categorical(tip_count_weights));
    for (int i = 0; i + 1 < p.n_tips; ++i) {
        TipCopy c;
        c.amplitude = rng.uniform(1.0, 2.5);
        c.c = rng.uniform(5.0, 9.0);
        c.d = rng.uniform(7.0, 10.0);
        c.dx = static_cast<int>(std::lround(rng.uniform(1.0, 11.0)));
        c.dy = static_cast<int>(std::lround(rng.uniform(1.0, 11.0)));
        c.kernel = sample_copy_kernel(rng);
        p.copies.push_back(std::move(c));
    }
    return p;
}

std::vector<int> sample_row_shifts(int rows, double sigma, Rng& rng) {
    std::vector<int> shifts(static_cast<std::size_t>(std::max(rows, 0)));
    for (int& s : shifts) s = static_cast<int>(std::lround(rng.normal(0.0, sigma)));
    return shifts;
}

Image apply_misalignment(const Image& img, double sigma, Rng& rng) {
    const auto shifts = sample_row_shifts(img.height(), sigma, rng);
    return imagecore::shift_rows(img, shifts);
}

Image apply_blunt_tip(const Image& img, double sigma) {
    return imagecore::gaussian_blur(img, sigma);
}

Image apply_tip_change(const Image& img, int start_row, double sigma, std::optional<double> offset) {
    if (start_row < 0 || start_row >= img.height()) throw std::invalid_argument("tip change start row outside the image");
    const Image blurred = imagecore::gaussian_blur(img, sigma);
    std::vector<double> out(img.pixels().begin(), img.pixels().end());
    const std::size_t from = static_cast<std::size_t>(start_row) * img.width();
    std::copy(blurred.pixels().begin() + static_cast<std::ptrdiff_t>(from), blurred.pixels().end(),
              out.begin() + static_cast<std::ptrdiff_t>(from));
    if (offset)
        for (int c = 0; c < img.width(); ++c) out[from + c] += *offset;
    return Image(img.height(), img.width(), std::move(out));
}

ScanlineParams sample_scanline_noise(int h, int w, Rng& rng, const ScanlineConfig& cfg) {
    ScanlineParams p;
    const int lines = std::min(rng.uniform_int(cfg.min_lines, cfg.max_lines), h);
    const int cap = static_cast<int>(std::lround(cfg.max_length_fraction * w));

    // Partial Fisher-Yates for distinct rows.
    std::vector<int> rows(static_cast<std::size_t>(h));
    std::iota(rows.begin(), rows.end(), 0);
    for (int i = 0; i < lines; ++i) std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(rng.uniform_int(i, h - 1))]);
    rows.resize(static_cast<std::size_t>(lines));
    std::sort(rows.begin(), rows.end());

    for (int row : rows) {
        ScanlineSegment s;
        s.row = row;
        s.length = std::min(cap, static_cast<int>(std::floor(rng.uniform(0.0, static_cast<double>(cap)))));
        s.start = rng.uniform_int(0, w - s.length);
        s.kind = static_cast<Perturbation>(rng.categorical(cfg.perturbation_weights));
        s.sign = rng.bernoulli(0.5) ? 1 : -1;
        switch (s.kind) {
            case Perturbation::constant: s.value = rng.uniform(0.0, 0.4); break;
            case Perturbation::lognormal:
                s.mu = rng.uniform(1.0, 2.0);
                s.sigma = rng.uniform(0.5, 1.0);
                s.peak = rng.uniform(0.1, 0.4);
                break;
            case Perturbation::sinusoid:
                s.amplitude = rng.uniform(0.05, 0.4);
                s.period = rng.uniform(8.0, 64.0);
                s.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                break;
        }
        p.segments.push_back(s);
    }
    return p;
}

std::vector<double> segment_profile(const ScanlineSegment& seg) {
    std::vector<double> prof(static_cast<std::size_t>(std::max(seg.length, 0)));
    switch (seg.kind) {
        case Perturbation::constant: std::fill(prof.begin(), prof.end(), seg.value); break;
        case Perturbation::lognormal: {
            // Log-normal density at x = 1..length px, rescaled to the drawn peak.
            double top = 0.0;
            for (std::size_t j = 0; j < prof.size(); ++j) {
                const double x = static_cast<double>(j + 1);
                const double z = (std::log(x) - seg.mu) / seg.sigma;
                prof[j] = std::exp(-0.5 * z * z) / (x * seg.sigma * std::sqrt(2.0 * std::numbers::pi));
                top = std::max(top, prof[j]);
            }
            if (top > 0.0)
                for (double& v : prof) v *= seg.peak / top;
            break;
        }
        case Perturbation::sinusoid:
            for (std::size_t j = 0; j < prof.size(); ++j)
                prof[j] = seg.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(j) / seg.period + seg.phase);
            break;
    }
    return prof;
}

Image apply_scanline_segments(const Image& img, const ScanlineParams& params, double scale) {
    std::vector<double> out(img.pixels().begin(), img.pixels().end());
    for (const auto& seg : params.segments) {
        if (seg.row < 0 || seg.row >= img.height() || seg.start < 0 || seg.start + seg.length > img.width())
            throw std::invalid_argument("scan line segment outside the image");
        const auto prof = segment_profile(seg);
        double* row = out.data() + static_cast<std::size_t>(seg.row) * img.width() + seg.start;
        for (std::size_t j = 0; j < prof.size(); ++j) row[j] += seg.sign * scale * prof[j];
    }
    return Image(img.height(), img.width(), std::move(out));
}

Image apply_scanline_noise(const Image& img, Rng& rng, const ScanlineConfig& cfg) {
    return apply_scanline_segments(img, sample_scanline_noise(img.height(), img.width(), rng, cfg));
}

}  // namespace stmforge::degrade
