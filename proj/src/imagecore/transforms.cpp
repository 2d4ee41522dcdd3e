#include "stmforge/imagecore/transforms.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace stmforge::imagecore {

namespace {

Image normalize_to(const Image& img, double lo, double hi, NormState state) {
    if (img.empty()) throw std::invalid_argument("degenerate dynamic range");
    const double mn = img.min();
    const double mx = img.max();
    if (!(mx > mn)) throw std::invalid_argument("degenerate dynamic range");
    const double scale = (hi - lo) / (mx - mn);
    std::vector<double> out(img.size());
    auto px = img.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(lo + (px[i] - mn) * scale, lo, hi);
    // Pin the extremes exactly; rounding may otherwise leave them an ulp off.
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (px[i] == mn) out[i] = lo;
        if (px[i] == mx) out[i] = hi;
    }
    return Image(img.height(), img.width(), std::move(out), state);
}

}  // namespace

Image normalize_unit(const Image& img) { return normalize_to(img, 0.0, 1.0, NormState::unit); }

Image normalize_sym(const Image& img) { return normalize_to(img, -1.0, 1.0, NormState::symmetric); }

Image to_unit_range(const Image& img) {
    switch (img.norm_state()) {
        case NormState::unit: return img;
        case NormState::symmetric: {
            std::vector<double> out(img.size());
            auto px = img.pixels();
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp((px[i] + 1.0) * 0.5, 0.0, 1.0);
            return Image(img.height(), img.width(), std::move(out), NormState::unit);
        }
        case NormState::raw: break;
    }
    return normalize_unit(img);
}

Image to_symmetric_range(const Image& img) {
    switch (img.norm_state()) {
        case NormState::symmetric: return img;
        case NormState::unit: {
            std::vector<double> out(img.size());
            auto px = img.pixels();
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(2.0 * px[i] - 1.0, -1.0, 1.0);
            return Image(img.height(), img.width(), std::move(out), NormState::symmetric);
        }
        case NormState::raw: break;
    }
    return normalize_sym(img);
}

Image clamp_to(const Image& img, NormState state) {
    if (state == NormState::raw) return img.with_state(NormState::raw);
    const double lo = state == NormState::unit ? 0.0 : -1.0;
    std::vector<double> out(img.pixels().begin(), img.pixels().end());
    for (double& v : out) v = std::clamp(v, lo, 1.0);
    return Image(img.height(), img.width(), std::move(out), state);
}

Image rotate_quarter(const Image& img, int turns) {
    turns = ((turns % 4) + 4) % 4;
    if (turns == 0) return img;
    Image cur = img;
    for (int t = 0; t < turns; ++t) {
        const int h = cur.height();
        const int w = cur.width();
        std::vector<double> out(cur.size());
        // Output is w x h; input (r, c) -> output (c, h - 1 - r).
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) out[static_cast<std::size_t>(c) * h + (h - 1 - r)] = cur(r, c);
        cur = Image(w, h, std::move(out), cur.norm_state());
    }
    return cur;
}

Image crop(const Image& img, int top, int left, int h, int w) {
    if (h < 0 || w < 0 || top < 0 || left < 0 || top + h > img.height() || left + w > img.width())
        throw std::out_of_range("crop window (" + std::to_string(top) + "," + std::to_string(left) + "," +
                                std::to_string(h) + "," + std::to_string(w) + ") outside " +
                                std::to_string(img.height()) + "x" + std::to_string(img.width()) + " image");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(h) * w);
    for (int r = 0; r < h; ++r) {
        auto row = img.row(top + r).subspan(left, w);
        out.insert(out.end(), row.begin(), row.end());
    }
    return Image(h, w, std::move(out), img.norm_state());
}

Image shift(const Image& img, int dx, int dy) {
    if (std::abs(dx) >= std::max(img.width(), 1) || std::abs(dy) >= std::max(img.height(), 1))
        throw std::invalid_argument("shift larger than the image");
    const int h = img.height();
    const int w = img.width();
    std::vector<double> out(img.size());
    for (int r = 0; r < h; ++r) {
        const int sr = std::clamp(r - dy, 0, h - 1);
        for (int c = 0; c < w; ++c) out[static_cast<std::size_t>(r) * w + c] = img(sr, std::clamp(c - dx, 0, w - 1));
    }
    return Image(h, w, std::move(out), img.norm_state());
}

Image shift_rows(const Image& img, std::span<const int> row_shifts) {
    if (row_shifts.size() != static_cast<std::size_t>(img.height()))
        throw std::invalid_argument("shift_rows: one shift per row required");
    const int h = img.height();
    const int w = img.width();
    std::vector<double> out(img.size());
    for (int r = 0; r < h; ++r) {
        const int dx = row_shifts[static_cast<std::size_t>(r)];
        for (int c = 0; c < w; ++c) out[static_cast<std::size_t>(r) * w + c] = img(r, std::clamp(c - dx, 0, w - 1));
    }
    return Image(h, w, std::move(out), img.norm_state());
}

Image resample_y(const Image& img, int factor, ResampleDirection direction) {
    if (factor != 2 && factor != 4) throw std::invalid_argument("resample factor must be 2 or 4");
    const int w = img.width();
    if (direction == ResampleDirection::down) {
        if (img.height() % factor != 0) throw std::invalid_argument("image height not divisible by resample factor");
        const int h = img.height() / factor;
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(h) * w);
        for (int r = 0; r < h; ++r) {
            auto row = img.row(r * factor);
            out.insert(out.end(), row.begin(), row.end());
        }
        return Image(h, w, std::move(out), img.norm_state());
    }
    const int h = img.height() * factor;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(h) * w);
    for (int r = 0; r < h; ++r) {
        auto row = img.row(r / factor);
        out.insert(out.end(), row.begin(), row.end());
    }
    return Image(h, w, std::move(out), img.norm_state());
}

Image lincomb(const Image& a, double wa, const Image& b, double wb) {
    require_same_shape(a, b, "lincomb");
    std::vector<double> out(a.size());
    auto pa = a.pixels();
    auto pb = b.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = wa * pa[i] + wb * pb[i];
    return Image(a.height(), a.width(), std::move(out));
}

Image affine(const Image& img, double scale, double offset) {
    std::vector<double> out(img.size());
    auto p = img.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = p[i] * scale + offset;
    return Image(img.height(), img.width(), std::move(out));
}

double mean(const Image& img) {
    if (img.empty()) throw std::invalid_argument("mean of empty image");
    double s = 0.0;
    for (double v : img.pixels()) s += v;
    return s / static_cast<double>(img.size());
}

double variance(const Image& img) {
    const double m = mean(img);
    double s = 0.0;
    for (double v : img.pixels()) s += (v - m) * (v - m);
    return s / static_cast<double>(img.size());
}

}  // namespace stmforge::imagecore
