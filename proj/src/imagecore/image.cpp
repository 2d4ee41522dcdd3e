#include "stmforge/imagecore/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace stmforge::imagecore {

std::string_view to_string(NormState s) {
    switch (s) {
        case NormState::raw: return "raw";
        case NormState::unit: return "unit";
        case NormState::symmetric: return "symmetric";
    }
    return "raw";
}

NormState norm_state_from_string(std::string_view s) {
    if (s == "raw") return NormState::raw;
    if (s == "unit") return NormState::unit;
    if (s == "symmetric") return NormState::symmetric;
    throw std::invalid_argument("unknown norm state: " + std::string(s));
}

namespace {

void check_range(std::span<const double> px, NormState state) {
    for (double v : px)
        if (!std::isfinite(v)) throw std::invalid_argument("image contains non-finite values");
    if (state == NormState::raw || px.empty()) return;
    const auto [lo, hi] = std::minmax_element(px.begin(), px.end());
    const double low = state == NormState::unit ? 0.0 : -1.0;
    if (*lo < low || *hi > 1.0)
        throw std::invalid_argument("image values outside the " + std::string(to_string(state)) + " range");
}

}  // namespace

Image::Image(int height, int width, NormState state)
    : Image(height, width, std::vector<double>(static_cast<std::size_t>(std::max(height, 0)) * std::max(width, 0), 0.0), state) {}

Image::Image(int height, int width, std::vector<double> pixels, NormState state)
    : height_(height), width_(width), pixels_(std::move(pixels)), state_(state) {
    if (height < 0 || width < 0) throw std::invalid_argument("image dimensions must be non-negative");
    if (pixels_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width))
        throw std::invalid_argument("pixel count does not match height x width");
    check_range(pixels_, state_);
}

double Image::clamped(int row, int col) const {
    row = std::clamp(row, 0, height_ - 1);
    col = std::clamp(col, 0, width_ - 1);
    return (*this)(row, col);
}

std::vector<double> Image::release() && {
    height_ = width_ = 0;
    return std::move(pixels_);
}

double Image::min() const {
    if (pixels_.empty()) throw std::invalid_argument("empty image");
    return *std::min_element(pixels_.begin(), pixels_.end());
}

double Image::max() const {
    if (pixels_.empty()) throw std::invalid_argument("empty image");
    return *std::max_element(pixels_.begin(), pixels_.end());
}

Image Image::with_state(NormState state) const {
    return Image(height_, width_, pixels_, state);
}

Kernel Kernel::centered(int size, std::vector<double> weights) {
    const int anchor = size % 2 == 1 ? size / 2 : size / 2 - 1;
    Kernel k{size, std::move(weights), anchor, anchor};
    k.validate();
    return k;
}

double Kernel::sum() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void Kernel::validate() const {
    if (size < 1) throw std::invalid_argument("kernel size must be >= 1");
    if (weights.size() != static_cast<std::size_t>(size) * size) throw std::invalid_argument("kernel weight count mismatch");
    if (anchor_row < 0 || anchor_row >= size || anchor_col < 0 || anchor_col >= size)
        throw std::invalid_argument("kernel anchor outside the kernel");
    for (double w : weights)
        if (!std::isfinite(w)) throw std::invalid_argument("kernel weights must be finite");
}

void require_same_shape(const Image& a, const Image& b, std::string_view what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch (" + std::to_string(a.height()) + "x" +
                                    std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                                    std::to_string(b.width()) + ")");
}

}  // namespace stmforge::imagecore
