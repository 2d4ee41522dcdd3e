#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace stmforge::imagecore {

/// Value-range contract carried by every image.
enum class NormState : unsigned char {
    raw = 0,        ///< arbitrary units
    unit = 1,       ///< all values in [0, 1]
    symmetric = 2,  ///< all values in [-1, 1]
};

std::string_view to_string(NormState s);
NormState norm_state_from_string(std::string_view s);

/// Row-major grid of finite heights. Immutable once constructed.
class Image {
public:
    Image() = default;
    /// Zero-filled image.
    Image(int height, int width, NormState state = NormState::raw);
    /// Validates size, finiteness and the range implied by `state`.
    Image(int height, int width, std::vector<double> pixels, NormState state = NormState::raw);

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return pixels_.size(); }
    bool empty() const { return pixels_.empty(); }
    NormState norm_state() const { return state_; }

    double operator()(int row, int col) const { return pixels_[static_cast<std::size_t>(row) * width_ + col]; }
    /// Edge-replicated read; any (row, col) is valid.
    double clamped(int row, int col) const;

    std::span<const double> pixels() const { return pixels_; }
    std::span<const double> row(int r) const {
        return std::span<const double>(pixels_).subspan(static_cast<std::size_t>(r) * width_, width_);
    }
    /// Moves the pixel buffer out, leaving this image empty.
    std::vector<double> release() &&;

    bool same_shape(const Image& other) const { return height_ == other.height_ && width_ == other.width_; }
    double min() const;
    double max() const;

    /// Same pixels, different contract; the new contract is validated.
    Image with_state(NormState state) const;

    friend bool operator==(const Image&, const Image&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<double> pixels_;
    NormState state_ = NormState::raw;
};

/// Square correlation kernel with an explicit anchor.
struct Kernel {
    int size = 1;
    std::vector<double> weights{1.0};
    int anchor_row = 0;
    int anchor_col = 0;

    static Kernel identity() { return Kernel{}; }
    /// Anchor at the center for odd sizes, (size/2 - 1, size/2 - 1) for even sizes.
    static Kernel centered(int size, std::vector<double> weights);

    double operator()(int r, int c) const { return weights[static_cast<std::size_t>(r) * size + c]; }
    double sum() const;
    /// Throws std::invalid_argument if the invariants do not hold.
    void validate() const;
};

/// Throws std::invalid_argument unless a and b share a shape.
void require_same_shape(const Image& a, const Image& b, std::string_view what);

}  // namespace stmforge::imagecore
