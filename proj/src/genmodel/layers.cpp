#include "stmforge/genmodel/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace stmforge::genmodel {

Conv2d::Conv2d(const std::string& name, int cin, int cout, int k)
    : weight(name + ".weight", {cout, cin, k, k}, static_cast<Eigen::Index>(cin) * k * k, cout),
      bias(name + ".bias", {cout}, 1, cout),
      cin_(cin),
      cout_(cout),
      k_(k) {
    if (cin <= 0 || cout <= 0 || k <= 0 || k % 2 == 0) throw std::invalid_argument("invalid convolution shape");
}

Eigen::MatrixXd im2col(const Tensor& x, int k) {
    const int h = x.height, w = x.width, pad = k / 2;
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(x.pixels(), static_cast<Eigen::Index>(x.channels) * k * k);
    for (int ci = 0; ci < x.channels; ++ci) {
        const double* src = x.data.col(ci).data();
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                double* dst = cols.col((static_cast<Eigen::Index>(ci) * k + ky) * k + kx).data();
                const int dy = ky - pad, dx = kx - pad;
                const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
                for (int y = std::max(0, -dy); y < std::min(h, h - dy); ++y) {
                    const double* s = src + static_cast<std::ptrdiff_t>(y + dy) * w + dx;
                    double* d = dst + static_cast<std::ptrdiff_t>(y) * w;
                    for (int xx = x0; xx < x1; ++xx) d[xx] = s[xx];
                }
            }
    }
    return cols;
}

Tensor col2im(const Eigen::MatrixXd& cols, int channels, int height, int width, int k) {
    const int h = height, w = width, pad = k / 2;
    Tensor out(channels, h, w);
    for (int ci = 0; ci < channels; ++ci) {
        double* dst = out.data.col(ci).data();
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                const double* src = cols.col((static_cast<Eigen::Index>(ci) * k + ky) * k + kx).data();
                const int dy = ky - pad, dx = kx - pad;
                const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
                for (int y = std::max(0, -dy); y < std::min(h, h - dy); ++y) {
                    double* d = dst + static_cast<std::ptrdiff_t>(y + dy) * w + dx;
                    const double* s = src + static_cast<std::ptrdiff_t>(y) * w;
                    for (int xx = x0; xx < x1; ++xx) d[xx] += s[xx];
                }
            }
    }
    return out;
}

Tensor Conv2d::forward(const Tensor& x, Eigen::MatrixXd* cols) const {
    if (x.channels != cin_) throw std::invalid_argument("convolution input has wrong channel count");
    Tensor y(cout_, x.height, x.width);
    if (k_ == 1) {
        y.data.noalias() = x.data * weight.value;
        if (cols) *cols = x.data;
    } else {
        Eigen::MatrixXd c = im2col(x, k_);
        y.data.noalias() = c * weight.value;
        if (cols) *cols = std::move(c);
    }
    y.data.rowwise() += bias.value.row(0);
    return y;
}

Tensor Conv2d::backward(const Tensor& dy, const Eigen::MatrixXd& cols, int height, int width) {
    weight.grad.noalias() += cols.transpose() * dy.data;
    bias.grad.row(0) += dy.data.colwise().sum();
    Eigen::MatrixXd dcols = dy.data * weight.value.transpose();
    if (k_ == 1) {
        Tensor dx(cin_, height, width);
        dx.data = std::move(dcols);
        return dx;
    }
    return col2im(dcols, cin_, height, width, k_);
}

Dense::Dense(const std::string& name, int in, int out)
    : weight(name + ".weight", {out, in}, out, in), bias(name + ".bias", {out}, out, 1) {}

Eigen::VectorXd Dense::forward(const Eigen::VectorXd& x) const { return weight.value * x + bias.value.col(0); }

void Dense::backward(const Eigen::VectorXd& x, const Eigen::VectorXd& dy) {
    weight.grad.noalias() += dy * x.transpose();
    bias.grad.col(0) += dy;
}

Tensor silu(const Tensor& x) {
    Tensor y = x;
    y.data = x.data.unaryExpr([](double v) { return v / (1.0 + std::exp(-v)); });
    return y;
}

Tensor silu_backward(const Tensor& x, const Tensor& dy) {
    Tensor dx = dy;
    dx.data = x.data.binaryExpr(dy.data, [](double v, double g) {
        const double s = 1.0 / (1.0 + std::exp(-v));
        return g * s * (1.0 + v * (1.0 - s));
    });
    return dx;
}

Tensor avg_pool2(const Tensor& x) {
    if (x.height % 2 || x.width % 2) throw std::invalid_argument("pooling needs even height and width");
    const int h = x.height / 2, w = x.width / 2;
    Tensor y(x.channels, h, w);
    for (int c = 0; c < x.channels; ++c) {
        const double* s = x.data.col(c).data();
        double* d = y.data.col(c).data();
        for (int r = 0; r < h; ++r)
            for (int q = 0; q < w; ++q) {
                const double* p = s + static_cast<std::ptrdiff_t>(2 * r) * x.width + 2 * q;
                d[r * w + q] = 0.25 * (p[0] + p[1] + p[x.width] + p[x.width + 1]);
            }
    }
    return y;
}

Tensor avg_pool2_backward(const Tensor& dy) {
    const int w2 = dy.width * 2;
    Tensor dx(dy.channels, dy.height * 2, w2);
    for (int c = 0; c < dy.channels; ++c) {
        const double* s = dy.data.col(c).data();
        double* d = dx.data.col(c).data();
        for (int r = 0; r < dx.height; ++r)
            for (int q = 0; q < w2; ++q) d[r * w2 + q] = 0.25 * s[(r / 2) * dy.width + q / 2];
    }
    return dx;
}

Tensor upsample2(const Tensor& x) {
    const int w2 = x.width * 2;
    Tensor y(x.channels, x.height * 2, w2);
    for (int c = 0; c < x.channels; ++c) {
        const double* s = x.data.col(c).data();
        double* d = y.data.col(c).data();
        for (int r = 0; r < y.height; ++r)
            for (int q = 0; q < w2; ++q) d[r * w2 + q] = s[(r / 2) * x.width + q / 2];
    }
    return y;
}

Tensor upsample2_backward(const Tensor& dy) {
    if (dy.height % 2 || dy.width % 2) throw std::invalid_argument("upsample gradient needs even height and width");
    const int h = dy.height / 2, w = dy.width / 2;
    Tensor dx(dy.channels, h, w);
    for (int c = 0; c < dy.channels; ++c) {
        const double* s = dy.data.col(c).data();
        double* d = dx.data.col(c).data();
        for (int r = 0; r < h; ++r)
            for (int q = 0; q < w; ++q) {
                const double* p = s + static_cast<std::ptrdiff_t>(2 * r) * dy.width + 2 * q;
                d[r * w + q] = p[0] + p[1] + p[dy.width] + p[dy.width + 1];
            }
    }
    return dx;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    if (a.height != b.height || a.width != b.width) throw std::invalid_argument("concat needs equal spatial size");
    Tensor y(a.channels + b.channels, a.height, a.width);
    y.data.leftCols(a.channels) = a.data;
    y.data.rightCols(b.channels) = b.data;
    return y;
}

Eigen::VectorXd time_embedding(double time, int dim) {
    if (dim <= 0 || dim % 2) throw std::invalid_argument("time embedding dimension must be even");
    const int half = dim / 2;
    Eigen::VectorXd e(dim);
    for (int k = 0; k < half; ++k) {
        const double freq = std::exp(-std::log(10000.0) * k / half);
        e[k] = std::sin(1000.0 * time * freq);
        e[half + k] = std::cos(1000.0 * time * freq);
    }
    return e;
}

}  // namespace stmforge::genmodel
