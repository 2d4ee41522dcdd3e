#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stmforge::genmodel {

/// Channel-major feature map: data is (height * width) x channels, column-major,
/// so each column is one channel in row-major pixel order.
struct Tensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    Eigen::MatrixXd data;

    Tensor() = default;
    Tensor(int c, int h, int w) : channels(c), height(h), width(w), data(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h) * w, c)) {}
    Eigen::Index pixels() const { return static_cast<Eigen::Index>(height) * width; }
};

/// Trainable parameter with its accumulated gradient. `shape` is the logical
/// shape written to checkpoints.
struct Param {
    std::string name;
    std::vector<int> shape;
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;

    Param() = default;
    Param(std::string n, std::vector<int> s, Eigen::Index rows, Eigen::Index cols)
        : name(std::move(n)), shape(std::move(s)), value(Eigen::MatrixXd::Zero(rows, cols)), grad(Eigen::MatrixXd::Zero(rows, cols)) {}
    Eigen::Index size() const { return value.size(); }
};

/// k x k convolution (k odd) with zero padding k/2 and stride 1.
/// The weight is stored as (cin * k * k) x cout with row index ci * k * k + ky * k + kx.
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(const std::string& name, int cin, int cout, int k);

    /// `cols` receives the im2col matrix needed by backward.
    Tensor forward(const Tensor& x, Eigen::MatrixXd* cols = nullptr) const;
    /// Accumulates parameter gradients and returns d(loss)/dx.
    Tensor backward(const Tensor& dy, const Eigen::MatrixXd& cols, int height, int width);

    int in_channels() const { return cin_; }
    int out_channels() const { return cout_; }
    int kernel_size() const { return k_; }

    Param weight;
    Param bias;

private:
    int cin_ = 0;
    int cout_ = 0;
    int k_ = 1;
};

/// y = W x + b with W stored out x in.
class Dense {
public:
    Dense() = default;
    Dense(const std::string& name, int in, int out);

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    void backward(const Eigen::VectorXd& x, const Eigen::VectorXd& dy);

    Param weight;
    Param bias;
};

Eigen::MatrixXd im2col(const Tensor& x, int k);
Tensor col2im(const Eigen::MatrixXd& cols, int channels, int height, int width, int k);

/// x * sigmoid(x), elementwise.
Tensor silu(const Tensor& x);
/// Gradient of silu given its input.
Tensor silu_backward(const Tensor& x, const Tensor& dy);

/// 2 x 2 mean pooling; height and width must be even.
Tensor avg_pool2(const Tensor& x);
Tensor avg_pool2_backward(const Tensor& dy);
/// Nearest-neighbour 2x upsampling.
Tensor upsample2(const Tensor& x);
Tensor upsample2_backward(const Tensor& dy);

Tensor concat_channels(const Tensor& a, const Tensor& b);

/// Sinusoidal embedding of time in [0, 1]: sin/cos pairs of 1000 t at
/// geometrically spaced frequencies. `dim` must be even.
Eigen::VectorXd time_embedding(double time, int dim);

}  // namespace stmforge::genmodel
