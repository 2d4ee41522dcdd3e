#pragma once

#include <cstdint>
#include <vector>

#include "stmforge/genmodel/denoiser.hpp"
#include "stmforge/genmodel/layers.hpp"

namespace stmforge::genmodel {

/// Small conditioned U-Net. Input is concat(x_t, condition); each encoder
/// level adds a projected sinusoidal time embedding after its first
/// convolution. Height and width must be multiples of 2^(levels - 1).
struct TinyDenoiserConfig {
    std::vector<int> channels{8, 16, 32};
    int time_dim = 16;
};

class TinyDenoiser : public Denoiser {
public:
    using Config = TinyDenoiserConfig;

    /// Activations kept by forward for backward.
    struct Cache;

    explicit TinyDenoiser(Config cfg = {}, std::uint64_t seed = 0);
    TinyDenoiser(const TinyDenoiser&) = default;
    TinyDenoiser(TinyDenoiser&&) = default;
    TinyDenoiser& operator=(const TinyDenoiser&) = default;
    TinyDenoiser& operator=(TinyDenoiser&&) = default;
    ~TinyDenoiser() override;

    Image predict(const Image& x, double time, const Image& condition) const override;

    /// Two-channel input to one-channel output. `cache` may be null.
    Tensor forward(const Tensor& input, double time, Cache* cache) const;
    /// Accumulates parameter gradients for d(loss)/d(output) = dout.
    void backward(const Cache& cache, const Tensor& dout);

    std::vector<Param*> parameters();
    std::vector<const Param*> parameters() const;
    std::size_t parameter_count() const;
    void zero_grad();

    const Config& config() const { return cfg_; }
    int levels() const { return static_cast<int>(cfg_.channels.size()); }
    /// Spatial sizes must be divisible by this.
    int size_multiple() const { return 1 << (levels() - 1); }

    static Tensor make_input(const Image& x, const Image& condition);

private:
    struct Level {
        Conv2d conv_a;
        Conv2d conv_b;
        Dense time;
    };
    Config cfg_;
    std::vector<Level> enc_;
    std::vector<Conv2d> dec_;  // dec_[l] merges level l+1 into level l
    Conv2d out_;
};

struct TinyDenoiser::Cache {
    double time = 0.0;
    Eigen::VectorXd temb;
    struct Enc {
        Tensor in;
        Eigen::MatrixXd cols_a, cols_b;
        Tensor pre_a, pre_b;  // before activation
    };
    struct Dec {
        Eigen::MatrixXd cols;
        Tensor pre;
    };
    std::vector<Enc> enc;
    std::vector<Dec> dec;
    Eigen::MatrixXd out_cols;
    int height = 0;
    int width = 0;
};

}  // namespace stmforge::genmodel
