#pragma once

#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

namespace stmforge::metrics {

/// n embeddings of dimension d, one per row.
struct EmbeddingSet {
    Eigen::MatrixXd vectors;
    std::string provider_id;

    Eigen::Index n() const { return vectors.rows(); }
    Eigen::Index d() const { return vectors.cols(); }
};

struct LinearKernel {};
/// (gamma * x.y + coef)^degree; gamma <= 0 means 1 / d.
struct PolynomialKernel {
    int degree = 3;
    double gamma = 0.0;
    double coef = 1.0;
};
/// exp(-|x - y|^2 / sigma^2).
struct GaussianKernel {
    double sigma = 10.0;
};
using Kernel = std::variant<LinearKernel, PolynomialKernel, GaussianKernel>;

enum class Estimator { biased, unbiased };

std::string_view to_string(Estimator e);

/// Kernel matrix k(x_i, y_j).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Kernel& kernel);

/// Biased V-statistic or unbiased U-statistic (diagonals excluded from the
/// self terms). The unbiased form needs at least 2 vectors per set.
double mmd2(const EmbeddingSet& X, const EmbeddingSet& Y, const Kernel& kernel, Estimator estimator);

/// Cubic polynomial kernel ((1/d) x.y + 1)^3. With block_size > 0, the
/// unbiased estimate is averaged over consecutive blocks of that size.
double kid(const EmbeddingSet& X, const EmbeddingSet& Y, Estimator estimator = Estimator::unbiased, int block_size = 0);

/// Gaussian kernel with bandwidth sigma.
double cmmd(const EmbeddingSet& X, const EmbeddingSet& Y, double sigma = 10.0, Estimator estimator = Estimator::unbiased);

}  // namespace stmforge::metrics
