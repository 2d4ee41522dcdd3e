#include "stmforge/metrics/mmd.hpp"

#include <cmath>
#include <stdexcept>

namespace stmforge::metrics {

std::string_view to_string(Estimator e) { return e == Estimator::biased ? "biased" : "unbiased"; }

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Kernel& kernel) {
    if (X.cols() != Y.cols()) throw std::invalid_argument("embedding dimensions differ");
    const Eigen::MatrixXd dots = X * Y.transpose();
    return std::visit(
        [&](const auto& k) -> Eigen::MatrixXd {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, LinearKernel>) {
                return dots;
            } else if constexpr (std::is_same_v<K, PolynomialKernel>) {
                const double gamma = k.gamma > 0.0 ? k.gamma : 1.0 / static_cast<double>(std::max<Eigen::Index>(X.cols(), 1));
                return dots.unaryExpr([&](double v) { return std::pow(gamma * v + k.coef, k.degree); });
            } else {
                if (!(k.sigma > 0.0)) throw std::invalid_argument("Gaussian kernel bandwidth must be positive");
                const Eigen::VectorXd nx = X.rowwise().squaredNorm();
                const Eigen::VectorXd ny = Y.rowwise().squaredNorm();
                Eigen::MatrixXd d2 = (-2.0 * dots).colwise() + nx;
                d2.rowwise() += ny.transpose();
                return d2.unaryExpr([&](double v) { return std::exp(-std::max(v, 0.0) / (k.sigma * k.sigma)); });
            }
        },
        kernel);
}

double mmd2(const EmbeddingSet& X, const EmbeddingSet& Y, const Kernel& kernel, Estimator estimator) {
    if (X.d() != Y.d()) throw std::invalid_argument("embedding dimensions differ");
    const double m = static_cast<double>(X.n()), n = static_cast<double>(Y.n());
    if (estimator == Estimator::unbiased && (X.n() < 2 || Y.n() < 2))
        throw std::invalid_argument("unbiased MMD needs at least 2 vectors per set");
    if (X.n() < 1 || Y.n() < 1) throw std::invalid_argument("MMD needs nonempty sets");
    const Eigen::MatrixXd kxx = kernel_matrix(X.vectors, X.vectors, kernel);
    const Eigen::MatrixXd kyy = kernel_matrix(Y.vectors, Y.vectors, kernel);
    const Eigen::MatrixXd kxy = kernel_matrix(X.vectors, Y.vectors, kernel);
    if (estimator == Estimator::biased) return kxx.sum() / (m * m) + kyy.sum() / (n * n) - 2.0 * kxy.sum() / (m * n);
    return (kxx.sum() - kxx.trace()) / (m * (m - 1)) + (kyy.sum() - kyy.trace()) / (n * (n - 1)) - 2.0 * kxy.sum() / (m * n);
}

double kid(const EmbeddingSet& X, const EmbeddingSet& Y, Estimator estimator, int block_size) {
    const PolynomialKernel k{3, 0.0, 1.0};
    if (block_size <= 0) return mmd2(X, Y, k, estimator);
    const Eigen::Index blocks = std::min(X.n(), Y.n()) / block_size;
    if (blocks < 1) throw std::invalid_argument("KID block size larger than the sets");
    double acc = 0.0;
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const EmbeddingSet xs{X.vectors.middleRows(b * block_size, block_size), X.provider_id};
        const EmbeddingSet ys{Y.vectors.middleRows(b * block_size, block_size), Y.provider_id};
        acc += mmd2(xs, ys, k, estimator);
    }
    return acc / static_cast<double>(blocks);
}

double cmmd(const EmbeddingSet& X, const EmbeddingSet& Y, double sigma, Estimator estimator) {
    return mmd2(X, Y, GaussianKernel{sigma}, estimator);
}

}  // namespace stmforge::metrics
