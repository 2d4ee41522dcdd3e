#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "stmforge/common/binary_io.hpp"
#include "stmforge/metrics/embedding.hpp"
#include "stmforge/metrics/mmd.hpp"
#include "stmforge/metrics/reference.hpp"
#include "stmforge/metrics/report.hpp"
#include "stmforge/imagecore/transforms.hpp"
#include "support.hpp"

using namespace stmforge;
using namespace stmforge::metrics;
using imagecore::NormState;

namespace {

double oracle_psnr(const Image& a, const Image& b) {
    double se = 0;
    for (int r = 0; r < a.height(); ++r)
        for (int c = 0; c < a.width(); ++c) se += (a(r, c) - b(r, c)) * (a(r, c) - b(r, c));
    return 10 * std::log10(1.0 / (se / (a.height() * a.width())));
}

// Explicit per-window weighted moments.
double oracle_ssim_windowed(const Image& a, const Image& b) {
    double w[11][11], tot = 0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
            w[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * 1.5 * 1.5));
            tot += w[i][j];
        }
    const double c1 = 1e-4, c2 = 9e-4;
    double acc = 0;
    int count = 0;
    for (int r = 0; r + 11 <= a.height(); ++r)
        for (int c = 0; c + 11 <= a.width(); ++c) {
            double ma = 0, mb = 0;
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) {
                    ma += w[i][j] / tot * a(r + i, c + j);
                    mb += w[i][j] / tot * b(r + i, c + j);
                }
            double va = 0, vb = 0, cv = 0;
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) {
                    const double da = a(r + i, c + j) - ma, db = b(r + i, c + j) - mb;
                    va += w[i][j] / tot * da * da;
                    vb += w[i][j] / tot * db * db;
                    cv += w[i][j] / tot * da * db;
                }
            acc += ((2 * ma * mb + c1) * (2 * cv + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return acc / count;
}

EmbeddingSet random_set(int n, int d, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, scale);
    EmbeddingSet s{Eigen::MatrixXd(n, d), "test"};
    for (Eigen::Index i = 0; i < s.vectors.size(); ++i) s.vectors.data()[i] = dist(gen);
    return s;
}

template <class K>
double oracle_mmd(const EmbeddingSet& X, const EmbeddingSet& Y, K k, bool unbiased) {
    const Eigen::Index m = X.n(), n = Y.n();
    double xx = 0, yy = 0, xy = 0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (!unbiased || i != j) xx += k(X.vectors.row(i), X.vectors.row(j));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (!unbiased || i != j) yy += k(Y.vectors.row(i), Y.vectors.row(j));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) xy += k(X.vectors.row(i), Y.vectors.row(j));
    const double dm = unbiased ? m * (m - 1.0) : m * double(m), dn = unbiased ? n * (n - 1.0) : n * double(n);
    return xx / dm + yy / dn - 2 * xy / (double(m) * n);
}

}  // namespace

TEST_CASE("psnr") {
    const Image a = stmtest::constant_image(10, 10, 0.5, NormState::unit);
    const Image b = stmtest::constant_image(10, 10, 0.6, NormState::unit);
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(std::isinf(psnr(a, a)));
    CHECK(psnr(a, a) > 0);
    const Image x = stmtest::random_image(13, 17, 1), y = stmtest::random_image(13, 17, 2);
    CHECK(std::abs(psnr(x, y) - oracle_psnr(x, y)) < 1e-9);
    CHECK(psnr(x, y) == psnr(y, x));
    CHECK_THROWS_AS(psnr(x, stmtest::random_image(13, 16, 3)), std::invalid_argument);
}

TEST_CASE("ssim") {
    const Image x = stmtest::random_image(24, 20, 1), y = stmtest::random_image(24, 20, 2);
    CHECK(ssim(x, x, SsimMode::global) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ssim(x, x, SsimMode::windowed) == doctest::Approx(1.0).epsilon(1e-15));
    const Image zeros = stmtest::constant_image(16, 16, 0.0), ones = stmtest::constant_image(16, 16, 1.0);
    CHECK(ssim(zeros, ones, SsimMode::global) == doctest::Approx(1e-4 / 1.0001).epsilon(1e-12));
    CHECK(std::abs(ssim(x, y, SsimMode::windowed) - oracle_ssim_windowed(x, y)) < 1e-6);
    CHECK(std::abs(ssim(x, y) - oracle_ssim_windowed(x, y)) < 1e-6);
    for (auto mode : {SsimMode::global, SsimMode::windowed}) {
        CHECK(ssim(x, y, mode) == doctest::Approx(ssim(y, x, mode)).epsilon(1e-14));
        CHECK(ssim(x, y, mode) <= 1.0);
        CHECK(ssim(x, y, mode) >= -1.0);
    }
    CHECK_THROWS_AS(ssim(stmtest::random_image(10, 30, 1), stmtest::random_image(10, 30, 2)), std::invalid_argument);
    CHECK_THROWS_AS(ssim(x, zeros), std::invalid_argument);
    CHECK(ssim_mode_from_string("global") == SsimMode::global);
}

TEST_CASE("mmd2") {
    const auto X = random_set(20, 5, 1), Y = random_set(15, 5, 2, 1.5);
    const auto lin = [](const auto& a, const auto& b) { return a.dot(b); };
    const auto poly = [](const auto& a, const auto& b) { return std::pow(a.dot(b) / 5.0 + 1.0, 3); };
    const auto gauss = [](const auto& a, const auto& b) { return std::exp(-(a - b).squaredNorm() / 4.0); };
    for (auto est : {Estimator::biased, Estimator::unbiased}) {
        const bool u = est == Estimator::unbiased;
        CHECK(std::abs(mmd2(X, Y, LinearKernel{}, est) - oracle_mmd(X, Y, lin, u)) < 1e-9);
        CHECK(std::abs(mmd2(X, Y, PolynomialKernel{}, est) - oracle_mmd(X, Y, poly, u)) < 1e-9);
        CHECK(std::abs(mmd2(X, Y, GaussianKernel{2.0}, est) - oracle_mmd(X, Y, gauss, u)) < 1e-9);
        CHECK(mmd2(X, Y, GaussianKernel{2.0}, est) == doctest::Approx(mmd2(Y, X, GaussianKernel{2.0}, est)).epsilon(1e-12));
    }
    CHECK(std::abs(mmd2(X, X, GaussianKernel{3.0}, Estimator::biased)) < 1e-9);

    SUBCASE("single points with a linear kernel") {
        EmbeddingSet x{Eigen::MatrixXd(1, 3), "t"}, y{Eigen::MatrixXd(1, 3), "t"};
        x.vectors << 1, 2, 3;
        y.vectors << -1, 0, 4;
        // x.x + y.y - 2 x.y = |x - y|^2
        CHECK(mmd2(x, y, LinearKernel{}, Estimator::biased) == doctest::Approx(9.0).epsilon(1e-15));
        CHECK_THROWS_AS(mmd2(x, y, LinearKernel{}, Estimator::unbiased), std::invalid_argument);
    }
    SUBCASE("biased estimate is never negative") {
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto A = random_set(2 + int(s % 7), 4, 100 + s), B = random_set(3 + int(s % 5), 4, 200 + s);
            CHECK(mmd2(A, B, GaussianKernel{1.0}, Estimator::biased) >= -1e-12);
            CHECK(mmd2(A, B, PolynomialKernel{}, Estimator::biased) >= -1e-12);
        }
    }
    CHECK_THROWS_AS(mmd2(X, random_set(4, 6, 3), LinearKernel{}, Estimator::biased), std::invalid_argument);
}

TEST_CASE("kid and cmmd") {
    EmbeddingSet z{Eigen::MatrixXd::Zero(6, 4), "z"}, z2{Eigen::MatrixXd::Zero(9, 4), "z"};
    CHECK(kid(z, z2) == 0.0);
    const auto X = random_set(32, 8, 5), Y = random_set(40, 8, 6, 2.0);
    CHECK(std::abs(kid(X, X, Estimator::biased)) < 1e-9);
    CHECK(std::abs(cmmd(X, X, 10.0, Estimator::biased)) < 1e-9);
    const auto poly = [](const auto& a, const auto& b) { return std::pow(a.dot(b) / 8.0 + 1.0, 3); };
    CHECK(std::abs(kid(X, Y) - oracle_mmd(X, Y, poly, true)) < 1e-9);
    const auto gauss = [](const auto& a, const auto& b) { return std::exp(-(a - b).squaredNorm() / 100.0); };
    CHECK(std::abs(cmmd(X, Y) - oracle_mmd(X, Y, gauss, true)) < 1e-9);

    EmbeddingSet a{Eigen::MatrixXd::Zero(1, 1), "p"}, b{Eigen::MatrixXd::Constant(1, 1, 10.0), "p"};
    CHECK(cmmd(a, b, 10.0, Estimator::biased) == doctest::Approx(2 * (1 - std::exp(-1.0))).epsilon(1e-12));
    CHECK(cmmd(a, b, 10.0, Estimator::biased) == doctest::Approx(1.2642).epsilon(1e-4));

    SUBCASE("block-averaged KID") {
        double acc = 0;
        for (int blk = 0; blk < 4; ++blk) {
            EmbeddingSet xs{X.vectors.middleRows(blk * 8, 8), "t"}, ys{Y.vectors.middleRows(blk * 8, 8), "t"};
            acc += oracle_mmd(xs, ys, poly, true);
        }
        CHECK(std::abs(kid(X, Y, Estimator::unbiased, 8) - acc / 4) < 1e-9);
        CHECK_THROWS_AS(kid(X, Y, Estimator::unbiased, 100), std::invalid_argument);
    }
    SUBCASE("cmmd is rotation invariant") {
        std::mt19937_64 gen(9);
        std::normal_distribution<double> d;
        Eigen::MatrixXd m(8, 8);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(gen);
        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
        const EmbeddingSet xr{X.vectors * q, "r"}, yr{Y.vectors * q, "r"};
        CHECK(std::abs(cmmd(X, Y) - cmmd(xr, yr)) < 1e-12);
        CHECK(std::abs(cmmd(X, Y, 10.0, Estimator::biased) - cmmd(xr, yr, 10.0, Estimator::biased)) < 1e-12);
    }
}

TEST_CASE("embeddings") {
    const RandomProjectionEmbedder e;
    CHECK(e.dim() == 64);
    const Image img = stmtest::random_image(32, 24, 1, -1, 1, NormState::symmetric);
    const auto v = e.embed(img);
    CHECK(v.size() == 64);
    CHECK(v == RandomProjectionEmbedder().embed(img));
    CHECK_FALSE(v == RandomProjectionEmbedder(1).embed(img));
    CHECK_THROWS_AS(e.embed(stmtest::random_image(7, 12, 1)), std::invalid_argument);

    std::vector<Image> imgs;
    for (int i = 0; i < 5; ++i) imgs.push_back(stmtest::random_image(16, 16, 10 + i, 0, 1, NormState::unit));
    const auto set = embed_all(e, imgs);
    CHECK(set.n() == 5);
    CHECK(set.d() == 64);
    const auto dir = stmtest::temp_dir("stme");
    save_embeddings(dir / "e.stme", set);
    const auto back = load_embeddings(dir / "e.stme");
    CHECK(back.n() == 5);
    CHECK((back.vectors - set.vectors.cast<float>().cast<double>()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.provider_id == "file:e.stme");
    CHECK_THROWS_AS(load_embeddings(dir / "none.stme"), IoError);
}

TEST_CASE("evaluate_pairs") {
    const Image a = stmtest::random_image(16, 16, 1, -1, 1, NormState::symmetric);
    const Image b = stmtest::random_image(16, 16, 2, -1, 1, NormState::symmetric);
    SUBCASE("singleton") {
        const auto rep = evaluate_pairs({{"one", a, b}});
        CHECK(rep.mean_psnr == rep.rows[0].psnr);
        CHECK(rep.mean_ssim == rep.rows[0].ssim);
        CHECK(rep.median_ssim == rep.rows[0].ssim);
    }
    SUBCASE("identical pairs") {
        const auto rep = evaluate_pairs({{"x", a, a}, {"y", b, b}});
        CHECK(rep.mean_ssim == doctest::Approx(1.0));
        CHECK(std::isinf(rep.mean_psnr));
        CHECK(report_csv(rep).find("inf") != std::string::npos);
    }
    SUBCASE("100 random pairs") {
        std::vector<ImagePair> pairs;
        for (int i = 0; i < 100; ++i)
            pairs.push_back({std::to_string(i), stmtest::random_image(16, 16, 100 + i, -1, 1, NormState::symmetric),
                             stmtest::random_image(16, 16, 500 + i, -1, 1, NormState::symmetric)});
        const auto rep = evaluate_pairs(pairs, SsimMode::global);
        double mp = 0, ms = 0;
        for (const auto& p : pairs) {
            const Image u = imagecore::affine(p.ground_truth, 0.5, 0.5), v = imagecore::affine(p.prediction, 0.5, 0.5);
            mp += oracle_psnr(u, v) / 100;
            ms += ssim(u, v, SsimMode::global) / 100;
        }
        CHECK(std::abs(rep.mean_psnr - mp) < 1e-9);
        CHECK(std::abs(rep.mean_ssim - ms) < 1e-9);
        const auto csv = report_csv(rep);
        CHECK(csv.rfind("id,psnr,ssim\n", 0) == 0);
        CHECK(csv.find("median,") != std::string::npos);
    }
    CHECK_THROWS_AS(evaluate_pairs({}), std::invalid_argument);
}
