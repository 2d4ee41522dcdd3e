#include <sstream>

#include "doctest.h"
#include "stmforge/imagecore/fft.hpp"
#include "stmforge/imagecore/filters.hpp"
#include "stmforge/imagecore/io.hpp"
#include "stmforge/imagecore/lattice.hpp"
#include "stmforge/imagecore/transforms.hpp"
#include "support.hpp"

using namespace stmforge::imagecore;
using stmtest::from_rows;
using stmtest::max_abs_diff;
using stmtest::random_image;

TEST_CASE("image invariants are enforced") {
    CHECK_THROWS_AS(Image(2, 2, std::vector<double>(3, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(Image(1, 1, std::vector<double>{1.5}, NormState::unit), std::invalid_argument);
    CHECK_THROWS_AS(Image(1, 1, std::vector<double>{-1.5}, NormState::symmetric), std::invalid_argument);
    CHECK_THROWS_AS(Image(1, 1, std::vector<double>{std::nan("")}), std::invalid_argument);
    CHECK_NOTHROW(Image(1, 2, std::vector<double>{-1.0, 1.0}, NormState::symmetric));
}

TEST_CASE("normalize_unit") {
    SUBCASE("affine map") {
        const Image out = normalize_unit(from_rows({{0, 2}, {4, 2}}));
        CHECK(out == from_rows({{0, 0.5}, {1, 0.5}}, NormState::unit));
    }
    SUBCASE("already unit range is unchanged") {
        const Image img = from_rows({{0, 0.25}, {1, 0.75}});
        CHECK(normalize_unit(img).pixels()[1] == 0.25);
        CHECK(max_abs_diff(normalize_unit(img), img) == 0.0);
    }
    SUBCASE("random image against scalar loop") {
        const Image img = random_image(8, 8, 11, -3.0, 5.0);
        double mn = img(0, 0), mx = img(0, 0);
        for (double v : img.pixels()) mn = std::min(mn, v), mx = std::max(mx, v);
        const Image out = normalize_unit(img);
        CHECK(out.min() == 0.0);
        CHECK(out.max() == 1.0);
        for (std::size_t i = 0; i < img.size(); ++i) {
            CHECK(out.pixels()[i] == doctest::Approx((img.pixels()[i] - mn) / (mx - mn)).epsilon(1e-12));
            for (std::size_t j = 0; j < img.size(); ++j)
                if (img.pixels()[i] < img.pixels()[j]) CHECK(out.pixels()[i] <= out.pixels()[j]);
        }
        CHECK(max_abs_diff(normalize_unit(out), out) == 0.0);
    }
    SUBCASE("constant image is degenerate") {
        CHECK_THROWS_WITH_AS(normalize_unit(stmtest::constant_image(3, 3, 2.0)), "degenerate dynamic range",
                             std::invalid_argument);
    }
}

TEST_CASE("normalize_sym") {
    CHECK(normalize_sym(from_rows({{0, 0.5, 1}})) == from_rows({{-1, 0, 1}}, NormState::symmetric));
    const Image unit = random_image(6, 6, 3);
    const Image sym = normalize_sym(normalize_unit(unit));
    const Image u = normalize_unit(unit);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(sym.pixels()[i] == doctest::Approx(2 * u.pixels()[i] - 1).epsilon(1e-12));
    CHECK(sym.min() == -1.0);
    CHECK(sym.max() == 1.0);
    CHECK_THROWS_AS(normalize_sym(stmtest::constant_image(2, 2, 0.0)), std::invalid_argument);
}

TEST_CASE("rotate_quarter") {
    const Image img = from_rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(rotate_quarter(img, 0) == img);
    const Image r1 = rotate_quarter(img, 1);
    REQUIRE(r1.height() == 3);
    REQUIRE(r1.width() == 2);
    CHECK(r1(0, 1) == img(0, 0));
    // Index permutation oracle: (r, c) -> (c, h - 1 - r).
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c) CHECK(r1(c, 1 - r) == img(r, c));
    CHECK(rotate_quarter(rotate_quarter(img, 1), 3) == img);
    const Image sq = random_image(7, 7, 5);
    Image cur = sq;
    for (int i = 0; i < 4; ++i) cur = rotate_quarter(cur, 1);
    CHECK(cur == sq);
    CHECK(rotate_quarter(sq, 2) == rotate_quarter(rotate_quarter(sq, 1), 1));
    CHECK(rotate_quarter(sq, -1) == rotate_quarter(sq, 3));
}

TEST_CASE("crop") {
    const Image big = random_image(512, 512, 9);
    CHECK(crop(big, 0, 0, 512, 512) == big);
    const Image tl = crop(big, 0, 0, 128, 128);
    CHECK(tl(127, 127) == big(127, 127));
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 20; ++trial) {
        const int top = static_cast<int>(gen() % 300), left = static_cast<int>(gen() % 300);
        const int h = 1 + static_cast<int>(gen() % 200), w = 1 + static_cast<int>(gen() % 200);
        const Image c = crop(big, top, left, h, w);
        for (int i = 0; i < h; i += 7)
            for (int j = 0; j < w; j += 5) CHECK(c(i, j) == big(top + i, left + j));
    }
    CHECK_THROWS_AS(crop(big, 400, 0, 128, 128), std::out_of_range);
    CHECK_THROWS_AS(crop(big, -1, 0, 1, 1), std::out_of_range);
}

TEST_CASE("gaussian_blur") {
    CHECK(max_abs_diff(gaussian_blur(stmtest::constant_image(9, 9, 0.3), 1.7), stmtest::constant_image(9, 9, 0.3)) < 1e-15);

    Image impulse = stmtest::constant_image(21, 21, 0.0);
    {
        std::vector<double> px(impulse.pixels().begin(), impulse.pixels().end());
        px[10 * 21 + 10] = 1.0;
        impulse = Image(21, 21, std::move(px));
    }
    const Image b = gaussian_blur(impulse, 1.0);
    // Direct kernel evaluation: radius ceil(3 * 1) = 3.
    double norm = 0.0;
    for (int i = -3; i <= 3; ++i) norm += std::exp(-0.5 * i * i);
    CHECK(b(10, 10) == doctest::Approx(1.0 / (norm * norm)).epsilon(1e-12));
    CHECK(b(10, 12) == doctest::Approx(std::exp(-2.0) / (norm * norm)).epsilon(1e-12));
    CHECK(b(10, 14) == 0.0);
    double total = 0.0;
    for (double v : b.pixels()) total += v;
    CHECK(std::abs(total - 1.0) < 1e-9);

    CHECK_THROWS_AS(gaussian_blur(impulse, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_blur(impulse, -1.0), std::invalid_argument);

    const Image sq = random_image(16, 16, 77);
    for (int t = 1; t < 4; ++t)
        CHECK(max_abs_diff(gaussian_blur(rotate_quarter(sq, t), 1.3), rotate_quarter(gaussian_blur(sq, 1.3), t)) < 1e-9);
}

namespace {

Image median_oracle(const Image& img, int k) {
    std::vector<double> out;
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            std::vector<double> nb;
            for (int dr = -k / 2; dr <= k / 2; ++dr)
                for (int dc = -k / 2; dc <= k / 2; ++dc)
                    nb.push_back(img(std::clamp(r + dr, 0, img.height() - 1), std::clamp(c + dc, 0, img.width() - 1)));
            std::sort(nb.begin(), nb.end());
            out.push_back(nb[nb.size() / 2]);
        }
    return Image(img.height(), img.width(), out);
}

}  // namespace

TEST_CASE("median_filter") {
    const Image img = random_image(8, 8, 21);
    CHECK(median_filter(img, 1) == img);
    CHECK(median_filter(img, 3) == median_oracle(img, 3));
    CHECK(median_filter(img, 5) == median_oracle(img, 5));

    std::vector<double> px(25, 0.2);
    px[12] = 1.0;
    const Image salt = median_filter(Image(5, 5, px), 3);
    CHECK(salt(2, 2) == 0.2);

    CHECK_THROWS_AS(median_filter(img, 2), std::invalid_argument);
    CHECK_THROWS_AS(median_filter(img, 0), std::invalid_argument);

    for (int t = 1; t < 4; ++t) CHECK(median_filter(rotate_quarter(img, t), 3) == rotate_quarter(median_filter(img, 3), t));
}

TEST_CASE("convolve") {
    const Image img = random_image(12, 10, 4);
    CHECK(convolve(img, Kernel::identity()) == img);
    const Kernel box = Kernel::centered(3, std::vector<double>(9, 1.0 / 9.0));
    CHECK(max_abs_diff(convolve(stmtest::constant_image(6, 6, 0.7), box), stmtest::constant_image(6, 6, 0.7)) < 1e-15);

    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> dist(-0.5, 1.0);
    std::vector<double> w(25);
    for (double& v : w) v = dist(gen);
    const Kernel k{5, w, 1, 3};
    const Image out = convolve(img, k);
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            double acc = 0.0;
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    acc += w[static_cast<std::size_t>(i * 5 + j)] *
                           img(std::clamp(r + i - 1, 0, img.height() - 1), std::clamp(c + j - 3, 0, img.width() - 1));
            CHECK(std::abs(out(r, c) - acc) < 1e-9);
        }
    CHECK(Kernel::centered(6, std::vector<double>(36, 1.0)).anchor_row == 2);
    CHECK_THROWS_AS((Kernel{3, std::vector<double>(9, 0.0), 3, 0}.validate()), std::invalid_argument);
}

TEST_CASE("shift") {
    const Image img = random_image(9, 9, 13);
    CHECK(shift(img, 0, 0) == img);
    CHECK(shift(from_rows({{1, 2, 3}}), 1, 0) == from_rows({{1, 1, 2}}));
    const Image back = shift(shift(img, 2, -3), -2, 3);
    for (int r = 3; r < 6; ++r)
        for (int c = 2; c < 7; ++c) CHECK(back(r, c) == img(r, c));
    CHECK_THROWS_AS(shift(img, 9, 0), std::invalid_argument);
}

TEST_CASE("resample_y") {
    const Image blocks = from_rows({{1, 2}, {1, 2}, {3, 4}, {3, 4}});
    CHECK(resample_y(resample_y(blocks, 2, ResampleDirection::down), 2, ResampleDirection::up_nearest) == blocks);
    const Image four = from_rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
    CHECK(resample_y(four, 2, ResampleDirection::down) == from_rows({{0, 0}, {2, 2}}));

    const Image img = random_image(16, 5, 3);
    for (int f : {2, 4}) {
        const Image rt = resample_y(resample_y(img, f, ResampleDirection::down), f, ResampleDirection::up_nearest);
        for (int r = 0; r < 16; ++r)
            for (int c = 0; c < 5; ++c) {
                CHECK(rt(r, c) == img(r - r % f, c));
                if (r % f == 0) CHECK(rt(r, c) == img(r, c));
            }
    }
    CHECK_THROWS_AS(resample_y(random_image(6, 2, 1), 4, ResampleDirection::down), std::invalid_argument);
    CHECK_THROWS_AS(resample_y(img, 3, ResampleDirection::down), std::invalid_argument);
}

TEST_CASE("fft2") {
    const auto [mag, phase] = fft2_mag_phase(stmtest::constant_image(8, 8, 0.5));
    CHECK(mag(0, 0) == doctest::Approx(0.5 * 64));
    double rest = 0.0;
    for (std::size_t i = 1; i < mag.size(); ++i) rest = std::max(rest, mag.pixels()[i]);
    CHECK(rest < 1e-12);

    // cos(2 pi * 3 n / 16) along columns -> bins (0, 3) and (0, 13) of magnitude N^2 / 2.
    std::vector<double> px;
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) px.push_back(std::cos(2 * std::numbers::pi * 3 * c / 16.0));
    const auto [cm, cp] = fft2_mag_phase(Image(16, 16, px));
    CHECK(cm(0, 3) == doctest::Approx(128.0));
    CHECK(cm(0, 13) == doctest::Approx(128.0));
    int nonzero = 0;
    for (double v : cm.pixels()) nonzero += v > 1e-9;
    CHECK(nonzero == 2);

    for (int n : {8, 13, 32, 64}) {
        const Image img = stmtest::gaussian_image(n, n, static_cast<std::uint64_t>(n));
        const auto naive = stmtest::naive_dft2(img);
        const Spectrum s = fft2(img);
        double energy = 0.0, spec = 0.0, worst = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < naive.size(); ++i) {
            energy += img.pixels()[i] * img.pixels()[i];
            spec += std::norm(s.bins[i]);
            worst = std::max(worst, std::abs(s.bins[i] - naive[i]));
            scale = std::max(scale, std::abs(naive[i]));
        }
        CHECK(std::abs(energy - spec / (n * n)) / energy < 1e-9);
        CHECK(worst / scale < 1e-9);
    }
    const auto [m2, p2] = fft2_mag_phase(random_image(9, 7, 2));
    for (double v : p2.pixels()) {
        CHECK(v > -std::numbers::pi);
        CHECK(v <= std::numbers::pi);
    }
    CHECK(wrap_phase(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrap_phase(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
}

TEST_CASE("synth_lattice") {
    const Image clean = synth_lattice(64, 48, 8.0, RowOrientation::horizontal, 0.0, 42);
    for (int r = 0; r + 8 < 64; ++r)
        for (int c = 0; c < 48; ++c) CHECK(std::abs(clean(r + 8, c) - clean(r, c)) < 1e-12);
    CHECK(clean.norm_state() == NormState::unit);
    CHECK(synth_lattice(32, 32, 6.5, RowOrientation::vertical, 0.02, 7) ==
          synth_lattice(32, 32, 6.5, RowOrientation::vertical, 0.02, 7));
    CHECK_FALSE(synth_lattice(32, 32, 6.5, RowOrientation::vertical, 0.02, 7) ==
                synth_lattice(32, 32, 6.5, RowOrientation::vertical, 0.02, 8));

    const auto surf = synth_lattice_surface(128, 128, 7.0, RowOrientation::horizontal, 0.01, 99);
    CHECK(stmtest::within_3sigma(surf.defects.size(), 128 * 128, 0.01));
    CHECK_THROWS_AS(synth_lattice(8, 8, 1.5, RowOrientation::horizontal, 0.0, 1), std::invalid_argument);
}

TEST_CASE("STMI and PGM files") {
    const Image img = normalize_sym(random_image(5, 7, 31));
    std::stringstream ss;
    write_stmi(ss, img);
    CHECK(ss.str().size() == 4 + 1 + 4 + 4 + 1 + 35 * 4);
    CHECK(ss.str().substr(0, 4) == "STMI");
    CHECK(static_cast<unsigned char>(ss.str()[5]) == 5);  // height, little-endian
    const Image back = read_stmi(ss);
    CHECK(back.norm_state() == NormState::symmetric);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(back.pixels()[i] == static_cast<float>(img.pixels()[i]));

    std::stringstream bad("STMX\x01");
    CHECK_THROWS_AS(read_stmi(bad), stmforge::IoError);
    std::stringstream truncated(ss.str().substr(0, 20));
    CHECK_THROWS_AS(read_stmi(truncated), stmforge::IoError);

    const auto dir = stmtest::temp_dir("imagecore_io");
    const Image unit = normalize_unit(random_image(6, 9, 4));
    save_pgm16(dir / "a.pgm", unit);
    const Image pgm = load_pgm(dir / "a.pgm");
    CHECK(pgm.height() == 6);
    CHECK(pgm.width() == 9);
    CHECK(max_abs_diff(pgm, unit) <= 0.5 / 65535.0 + 1e-12);
    save_stmi(dir / "a.stmi", unit);
    CHECK(load_image(dir / "a.stmi").size() == unit.size());
    CHECK_THROWS_AS(load_stmi(dir / "missing.stmi"), stmforge::IoError);
}
