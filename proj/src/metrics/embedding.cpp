#include "stmforge/metrics/embedding.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "stmforge/common/binary_io.hpp"
#include "stmforge/common/rng.hpp"
#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::metrics {

RandomProjectionEmbedder::RandomProjectionEmbedder(std::uint64_t seed) : seed_(seed), projection_(64, 64) {
    Rng rng(seed);
    for (Eigen::Index i = 0; i < projection_.size(); ++i) projection_.data()[i] = rng.normal(0.0, 1.0 / 8.0);
}

std::string RandomProjectionEmbedder::id() const { return "randproj64:" + std::to_string(seed_); }

Eigen::VectorXd RandomProjectionEmbedder::embed(const Image& img) const {
    if (img.height() < 8 || img.width() < 8) throw std::invalid_argument("embedder needs images of at least 8 x 8");
    const Image u = imagecore::to_unit_range(img);
    Eigen::VectorXd cells = Eigen::VectorXd::Zero(64);
    for (int gr = 0; gr < 8; ++gr)
        for (int gc = 0; gc < 8; ++gc) {
            const int r0 = gr * u.height() / 8, r1 = (gr + 1) * u.height() / 8;
            const int c0 = gc * u.width() / 8, c1 = (gc + 1) * u.width() / 8;
            double acc = 0.0;
            for (int r = r0; r < r1; ++r)
                for (int c = c0; c < c1; ++c) acc += u(r, c);
            cells[gr * 8 + gc] = acc / static_cast<double>((r1 - r0) * (c1 - c0));
        }
    return projection_ * cells;
}

EmbeddingSet embed_all(const EmbeddingProvider& provider, std::span<const Image> images) {
    EmbeddingSet set{Eigen::MatrixXd(static_cast<Eigen::Index>(images.size()), provider.dim()), provider.id()};
    for (std::size_t i = 0; i < images.size(); ++i) set.vectors.row(static_cast<Eigen::Index>(i)) = provider.embed(images[i]).transpose();
    return set;
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingSet& set) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    write_magic(os, "STME");
    write_u32(os, static_cast<std::uint32_t>(set.n()));
    write_u32(os, static_cast<std::uint32_t>(set.d()));
    for (Eigen::Index i = 0; i < set.n(); ++i)
        for (Eigen::Index j = 0; j < set.d(); ++j) write_f32(os, static_cast<float>(set.vectors(i, j)));
    if (!os) throw IoError("write failed: " + path.string());
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read " + path.string());
    expect_magic(is, "STME");
    const auto n = read_u32(is);
    const auto d = read_u32(is);
    if (static_cast<std::uint64_t>(n) * d > (std::uint64_t{1} << 30)) throw IoError("implausible embedding file size");
    EmbeddingSet set{Eigen::MatrixXd(n, d), "file:" + path.filename().string()};
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < d; ++j) {
            const float v = read_f32(is);
            if (!std::isfinite(v)) throw IoError("non-finite value in embedding file");
            set.vectors(i, j) = v;
        }
    return set;
}

}  // namespace stmforge::metrics
