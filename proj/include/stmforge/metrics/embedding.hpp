#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>

#include "stmforge/imagecore/image.hpp"
#include "stmforge/metrics/mmd.hpp"

namespace stmforge::metrics {

using imagecore::Image;

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual Eigen::VectorXd embed(const Image& img) const = 0;
    virtual std::string id() const = 0;
    virtual int dim() const = 0;
};

inline constexpr std::uint64_t kProjectionSeed = 0x53544d45;  // "STME"

/// Maps the image to [0, 1], mean-pools it onto an 8 x 8 grid and projects the
/// 64 cell means with a fixed N(0, 1/64) random matrix drawn from
/// kProjectionSeed. Images must be at least 8 x 8.
class RandomProjectionEmbedder : public EmbeddingProvider {
public:
    explicit RandomProjectionEmbedder(std::uint64_t seed = kProjectionSeed);
    Eigen::VectorXd embed(const Image& img) const override;
    std::string id() const override;
    int dim() const override { return 64; }

private:
    std::uint64_t seed_;
    Eigen::MatrixXd projection_;
};

EmbeddingSet embed_all(const EmbeddingProvider& provider, std::span<const Image> images);

/// "STME" file: n u32, d u32, then n * d binary32 values, row by row.
void save_embeddings(const std::filesystem::path& path, const EmbeddingSet& set);
/// provider_id is set to "file:<file name>".
EmbeddingSet load_embeddings(const std::filesystem::path& path);

}  // namespace stmforge::metrics
