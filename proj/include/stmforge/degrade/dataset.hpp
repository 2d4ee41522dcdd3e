#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "stmforge/degrade/pipeline.hpp"

namespace stmforge::degrade {

struct PristineImage {
    std::string id;
    Image image;  // unit-normalized
};

/// Disjoint source subsets; each split draws only from its own subset.
struct PristineSplits {
    std::vector<PristineImage> train;
    std::vector<PristineImage> val;
    std::vector<PristineImage> test;
};

/// Splits sources in file order with 36:12:6 proportions (exactly 36/12/6 for 54 images).
PristineSplits split_pristine(std::vector<PristineImage> images);

/// Procedural stand-in for experimental scans: dimer-row lattices of varied
/// period, orientation and defect density.
std::vector<PristineImage> synthetic_pristine_set(int count, int size, std::uint64_t seed);

/// All .stmi/.pgm files of a directory in name order, unit-normalized.
std::vector<PristineImage> load_pristine_dir(const std::filesystem::path& dir);

struct SplitCounts {
    int train = 20000;
    int val = 2000;
    int test = 2000;
};

/// Samples per targeted test set.
inline constexpr int kTargetedSetSize = 1000;

struct DatasetOptions {
    DegradeConfig degrade;
    unsigned jobs = 1;
};

struct ManifestEntry {
    int index = 0;
    std::string file;
    std::string source_id;
    DegradationTrace trace;
};

struct Manifest {
    Task task = Task::restore;
    std::uint64_t seed = 0;
    std::string split;
    std::optional<TargetedDegradation> degradation;
    nlohmann::json config = nlohmann::json::object();
    std::vector<ManifestEntry> entries;
};

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest load_manifest(const std::filesystem::path& path);

nlohmann::json to_json(const DegradeConfig& cfg);

/// Sample file: two STMI blocks, ground truth then degraded.
void write_sample(const std::filesystem::path& path, const SampleRecord& rec);
std::pair<Image, Image> read_sample(const std::filesystem::path& path);

/// Per-sample child seed; independent of worker count and ordering.
std::uint64_t sample_seed(std::uint64_t dataset_seed, std::uint64_t stream, std::size_t index);

/// One sample from its child seed: picks a source uniformly, then degrades it.
SampleRecord generate_one(const std::vector<PristineImage>& sources, Task task, std::uint64_t child_seed,
                          const DegradeConfig& cfg, std::size_t* source_index = nullptr);

/// In-memory batch of samples (for training and tests).
std::vector<SampleRecord> generate_samples(const std::vector<PristineImage>& sources, Task task, std::size_t n,
                                           std::uint64_t seed, std::uint64_t stream, const DegradeConfig& cfg,
                                           unsigned jobs = 1);

/// Writes <out_dir>/{train,val,test}/ with sample files and manifest.json.
std::vector<Manifest> generate_dataset(const PristineSplits& splits, Task task, const SplitCounts& counts,
                                       std::uint64_t seed, const std::filesystem::path& out_dir,
                                       const DatasetOptions& opts = {});

/// Targeted variant of `base`: one degradation fires, parameter settings of base are kept.
DegradeConfig targeted_config(const DegradeConfig& base, TargetedDegradation degradation);

/// Random stream of a targeted set, shared by files and in-memory sets.
std::uint64_t targeted_stream(TargetedDegradation degradation);

/// n samples in which exactly one degradation type fires (plus rotate, crop,
/// normalize and, for SR tasks, resampling). lowres_only requires an SR task.
Manifest generate_targeted_set(const std::vector<PristineImage>& sources, TargetedDegradation degradation, Task task,
                               int n, std::uint64_t seed, const std::filesystem::path& out_dir,
                               const DatasetOptions& opts = {});

/// Re-executes an entry's trace on its source image.
SampleRecord replay_entry(const ManifestEntry& entry, const std::vector<PristineImage>& sources);

}  // namespace stmforge::degrade
