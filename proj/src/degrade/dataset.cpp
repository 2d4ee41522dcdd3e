#include "stmforge/degrade/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "stmforge/common/binary_io.hpp"
#include "stmforge/common/parallel.hpp"
#include "stmforge/imagecore/io.hpp"
#include "stmforge/imagecore/lattice.hpp"
#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::degrade {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kValStream = 2;
constexpr std::uint64_t kTestStream = 3;
constexpr std::uint64_t kTargetedStream = 100;

std::string sample_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "sample_%06zu.stmi", index);
    return buf;
}

}  // namespace

PristineSplits split_pristine(std::vector<PristineImage> images) {
    const std::size_t n = images.size();
    if (n < 3) throw std::invalid_argument("need at least 3 pristine images to form three splits");
    // 36:12:6 = 6:2:1
    std::size_t n_val = std::max<std::size_t>(1, (n * 12 + 27) / 54);
    std::size_t n_test = std::max<std::size_t>(1, (n * 6 + 27) / 54);
    if (n_val + n_test >= n) n_val = n_test = 1;
    const std::size_t n_train = n - n_val - n_test;

    PristineSplits s;
    auto it = std::make_move_iterator(images.begin());
    s.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
    s.val.assign(it + static_cast<std::ptrdiff_t>(n_train), it + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(it + static_cast<std::ptrdiff_t>(n_train + n_val), std::make_move_iterator(images.end()));
    return s;
}

std::vector<PristineImage> synthetic_pristine_set(int count, int size, std::uint64_t seed) {
    if (count <= 0 || size <= 0) throw std::invalid_argument("count and size must be positive");
    std::vector<PristineImage> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const double period = rng.uniform(5.0, 12.0);
        const auto orient = rng.bernoulli(0.5) ? imagecore::RowOrientation::horizontal : imagecore::RowOrientation::vertical;
        const double density = rng.uniform(0.0, 0.002);
        char id[32];
        std::snprintf(id, sizeof id, "synthetic_%03d", i);
        out.push_back({id, imagecore::synth_lattice(size, size, period, orient, density, rng.next_u64())});
    }
    return out;
}

std::vector<PristineImage> load_pristine_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto ext = e.path().extension().string();
        if (ext == ".stmi" || ext == ".pgm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<PristineImage> out;
    for (const auto& f : files)
        out.push_back({f.stem().string(), imagecore::normalize_unit(imagecore::load_image(f))});
    if (out.empty()) throw IoError("no .stmi or .pgm images in " + dir.string());
    return out;
}

json to_json(const DegradeConfig& cfg) {
    return {{"crop_size", cfg.crop_size},
            {"multitip_prob", cfg.multitip_prob},
            {"misalign_prob", cfg.misalign_prob},
            {"blunt_prob", cfg.blunt_prob},
            {"tipchange_prob", cfg.tipchange_prob},
            {"scanline_prob", cfg.scanline_prob},
            {"misalign_sigma", cfg.misalign_sigma},
            {"tipchange_offset_prob", cfg.tipchange_offset_prob},
            {"tip_count_weights", cfg.tip_count_weights},
            {"scanline_min_lines", cfg.scanline.min_lines},
            {"scanline_max_lines", cfg.scanline.max_lines},
            {"scanline_max_length_fraction", cfg.scanline.max_length_fraction},
            {"perturbation_weights", cfg.scanline.perturbation_weights}};
}

json to_json(const Manifest& m) {
    json j;
    j["task"] = std::string(to_string(m.task));
    j["seed"] = m.seed;
    j["split"] = m.split;
    if (m.degradation) j["degradation"] = std::string(to_string(*m.degradation));
    j["config"] = m.config;
    json entries = json::array();
    for (const auto& e : m.entries)
        entries.push_back({{"index", e.index}, {"file", e.file}, {"source_id", e.source_id}, {"trace", to_json(e.trace)}});
    j["entries"] = std::move(entries);
    return j;
}

Manifest manifest_from_json(const json& j) {
    Manifest m;
    m.task = task_from_string(j.at("task").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.split = j.at("split").get<std::string>();
    if (j.contains("degradation")) m.degradation = targeted_from_string(j.at("degradation").get<std::string>());
    if (j.contains("config")) m.config = j.at("config");
    for (const auto& e : j.at("entries"))
        m.entries.push_back({e.at("index").get<int>(), e.at("file").get<std::string>(), e.at("source_id").get<std::string>(),
                             trace_from_json(e.at("trace"))});
    return m;
}

void save_manifest(const fs::path& path, const Manifest& m) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << to_json(m).dump(1) << '\n';
    if (!os) throw IoError("write failed: " + path.string());
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw IoError("malformed manifest " + path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

void write_sample(const fs::path& path, const SampleRecord& rec) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    imagecore::write_stmi(os, rec.ground_truth);
    imagecore::write_stmi(os, rec.degraded);
    if (!os) throw IoError("write failed: " + path.string());
}

std::pair<Image, Image> read_sample(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read " + path.string());
    Image gt = imagecore::read_stmi(is);
    Image deg = imagecore::read_stmi(is);
    return {std::move(gt), std::move(deg)};
}

std::uint64_t sample_seed(std::uint64_t dataset_seed, std::uint64_t stream, std::size_t index) {
    return derive_seed(derive_seed(dataset_seed, stream), static_cast<std::uint64_t>(index));
}

SampleRecord generate_one(const std::vector<PristineImage>& sources, Task task, std::uint64_t child_seed,
                          const DegradeConfig& cfg, std::size_t* source_index) {
    if (sources.empty()) throw std::invalid_argument("no source images");
    Rng rng(child_seed);
    const auto k = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(sources.size()) - 1));
    if (source_index) *source_index = k;
    return degrade_sample(sources[k].image, task, rng, cfg);
}

std::vector<SampleRecord> generate_samples(const std::vector<PristineImage>& sources, Task task, std::size_t n,
                                           std::uint64_t seed, std::uint64_t stream, const DegradeConfig& cfg,
                                           unsigned jobs) {
    std::vector<SampleRecord> out(n);
    parallel_for(n, jobs, [&](std::size_t i) { out[i] = generate_one(sources, task, sample_seed(seed, stream, i), cfg); });
    return out;
}

namespace {

Manifest write_split(const std::vector<PristineImage>& sources, Task task, std::size_t n, std::uint64_t seed,
                     std::uint64_t stream, const std::string& split, const fs::path& dir, const DatasetOptions& opts) {
    fs::create_directories(dir);
    Manifest m;
    m.task = task;
    m.seed = seed;
    m.split = split;
    m.config = to_json(opts.degrade);
    m.entries.resize(n);
    parallel_for(n, opts.jobs, [&](std::size_t i) {
        std::size_t src = 0;
        SampleRecord rec = generate_one(sources, task, sample_seed(seed, stream, i), opts.degrade, &src);
        const std::string file = sample_name(i);
        write_sample(dir / file, rec);
        m.entries[i] = {static_cast<int>(i), file, sources[src].id, std::move(rec.trace)};
    });
    return m;
}

}  // namespace

std::vector<Manifest> generate_dataset(const PristineSplits& splits, Task task, const SplitCounts& counts,
                                       std::uint64_t seed, const fs::path& out_dir, const DatasetOptions& opts) {
    if (counts.train < 0 || counts.val < 0 || counts.test < 0) throw std::invalid_argument("split counts must be non-negative");
    const struct {
        const char* name;
        const std::vector<PristineImage>* sources;
        int count;
        std::uint64_t stream;
    } plan[] = {{"train", &splits.train, counts.train, kTrainStream},
                {"val", &splits.val, counts.val, kValStream},
                {"test", &splits.test, counts.test, kTestStream}};
    std::vector<Manifest> out;
    for (const auto& p : plan) {
        const fs::path dir = out_dir / p.name;
        Manifest m = write_split(*p.sources, task, static_cast<std::size_t>(p.count), seed, p.stream, p.name, dir, opts);
        save_manifest(dir / "manifest.json", m);
        out.push_back(std::move(m));
    }
    return out;
}

DegradeConfig targeted_config(const DegradeConfig& base, TargetedDegradation degradation) {
    DegradeConfig c = DegradeConfig::targeted(degradation, base.crop_size);
    c.misalign_sigma = base.misalign_sigma;
    c.tipchange_offset_prob = base.tipchange_offset_prob;
    c.tip_count_weights = base.tip_count_weights;
    c.scanline = base.scanline;
    return c;
}

std::uint64_t targeted_stream(TargetedDegradation degradation) {
    return kTargetedStream + static_cast<std::uint64_t>(degradation);
}

Manifest generate_targeted_set(const std::vector<PristineImage>& sources, TargetedDegradation degradation, Task task,
                               int n, std::uint64_t seed, const fs::path& out_dir, const DatasetOptions& opts) {
    if (degradation == TargetedDegradation::lowres_only && task == Task::restore)
        throw std::invalid_argument("lowres_only needs an sr2 or sr4 task");
    if (n < 0) throw std::invalid_argument("sample count must be non-negative");
    DatasetOptions o = opts;
    o.degrade = targeted_config(opts.degrade, degradation);
    Manifest m = write_split(sources, task, static_cast<std::size_t>(n), seed, targeted_stream(degradation), "targeted",
                             out_dir, o);
    m.degradation = degradation;
    save_manifest(out_dir / "manifest.json", m);
    return m;
}

SampleRecord replay_entry(const ManifestEntry& entry, const std::vector<PristineImage>& sources) {
    for (const auto& s : sources)
        if (s.id == entry.source_id) return execute_trace(s.image, entry.trace);
    throw std::invalid_argument("unknown source image: " + entry.source_id);
}

}  // namespace stmforge::degrade
