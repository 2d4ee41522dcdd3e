#include "stmforge/genmodel/checkpoint.hpp"

#include <fstream>
#include <map>
#include <string>

#include "stmforge/common/binary_io.hpp"

namespace stmforge::genmodel {

namespace {

// Rank-2 parameters are stored out x in in memory (column-major); all others
// already have the logical row-major order in memory.
template <class F>
void for_each_logical(const Param& p, F&& f) {
    if (p.shape.size() == 2) {
        for (Eigen::Index r = 0; r < p.value.rows(); ++r)
            for (Eigen::Index c = 0; c < p.value.cols(); ++c) f(r, c);
    } else {
        for (Eigen::Index i = 0; i < p.value.size(); ++i) f(i % p.value.rows(), i / p.value.rows());
    }
}

struct RawParam {
    std::vector<int> shape;
    std::vector<float> values;
};

}  // namespace

void write_checkpoint(std::ostream& os, const TinyDenoiser& model) {
    const auto params = model.parameters();
    write_magic(os, "STMW");
    write_u8(os, kCheckpointVersion);
    write_u32(os, static_cast<std::uint32_t>(params.size()));
    for (const Param* p : params) {
        write_u16(os, static_cast<std::uint16_t>(p->name.size()));
        os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
        write_u8(os, static_cast<std::uint8_t>(p->shape.size()));
        for (int d : p->shape) write_u32(os, static_cast<std::uint32_t>(d));
        for_each_logical(*p, [&](Eigen::Index r, Eigen::Index c) { write_f32(os, static_cast<float>(p->value(r, c))); });
    }
    if (!os) throw IoError("checkpoint write failed");
}

TinyDenoiser read_checkpoint(std::istream& is) {
    expect_magic(is, "STMW");
    const auto version = read_u8(is);
    if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
    const auto count = read_u32(is);
    if (count > 10000) throw IoError("implausible parameter count in checkpoint");
    std::map<std::string, RawParam> raw;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = read_bytes(is, read_u16(is));
        const auto rank = read_u8(is);
        RawParam p;
        std::size_t n = 1;
        for (int d = 0; d < rank; ++d) {
            p.shape.push_back(static_cast<int>(read_u32(is)));
            n *= static_cast<std::size_t>(p.shape.back());
        }
        if (n > (std::size_t{1} << 28)) throw IoError("implausible tensor size in checkpoint");
        p.values.resize(n);
        for (float& v : p.values) v = read_f32(is);
        if (!raw.emplace(name, std::move(p)).second) throw IoError("duplicate parameter " + name);
    }

    TinyDenoiser::Config cfg;
    cfg.channels.clear();
    for (int l = 0;; ++l) {
        auto it = raw.find("enc" + std::to_string(l) + ".conv_a.bias");
        if (it == raw.end()) break;
        if (it->second.shape.size() != 1) throw IoError("bad bias shape in checkpoint");
        cfg.channels.push_back(it->second.shape[0]);
    }
    auto t = raw.find("enc0.time.weight");
    if (cfg.channels.empty() || t == raw.end() || t->second.shape.size() != 2) throw IoError("checkpoint does not describe a TinyDenoiser");
    cfg.time_dim = t->second.shape[1];

    TinyDenoiser model;
    try {
        model = TinyDenoiser(cfg, 0);
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("invalid architecture in checkpoint: ") + e.what());
    }
    auto params = model.parameters();
    if (params.size() != raw.size()) throw IoError("checkpoint has unexpected parameters");
    for (Param* p : params) {
        auto it = raw.find(p->name);
        if (it == raw.end()) throw IoError("checkpoint lacks parameter " + p->name);
        if (it->second.shape != p->shape) throw IoError("shape mismatch for " + p->name);
        std::size_t k = 0;
        for_each_logical(*p, [&](Eigen::Index r, Eigen::Index c) { p->value(r, c) = it->second.values[k++]; });
    }
    return model;
}

void save_checkpoint(const std::filesystem::path& path, const TinyDenoiser& model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    write_checkpoint(os, model);
}

TinyDenoiser load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read " + path.string());
    return read_checkpoint(is);
}

}  // namespace stmforge::genmodel
