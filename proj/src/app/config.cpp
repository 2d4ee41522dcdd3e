#include "stmforge/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <sstream>

#include "stmforge/app/stamp.hpp"
#include "stmforge/common/binary_io.hpp"

namespace stmforge::app {

namespace {

using K = ValueKind;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// TOML-ish spellings: "text" and [1, 2, 3].
std::string unwrap(std::string v) {
    v = trim(v);
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '[' && v.back() == ']')))
        v = trim(std::string_view(v).substr(1, v.size() - 2));
    return v;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    if (s.empty()) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

template <class T>
std::vector<T> parse_list(std::string_view s, const char* what) {
    std::vector<T> out;
    const std::string body = unwrap(std::string(s));
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        T v{};
        if (!parse_number(trim(item), v)) throw ConfigError(std::string("expected a list of ") + what + ", got '" + body + "'");
        out.push_back(v);
    }
    return out;
}

const ConfigKey* find_key(const std::string& name) {
    for (const auto& k : config_schema())
        if (k.name == name) return &k;
    return nullptr;
}

void check_value(const ConfigKey& key, const std::string& v) {
    const auto bad = [&](const char* what) {
        return ConfigError("config key " + std::string(key.name) + " expects " + what + ", got '" + v + "'");
    };
    switch (key.kind) {
        case K::text:
            break;
        case K::integer: {
            long long x;
            if (!parse_number(std::string_view(v), x)) throw bad("an integer");
            break;
        }
        case K::unsigned_integer: {
            std::uint64_t x;
            if (!parse_number(std::string_view(v), x)) throw bad("a non-negative integer");
            break;
        }
        case K::real: {
            double x;
            if (!parse_number(std::string_view(v), x)) throw bad("a number");
            break;
        }
        case K::int_list:
            parse_int_list(v);
            break;
        case K::real_list:
            parse_real_list(v);
            break;
    }
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
    static const std::vector<ConfigKey> schema{
        {"run.seed", K::unsigned_integer, "0", "master seed"},
        {"run.jobs", K::unsigned_integer, "1", "worker threads", false},
        {"run.task", K::text, "restore", "restore, sr2 or sr4"},

        {"data.pristine", K::text, "", "directory of pristine .stmi/.pgm images; empty = synthetic lattices"},
        {"data.synthetic_count", K::integer, "54", "synthetic pristine images"},
        {"data.synthetic_size", K::integer, "256", "synthetic pristine image size"},

        {"generate.out", K::text, "", "output directory"},
        {"generate.counts", K::int_list, "20000,2000,2000", "train,val,test sample counts"},

        {"degrade.crop_size", K::integer, "128", "sample size"},
        {"degrade.multitip_prob", K::real, "1.0", ""},
        {"degrade.misalign_prob", K::real, "0.3", ""},
        {"degrade.blunt_prob", K::real, "0.6", ""},
        {"degrade.tipchange_prob", K::real, "0.6", ""},
        {"degrade.scanline_prob", K::real, "0.6", ""},
        {"degrade.misalign_sigma", K::real, "0.8", "row-shift standard deviation in pixels"},
        {"degrade.tipchange_offset_prob", K::real, "0.5", ""},
        {"degrade.tip_count_weights", K::real_list, "0.5,0.3,0.2", "weights of 2, 3, 4 tips"},
        {"degrade.scanline_min_lines", K::integer, "25", ""},
        {"degrade.scanline_max_lines", K::integer, "35", ""},
        {"degrade.scanline_max_length_fraction", K::real, "0.8", ""},
        {"degrade.perturbation_weights", K::real_list, "0.3,0.45,0.25", "flat, ramp, oscillating"},

        {"targeted.degradation", K::text, "multitip", "multitip, misalign, tipchange, blunt, scanline, lowres_only"},
        {"targeted.count", K::integer, "1000", "samples in the set"},
        {"targeted.out", K::text, "", "output directory"},

        {"train.data", K::text, "", "dataset directory (a split with manifest.json, or a root with train/)"},
        {"train.objective", K::text, "fm", "fm, ddim, ddim_fft or mae"},
        {"train.epochs", K::integer, "3", ""},
        {"train.batch", K::integer, "8", ""},
        {"train.lr", K::real, "0.001", ""},
        {"train.norm", K::text, "l1", "l1 or l2"},
        {"train.T", K::integer, "1000", "DDIM schedule length"},
        {"train.channels", K::int_list, "8,16,32", "channel width per level"},
        {"train.time_dim", K::integer, "16", ""},
        {"train.probe_size", K::integer, "32", "samples in the loss-curve probe set"},
        {"train.max_seconds", K::real, "0", "wall-clock limit, 0 = none"},
        {"train.limit", K::integer, "0", "use only the first N samples, 0 = all"},
        {"train.out", K::text, "", "checkpoint path"},

        {"sample.model", K::text, "", "checkpoint path"},
        {"sample.sampler", K::text, "fm", "fm, ddim or direct"},
        {"sample.steps", K::integer, "10", ""},
        {"sample.T", K::integer, "1000", "DDIM schedule length"},
        {"sample.factor", K::integer, "4", "super-resolution factor"},
        {"sample.patch", K::integer, "128", "patch size"},
        {"sample.overlap", K::integer, "32", "patch overlap in pixels"},
        {"sample.in", K::text, "", "input image or directory"},
        {"sample.out", K::text, "", "output image or directory"},

        {"eval.gt", K::text, "", "ground-truth directory"},
        {"eval.pred", K::text, "", "prediction directory"},
        {"eval.pred_block", K::text, "first", "block read from two-block sample files: first or second"},
        {"eval.metrics", K::text, "psnr,ssim", "subset of psnr,ssim,kid,cmmd"},
        {"eval.ssim", K::text, "windowed", "windowed or global"},
        {"eval.embeddings", K::text, "", "STME file: ground-truth rows, then prediction rows"},
        {"eval.kid_block", K::integer, "0", "KID block size, 0 = one block"},
        {"eval.cmmd_sigma", K::real, "10", ""},
        {"eval.out", K::text, "", "report CSV"},

        {"physics.draws", K::integer, "1000", ""},
        {"physics.grid", K::integer, "32", "height grid size"},
        {"physics.out", K::text, "physics_check.csv", ""},

        {"bench.steps", K::int_list, "2,5,10", "step counts"},
        {"bench.repeat", K::integer, "3", ""},
        {"bench.size", K::integer, "128", "benchmark image size"},
        {"bench.out", K::text, "timing.csv", ""},

        {"probe.count", K::integer, "50", "samples per degradation type"},
        {"probe.sr_task", K::text, "sr4", "task of the lowres_only baseline"},
        {"probe.out", K::text, "probe.csv", ""},
    };
    return schema;
}

RunConfig::RunConfig() {
    for (const auto& k : config_schema()) values_.emplace(std::string(k.name), std::string(k.default_value));
}

void RunConfig::set(const std::string& key, std::string value) {
    const ConfigKey* k = find_key(key);
    if (!k) throw ConfigError("unknown config key: " + key);
    value = unwrap(std::move(value));
    check_value(*k, value);
    values_[key] = std::move(value);
}

void RunConfig::merge_text(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config key outside a section: " + section);
        if (section == "stamp") continue;
        for (const auto& [key, value] : body) set(section + "." + key, value.data());
    }
}

void RunConfig::merge_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    merge_text(ss.str());
}

const std::string& RunConfig::text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key: " + key);
    return it->second;
}

long long RunConfig::integer(const std::string& key) const {
    long long v = 0;
    parse_number(std::string_view(text(key)), v);
    return v;
}

std::uint64_t RunConfig::unsigned_integer(const std::string& key) const {
    std::uint64_t v = 0;
    parse_number(std::string_view(text(key)), v);
    return v;
}

double RunConfig::real(const std::string& key) const {
    double v = 0;
    parse_number(std::string_view(text(key)), v);
    return v;
}

std::vector<long long> RunConfig::int_list(const std::string& key) const { return parse_int_list(text(key)); }
std::vector<double> RunConfig::real_list(const std::string& key) const { return parse_real_list(text(key)); }

std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    std::string section;
    for (const auto& [name, value] : values_) {  // std::map keeps "section.key" sorted
        const auto* k = find_key(name);
        if (!k->stamped) continue;
        const auto dot = name.find('.');
        const std::string s = name.substr(0, dot);
        if (s != section) {
            os << (section.empty() ? "" : "\n") << '[' << s << "]\n";
            section = s;
        }
        os << name.substr(dot + 1) << " = " << value << '\n';
    }
    return os.str();
}

std::string RunConfig::hash() const { return sha256_hex(canonical_text()); }

std::vector<long long> parse_int_list(std::string_view s) { return parse_list<long long>(s, "integers"); }
std::vector<double> parse_real_list(std::string_view s) { return parse_list<double>(s, "numbers"); }

}  // namespace stmforge::app
