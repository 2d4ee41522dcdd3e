#include "stmforge/app/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>

#include "json.hpp"
#include "stmforge/app/probe.hpp"
#include "stmforge/app/stamp.hpp"
#include "stmforge/common/binary_io.hpp"
#include "stmforge/degrade/dataset.hpp"
#include "stmforge/genmodel/checkpoint.hpp"
#include "stmforge/genmodel/train.hpp"
#include "stmforge/imagecore/io.hpp"
#include "stmforge/imagecore/lattice.hpp"
#include "stmforge/imagecore/transforms.hpp"
#include "stmforge/metrics/embedding.hpp"
#include "stmforge/metrics/report.hpp"
#include "stmforge/patchwork/restore.hpp"
#include "stmforge/tipphysics/double_tip.hpp"

namespace stmforge::app {

namespace fs = std::filesystem;
using imagecore::Image;

namespace {

const std::string& required(const RunConfig& cfg, const std::string& key) {
    const auto& v = cfg.text(key);
    if (v.empty()) throw ConfigError(key + " is required");
    return v;
}

int to_int(const RunConfig& cfg, const std::string& key) { return static_cast<int>(cfg.integer(key)); }

unsigned jobs(const RunConfig& cfg) { return static_cast<unsigned>(std::max<std::uint64_t>(1, cfg.unsigned_integer("run.jobs"))); }

fs::path sidecar(const fs::path& file, const char* suffix) { return fs::path(file.string() + suffix); }

template <std::size_t N>
std::array<double, N> fixed_list(const RunConfig& cfg, const std::string& key) {
    const auto v = cfg.real_list(key);
    if (v.size() != N) throw ConfigError(key + " needs " + std::to_string(N) + " values");
    std::array<double, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

degrade::DegradeConfig degrade_config(const RunConfig& cfg) {
    degrade::DegradeConfig d;
    d.crop_size = to_int(cfg, "degrade.crop_size");
    d.multitip_prob = cfg.real("degrade.multitip_prob");
    d.misalign_prob = cfg.real("degrade.misalign_prob");
    d.blunt_prob = cfg.real("degrade.blunt_prob");
    d.tipchange_prob = cfg.real("degrade.tipchange_prob");
    d.scanline_prob = cfg.real("degrade.scanline_prob");
    d.misalign_sigma = cfg.real("degrade.misalign_sigma");
    d.tipchange_offset_prob = cfg.real("degrade.tipchange_offset_prob");
    d.tip_count_weights = fixed_list<3>(cfg, "degrade.tip_count_weights");
    d.scanline.min_lines = to_int(cfg, "degrade.scanline_min_lines");
    d.scanline.max_lines = to_int(cfg, "degrade.scanline_max_lines");
    d.scanline.max_length_fraction = cfg.real("degrade.scanline_max_length_fraction");
    d.scanline.perturbation_weights = fixed_list<3>(cfg, "degrade.perturbation_weights");
    return d;
}

std::vector<degrade::PristineImage> load_sources(const RunConfig& cfg) {
    const auto& dir = cfg.text("data.pristine");
    if (!dir.empty()) return degrade::load_pristine_dir(dir);
    return degrade::synthetic_pristine_set(to_int(cfg, "data.synthetic_count"), to_int(cfg, "data.synthetic_size"),
                                           cfg.unsigned_integer("run.seed"));
}

genmodel::SamplerConfig sampler_config(const RunConfig& cfg) {
    genmodel::SamplerConfig s;
    s.kind = genmodel::sampler_from_string(cfg.text("sample.sampler"));
    s.steps = to_int(cfg, "sample.steps");
    s.T = to_int(cfg, "sample.T");
    return s;
}

patchwork::RestoreOptions restore_options(const RunConfig& cfg) {
    patchwork::RestoreOptions o;
    o.patch = to_int(cfg, "sample.patch");
    o.overlap = to_int(cfg, "sample.overlap");
    o.seed = cfg.unsigned_integer("run.seed");
    o.jobs = jobs(cfg);
    return o;
}

// All STMI blocks of a file (one for images, two for dataset samples); PGM gives one.
std::vector<Image> read_blocks(const fs::path& path) {
    if (path.extension() == ".pgm") return {imagecore::load_pgm(path)};
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::vector<Image> out;
    while (is.peek() != std::char_traits<char>::eof()) out.push_back(imagecore::read_stmi(is));
    if (out.empty()) throw IoError("empty image file " + path.string());
    return out;
}

std::vector<fs::path> image_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".stmi" || ext == ".pgm")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << text;
    if (!os) throw IoError("write failed: " + path.string());
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---- subcommands ----

void cmd_generate(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = required(cfg, "generate.out");
    const auto counts = cfg.int_list("generate.counts");
    if (counts.size() != 3) throw ConfigError("generate.counts needs train,val,test");
    degrade::DatasetOptions opts{degrade_config(cfg), jobs(cfg)};
    const auto splits = degrade::split_pristine(load_sources(cfg));
    const degrade::SplitCounts sc{static_cast<int>(counts[0]), static_cast<int>(counts[1]), static_cast<int>(counts[2])};
    degrade::generate_dataset(splits, degrade::task_from_string(cfg.text("run.task")), sc, cfg.unsigned_integer("run.seed"),
                              dir, opts);
    write_stamp(dir / "stamp.ini", "generate", cfg);
    out << "wrote " << sc.train << '/' << sc.val << '/' << sc.test << " samples to " << dir.string() << '\n';
}

void cmd_targeted(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = required(cfg, "targeted.out");
    const auto deg = degrade::targeted_from_string(cfg.text("targeted.degradation"));
    degrade::DatasetOptions opts{degrade_config(cfg), jobs(cfg)};
    const auto splits = degrade::split_pristine(load_sources(cfg));
    const int n = to_int(cfg, "targeted.count");
    degrade::generate_targeted_set(splits.test, deg, degrade::task_from_string(cfg.text("run.task")), n,
                                   cfg.unsigned_integer("run.seed"), dir, opts);
    write_stamp(dir / "stamp.ini", "targeted", cfg);
    out << "wrote " << n << ' ' << degrade::to_string(deg) << " samples to " << dir.string() << '\n';
}

std::vector<degrade::SampleRecord> load_training_set(const fs::path& dir, int limit) {
    const fs::path split = fs::exists(dir / "manifest.json") ? dir : dir / "train";
    const auto m = degrade::load_manifest(split / "manifest.json");
    std::vector<degrade::SampleRecord> data;
    for (const auto& e : m.entries) {
        if (limit > 0 && static_cast<int>(data.size()) >= limit) break;
        auto [gt, deg] = degrade::read_sample(split / e.file);
        data.push_back({std::move(gt), std::move(deg), e.trace, m.task});
    }
    return data;
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
    const fs::path model_path = required(cfg, "train.out");
    const auto data = load_training_set(required(cfg, "train.data"), to_int(cfg, "train.limit"));
    genmodel::TrainConfig tc;
    tc.epochs = to_int(cfg, "train.epochs");
    tc.batch = to_int(cfg, "train.batch");
    tc.lr = cfg.real("train.lr");
    tc.seed = cfg.unsigned_integer("run.seed");
    tc.T = to_int(cfg, "train.T");
    tc.norm = genmodel::loss_norm_from_string(cfg.text("train.norm"));
    tc.probe_size = to_int(cfg, "train.probe_size");
    tc.max_seconds = cfg.real("train.max_seconds");
    tc.model.channels.clear();
    for (long long c : cfg.int_list("train.channels")) tc.model.channels.push_back(static_cast<int>(c));
    tc.model.time_dim = to_int(cfg, "train.time_dim");
    const auto objective = genmodel::objective_from_string(cfg.text("train.objective"));

    std::string curve = "epoch,probe_loss,train_loss\n";
    const auto result = genmodel::train_toy(data, objective, tc, [&](int epoch, double probe, double train) {
        out << "epoch " << epoch << " probe_loss " << fmt("%.6f", probe) << " train_loss " << fmt("%.6f", train) << '\n';
    });
    for (std::size_t e = 0; e < result.loss_curve.size(); ++e)
        curve += std::to_string(e) + "," + fmt("%.9g", result.loss_curve[e]) + "," +
                 (e == 0 ? std::string() : fmt("%.9g", result.epoch_loss[e - 1])) + "\n";
    if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
    genmodel::save_checkpoint(model_path, result.model);
    write_text(sidecar(model_path, ".loss.csv"), curve);
    write_stamp(sidecar(model_path, ".stamp.ini"), "train-toy", cfg);
    out << "trained on " << data.size() << " samples in " << fmt("%.1f", result.seconds) << " s; wrote "
        << model_path.string() << '\n';
}

void restore_files(const RunConfig& cfg, std::ostream& out, int factor, const char* command) {
    const fs::path in = required(cfg, "sample.in"), dst = required(cfg, "sample.out");
    const auto model = genmodel::load_checkpoint(required(cfg, "sample.model"));
    const auto sampler = sampler_config(cfg);
    const auto opts = restore_options(cfg);

    const auto process = [&](const fs::path& src, const fs::path& target) {
        Image img = imagecore::to_symmetric_range(read_blocks(src).back());
        Image res;
        if (factor == 1) {
            res = patchwork::restore_image(model, sampler, img, opts);
        } else {
            // Dataset samples already sit on the target grid.
            if (src.extension() == ".stmi" && read_blocks(src).size() == 2)
                img = imagecore::resample_y(img, factor, imagecore::ResampleDirection::down);
            res = patchwork::super_resolve(model, sampler, img, factor, opts);
        }
        imagecore::save_stmi(target, res);
    };
    std::size_t n = 0;
    if (fs::is_directory(in)) {
        fs::create_directories(dst);
        for (const auto& f : image_files(in)) {
            process(f, dst / (f.stem().string() + ".stmi"));
            ++n;
        }
        write_stamp(dst / "stamp.ini", command, cfg);
    } else {
        if (dst.has_parent_path()) fs::create_directories(dst.parent_path());
        process(in, dst);
        n = 1;
        write_stamp(sidecar(dst, ".stamp.ini"), command, cfg);
    }
    out << command << ": wrote " << n << " image(s) to " << dst.string() << '\n';
}

void cmd_restore(const RunConfig& cfg, std::ostream& out) { restore_files(cfg, out, 1, "restore"); }

void cmd_sr(const RunConfig& cfg, std::ostream& out) {
    const int factor = to_int(cfg, "sample.factor");
    if (factor != 2 && factor != 4) throw ConfigError("sample.factor must be 2 or 4");
    restore_files(cfg, out, factor, "sr");
}

void cmd_eval(const RunConfig& cfg, std::ostream& out) {
    const fs::path gt_dir = required(cfg, "eval.gt"), pred_dir = required(cfg, "eval.pred");
    const fs::path report_path = required(cfg, "eval.out");
    const auto& block = cfg.text("eval.pred_block");
    if (block != "first" && block != "second") throw ConfigError("eval.pred_block must be first or second");
    const auto mode = metrics::ssim_mode_from_string(cfg.text("eval.ssim"));
    bool want_kid = false, want_cmmd = false;
    for (const auto& m : [&] {
             std::vector<std::string> v;
             std::stringstream ss(cfg.text("eval.metrics"));
             for (std::string s; std::getline(ss, s, ',');) v.push_back(s);
             return v;
         }()) {
        if (m == "kid") want_kid = true;
        else if (m == "cmmd") want_cmmd = true;
        else if (m != "psnr" && m != "ssim") throw ConfigError("unknown metric: " + m);
    }

    std::vector<metrics::ImagePair> pairs;
    for (const auto& g : image_files(gt_dir)) {
        fs::path p = pred_dir / g.filename();
        if (!fs::exists(p)) p = pred_dir / (g.stem().string() + ".stmi");
        if (!fs::exists(p)) throw IoError("no prediction for " + g.filename().string() + " in " + pred_dir.string());
        const auto pb = read_blocks(p);
        pairs.push_back({g.stem().string(), read_blocks(g).front(), block == "first" ? pb.front() : pb.back()});
    }
    if (pairs.empty()) throw IoError("no images in " + gt_dir.string());
    auto report = metrics::evaluate_pairs(pairs, mode);

    if (want_kid || want_cmmd) {
        metrics::EmbeddingSet eg, ep;
        const auto& emb = cfg.text("eval.embeddings");
        if (!emb.empty()) {
            const auto all = metrics::load_embeddings(emb);
            const auto n = static_cast<Eigen::Index>(pairs.size());
            if (all.n() != 2 * n)
                throw IoError("embedding file has " + std::to_string(all.n()) + " rows, expected " + std::to_string(2 * n));
            eg = {all.vectors.topRows(n), all.provider_id};
            ep = {all.vectors.bottomRows(n), all.provider_id};
        } else {
            const metrics::RandomProjectionEmbedder e;
            std::vector<Image> g, p;
            for (const auto& pr : pairs) {
                g.push_back(pr.ground_truth);
                p.push_back(pr.prediction);
            }
            eg = metrics::embed_all(e, g);
            ep = metrics::embed_all(e, p);
        }
        const int block_size = to_int(cfg, "eval.kid_block");
        if (want_kid) report.kid = metrics::kid(eg, ep, metrics::Estimator::unbiased, block_size);
        if (want_cmmd) report.cmmd = metrics::cmmd(eg, ep, cfg.real("eval.cmmd_sigma"));
    }
    metrics::write_report_csv(report_path, report);
    write_stamp(sidecar(report_path, ".stamp.ini"), "eval", cfg);
    out << "pairs " << pairs.size() << " psnr " << fmt("%.4f", report.mean_psnr) << " ssim " << fmt("%.4f", report.mean_ssim);
    if (report.kid) out << " kid " << fmt("%.6g", *report.kid);
    if (report.cmmd) out << " cmmd " << fmt("%.6g", *report.cmmd);
    out << '\n';
}

void cmd_physics(const RunConfig& cfg, std::ostream& out) {
    const fs::path path = required(cfg, "physics.out");
    const auto rep = tipphysics::equivalence_sweep(to_int(cfg, "physics.draws"), cfg.unsigned_integer("run.seed"),
                                                   to_int(cfg, "physics.grid"));
    write_text(path, "draws,grid,max_abs_deviation\n" + std::to_string(rep.draws) + "," + std::to_string(rep.grid) + "," +
                         fmt("%.6e", rep.max_abs_deviation) + "\n");
    write_stamp(sidecar(path, ".stamp.ini"), "physics-check", cfg);
    out << "max deviation " << fmt("%.3e", rep.max_abs_deviation) << " over " << rep.draws << " draws\n";
}

std::optional<genmodel::TinyDenoiser> optional_model(const RunConfig& cfg) {
    const auto& p = cfg.text("sample.model");
    if (p.empty()) return std::nullopt;
    return genmodel::load_checkpoint(p);
}

void cmd_bench(const RunConfig& cfg, std::ostream& out) {
    const fs::path path = required(cfg, "bench.out");
    const auto loaded = optional_model(cfg);
    const genmodel::TinyDenoiser model = loaded ? *loaded : genmodel::TinyDenoiser({}, cfg.unsigned_integer("run.seed"));
    const int size = to_int(cfg, "bench.size"), repeat = to_int(cfg, "bench.repeat");
    if (repeat < 1) throw ConfigError("bench.repeat must be positive");
    const Image img = imagecore::normalize_sym(
        imagecore::synth_lattice(size, size, 8.0, imagecore::RowOrientation::horizontal, 0.001, cfg.unsigned_integer("run.seed")));
    auto sampler = sampler_config(cfg);
    const auto opts = restore_options(cfg);

    // untimed warm-up so the first step count does not pay for cold caches
    sampler.steps = 1;
    (void)patchwork::restore_image(model, sampler, img, opts);

    std::string csv = "steps,repeat,total_seconds,seconds_per_step\n";
    std::vector<double> xs, ys;
    for (long long steps : cfg.int_list("bench.steps")) {
        sampler.steps = static_cast<int>(steps);
        double total = 0;
        for (int r = 0; r < repeat; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            (void)patchwork::restore_image(model, sampler, img, opts);
            total += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        total /= repeat;
        xs.push_back(static_cast<double>(steps));
        ys.push_back(total);
        csv += std::to_string(steps) + "," + std::to_string(repeat) + "," + fmt("%.9f", total) + "," +
               fmt("%.9f", total / static_cast<double>(steps)) + "\n";
    }
    write_text(path, csv);
    write_stamp(sidecar(path, ".stamp.ini"), "bench", cfg);
    out << csv;
    if (xs.size() >= 2) out << "r2 " << fmt("%.6f", linear_fit_r2(xs, ys)) << '\n';
}

void cmd_probe(const RunConfig& cfg, std::ostream& out) {
    const fs::path path = required(cfg, "probe.out");
    const auto model = optional_model(cfg);
    ProbeOptions o;
    o.count = to_int(cfg, "probe.count");
    o.seed = cfg.unsigned_integer("run.seed");
    o.sr_task = degrade::task_from_string(cfg.text("probe.sr_task"));
    if (o.sr_task == degrade::Task::restore) throw ConfigError("probe.sr_task must be sr2 or sr4");
    o.base = degrade_config(cfg);
    o.sampler = sampler_config(cfg);
    o.ssim = metrics::ssim_mode_from_string(cfg.text("eval.ssim"));
    o.jobs = jobs(cfg);
    const auto splits = degrade::split_pristine(load_sources(cfg));
    const auto csv = probe_csv(difficulty_probe(splits.test, model ? &*model : nullptr, o));
    write_text(path, csv);
    write_stamp(sidecar(path, ".stamp.ini"), "probe", cfg);
    out << csv;
}

// ---- command line ----

struct Flag {
    const char* name;
    const char* key;
};

const std::vector<Flag> kDegradeFlags{
    {"--pristine", "data.pristine"},           {"--synthetic-count", "data.synthetic_count"},
    {"--synthetic-size", "data.synthetic_size"}, {"--crop-size", "degrade.crop_size"},
    {"--multitip-prob", "degrade.multitip_prob"}, {"--misalign-prob", "degrade.misalign_prob"},
    {"--blunt-prob", "degrade.blunt_prob"},     {"--tipchange-prob", "degrade.tipchange_prob"},
    {"--scanline-prob", "degrade.scanline_prob"}, {"--misalign-sigma", "degrade.misalign_sigma"},
};

const std::vector<Flag> kSampleFlags{
    {"--model", "sample.model"}, {"--sampler", "sample.sampler"}, {"--steps", "sample.steps"},
    {"--T", "sample.T"},         {"--patch", "sample.patch"},     {"--overlap", "sample.overlap"},
};

struct CommandSpec {
    const char* name;
    const char* help;
    void (*fn)(const RunConfig&, std::ostream&);
    std::vector<std::vector<Flag>> flags;
};

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> specs{
        {"generate", "generate a train/val/test dataset", cmd_generate,
         {{{"--task", "run.task"}, {"--out", "generate.out"}, {"--counts", "generate.counts"}}, kDegradeFlags}},
        {"targeted", "generate a targeted test set with one degradation type", cmd_targeted,
         {{{"--task", "run.task"}, {"--degradation", "targeted.degradation"}, {"--count", "targeted.count"},
           {"--out", "targeted.out"}},
          kDegradeFlags}},
        {"train-toy", "train the toy denoiser on a generated dataset", cmd_train,
         {{{"--data", "train.data"}, {"--objective", "train.objective"}, {"--epochs", "train.epochs"},
           {"--batch", "train.batch"}, {"--lr", "train.lr"}, {"--norm", "train.norm"}, {"--T", "train.T"},
           {"--channels", "train.channels"}, {"--time-dim", "train.time_dim"}, {"--probe-size", "train.probe_size"},
           {"--max-seconds", "train.max_seconds"}, {"--limit", "train.limit"}, {"--out", "train.out"}}}},
        {"restore", "restore an image or a directory of images", cmd_restore,
         {kSampleFlags, {{"--in", "sample.in"}, {"--out", "sample.out"}}}},
        {"sr", "super-resolve an image or a directory of images", cmd_sr,
         {kSampleFlags, {{"--in", "sample.in"}, {"--out", "sample.out"}, {"--factor", "sample.factor"}}}},
        {"eval", "score predictions against ground truth", cmd_eval,
         {{{"--gt", "eval.gt"}, {"--pred", "eval.pred"}, {"--pred-block", "eval.pred_block"},
           {"--metrics", "eval.metrics"}, {"--ssim", "eval.ssim"}, {"--embeddings", "eval.embeddings"},
           {"--kid-block", "eval.kid_block"}, {"--cmmd-sigma", "eval.cmmd_sigma"}, {"--out", "eval.out"}}}},
        {"physics-check", "compare the image-space and physical double-tip models", cmd_physics,
         {{{"--draws", "physics.draws"}, {"--grid", "physics.grid"}, {"--out", "physics.out"}}}},
        {"bench", "time patch-wise restoration against step count", cmd_bench,
         {{{"--model", "sample.model"}, {"--sampler", "sample.sampler"}, {"--T", "sample.T"},
           {"--patch", "sample.patch"}, {"--overlap", "sample.overlap"}, {"--steps", "bench.steps"},
           {"--repeat", "bench.repeat"}, {"--size", "bench.size"}, {"--out", "bench.out"}}}},
        {"probe", "score each targeted degradation type", cmd_probe,
         {kSampleFlags,
          {{"--count", "probe.count"}, {"--sr-task", "probe.sr_task"}, {"--ssim", "eval.ssim"}, {"--out", "probe.out"}},
          kDegradeFlags}},
    };
    return specs;
}

void structured_error(std::ostream& err, const char* kind, const std::string& message) {
    err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& c : commands()) v.emplace_back(c.name);
        return v;
    }();
    return names;
}

void execute(const std::string& command, const RunConfig& cfg, std::ostream& out) {
    for (const auto& c : commands())
        if (command == c.name) return c.fn(cfg, out);
    throw ConfigError("unknown command: " + command);
}

double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear fit needs two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("linear fit needs distinct x values");
    if (syy == 0) return 1.0;
    return sxy * sxy / (sxx * syy);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"stmforge: synthetic STM degradation, restoration and evaluation"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    struct Bound {
        CLI::App* sub;
        const CommandSpec* spec;
        std::string config_path;
        std::map<std::string, std::string> overrides;
        std::map<std::string, CLI::Option*> options;
    };
    std::vector<std::unique_ptr<Bound>> bound;
    for (const auto& spec : commands()) {
        auto b = std::make_unique<Bound>();
        b->spec = &spec;
        b->sub = app.add_subcommand(spec.name, spec.help);
        b->sub->add_option("--config", b->config_path, "config file; flags override its values")->check(CLI::ExistingFile);
        const auto bind = [&](const Flag& f) {
            b->options[f.key] = b->sub->add_option(f.name, b->overrides[f.key], std::string("sets ") + f.key);
        };
        bind({"--seed", "run.seed"});
        bind({"--jobs", "run.jobs"});
        for (const auto& group : spec.flags)
            for (const auto& f : group) bind(f);
        bound.push_back(std::move(b));
    }

    std::string stamp_path, replay_jobs;
    auto* replay = app.add_subcommand("replay", "re-run a command from its stamp file");
    replay->add_option("stamp", stamp_path, "stamp file")->required();
    replay->add_option("--jobs", replay_jobs, "worker threads");

    std::string dump_config_path;
    auto* show = app.add_subcommand("config", "print the effective config");
    show->add_option("--config", dump_config_path, "config file")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (replay->parsed()) {
            const Stamp s = read_stamp(stamp_path);
            RunConfig cfg = s.config;
            if (!replay_jobs.empty()) cfg.set("run.jobs", replay_jobs);
            execute(s.command, cfg, out);
            return 0;
        }
        if (show->parsed()) {
            RunConfig cfg;
            if (!dump_config_path.empty()) cfg.merge_file(dump_config_path);
            out << cfg.canonical_text();
            return 0;
        }
        for (const auto& b : bound) {
            if (!b->sub->parsed()) continue;
            RunConfig cfg;
            if (!b->config_path.empty()) cfg.merge_file(b->config_path);
            for (const auto& [key, opt] : b->options)
                if (opt->count() > 0) cfg.set(key, b->overrides[key]);
            b->spec->fn(cfg, out);
            return 0;
        }
    } catch (const IoError& e) {
        structured_error(err, "io", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        structured_error(err, "invalid_argument", e.what());
        return 2;
    } catch (const std::exception& e) {
        structured_error(err, "runtime", e.what());
        return 1;
    }
    return 2;
}

}  // namespace stmforge::app
