#include "stmforge/degrade/trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stmforge::degrade {

using nlohmann::json;

std::string_view to_string(Task t) {
    switch (t) {
        case Task::restore: return "restore";
        case Task::sr2: return "sr2";
        case Task::sr4: return "sr4";
    }
    return "restore";
}

Task task_from_string(std::string_view s) {
    if (s == "restore") return Task::restore;
    if (s == "sr2") return Task::sr2;
    if (s == "sr4") return Task::sr4;
    throw std::invalid_argument("unknown task: " + std::string(s));
}

int task_factor(Task t) {
    return t == Task::sr2 ? 2 : t == Task::sr4 ? 4 : 1;
}

std::string_view to_string(StepId id) {
    switch (id) {
        case StepId::rotate: return "rotate";
        case StepId::multitip: return "multitip";
        case StepId::misalign: return "misalign";
        case StepId::crop: return "crop";
        case StepId::blunt: return "blunt";
        case StepId::tipchange: return "tipchange";
        case StepId::resample: return "resample";
        case StepId::scanlinenoise: return "scanlinenoise";
        case StepId::normalize: return "normalize";
    }
    return "rotate";
}

StepId step_from_string(std::string_view s) {
    for (StepId id : kPipelineOrder)
        if (to_string(id) == s) return id;
    throw std::invalid_argument("unknown step: " + std::string(s));
}

std::string_view to_string(Perturbation p) {
    switch (p) {
        case Perturbation::constant: return "constant";
        case Perturbation::lognormal: return "lognormal";
        case Perturbation::sinusoid: return "sinusoid";
    }
    return "constant";
}

namespace {

Perturbation perturbation_from_string(std::string_view s) {
    if (s == "constant") return Perturbation::constant;
    if (s == "lognormal") return Perturbation::lognormal;
    if (s == "sinusoid") return Perturbation::sinusoid;
    throw std::invalid_argument("unknown perturbation: " + std::string(s));
}

std::string_view to_string(CopyKernel::Kind k) {
    switch (k) {
        case CopyKernel::Kind::identity: return "identity";
        case CopyKernel::Kind::gaussian: return "gaussian";
        case CopyKernel::Kind::median: return "median";
        case CopyKernel::Kind::random: return "random";
    }
    return "identity";
}

CopyKernel::Kind kernel_kind_from_string(std::string_view s) {
    if (s == "identity") return CopyKernel::Kind::identity;
    if (s == "gaussian") return CopyKernel::Kind::gaussian;
    if (s == "median") return CopyKernel::Kind::median;
    if (s == "random") return CopyKernel::Kind::random;
    throw std::invalid_argument("unknown copy kernel: " + std::string(s));
}

json kernel_json(const CopyKernel& k) {
    json j{{"kind", to_string(k.kind)}};
    switch (k.kind) {
        case CopyKernel::Kind::gaussian: j["sigma"] = k.sigma; break;
        case CopyKernel::Kind::median: j["size"] = k.median_size; break;
        case CopyKernel::Kind::random:
            j["size"] = k.weights.size;
            j["anchor"] = {k.weights.anchor_row, k.weights.anchor_col};
            j["weights"] = k.weights.weights;
            break;
        case CopyKernel::Kind::identity: break;
    }
    return j;
}

CopyKernel kernel_from_json(const json& j) {
    CopyKernel k;
    k.kind = kernel_kind_from_string(j.at("kind").get<std::string>());
    switch (k.kind) {
        case CopyKernel::Kind::gaussian: k.sigma = j.at("sigma").get<double>(); break;
        case CopyKernel::Kind::median: k.median_size = j.at("size").get<int>(); break;
        case CopyKernel::Kind::random:
            k.weights.size = j.at("size").get<int>();
            k.weights.anchor_row = j.at("anchor").at(0).get<int>();
            k.weights.anchor_col = j.at("anchor").at(1).get<int>();
            k.weights.weights = j.at("weights").get<std::vector<double>>();
            k.weights.validate();
            break;
        case CopyKernel::Kind::identity: break;
    }
    return k;
}

json segment_json(const ScanlineSegment& s) {
    json j{{"row", s.row}, {"start", s.start}, {"length", s.length}, {"kind", to_string(s.kind)}, {"sign", s.sign}};
    switch (s.kind) {
        case Perturbation::constant: j["value"] = s.value; break;
        case Perturbation::lognormal:
            j["mu"] = s.mu;
            j["sigma"] = s.sigma;
            j["peak"] = s.peak;
            break;
        case Perturbation::sinusoid:
            j["amplitude"] = s.amplitude;
            j["period"] = s.period;
            j["phase"] = s.phase;
            break;
    }
    return j;
}

ScanlineSegment segment_from_json(const json& j) {
    ScanlineSegment s;
    s.row = j.at("row").get<int>();
    s.start = j.at("start").get<int>();
    s.length = j.at("length").get<int>();
    s.kind = perturbation_from_string(j.at("kind").get<std::string>());
    s.sign = j.at("sign").get<int>();
    switch (s.kind) {
        case Perturbation::constant: s.value = j.at("value").get<double>(); break;
        case Perturbation::lognormal:
            s.mu = j.at("mu").get<double>();
            s.sigma = j.at("sigma").get<double>();
            s.peak = j.at("peak").get<double>();
            break;
        case Perturbation::sinusoid:
            s.amplitude = j.at("amplitude").get<double>();
            s.period = j.at("period").get<double>();
            s.phase = j.at("phase").get<double>();
            break;
    }
    return s;
}

}  // namespace

int CopyKernel::reach() const {
    switch (kind) {
        case Kind::identity: return 0;
        case Kind::gaussian: return static_cast<int>(std::ceil(3.0 * sigma));
        case Kind::median: return median_size / 2;
        case Kind::random:
            return std::max({weights.anchor_row, weights.anchor_col, weights.size - 1 - weights.anchor_row,
                             weights.size - 1 - weights.anchor_col});
    }
    return 0;
}

bool DegradationTrace::fired(StepId id) const {
    switch (id) {
        case StepId::rotate:
        case StepId::crop:
        case StepId::normalize: return true;
        case StepId::multitip: return multitip.has_value();
        case StepId::misalign: return misalign.has_value();
        case StepId::blunt: return blunt_sigma.has_value();
        case StepId::tipchange: return tipchange.has_value();
        case StepId::resample: return resample_factor.has_value();
        case StepId::scanlinenoise: return scanline.has_value();
    }
    return false;
}

std::vector<StepRecord> DegradationTrace::applied() const {
    std::vector<StepRecord> out;
    for (StepId id : kPipelineOrder) {
        StepRecord rec{id, fired(id), json::object()};
        switch (id) {
            case StepId::rotate: rec.params["turns"] = rotate_turns; break;
            case StepId::multitip:
                if (multitip) {
                    rec.params["n_tips"] = multitip->n_tips;
                    json copies = json::array();
                    for (const auto& c : multitip->copies)
                        copies.push_back({{"A", c.amplitude}, {"c", c.c}, {"d", c.d}, {"dx", c.dx}, {"dy", c.dy},
                                          {"kernel", kernel_json(c.kernel)}});
                    rec.params["copies"] = std::move(copies);
                }
                break;
            case StepId::misalign:
                if (misalign) {
                    rec.params["sigma"] = misalign->sigma;
                    rec.params["row_shifts"] = misalign->row_shifts;
                }
                break;
            case StepId::crop:
                rec.params = {{"top", crop.top}, {"left", crop.left}, {"height", crop.height}, {"width", crop.width}};
                break;
            case StepId::blunt:
                if (blunt_sigma) rec.params["sigma"] = *blunt_sigma;
                break;
            case StepId::tipchange:
                if (tipchange) {
                    rec.params["start_row"] = tipchange->start_row;
                    rec.params["sigma"] = tipchange->sigma;
                    rec.params["offset_fraction"] =
                        tipchange->offset_fraction ? json(*tipchange->offset_fraction) : json(nullptr);
                }
                break;
            case StepId::resample:
                if (resample_factor) rec.params["factor"] = *resample_factor;
                break;
            case StepId::scanlinenoise:
                if (scanline) {
                    json segs = json::array();
                    for (const auto& s : scanline->segments) segs.push_back(segment_json(s));
                    rec.params["segments"] = std::move(segs);
                }
                break;
            case StepId::normalize: rec.params["range"] = {-1, 1}; break;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

json to_json(const DegradationTrace& trace) {
    json applied = json::array();
    for (const auto& rec : trace.applied())
        applied.push_back({{"step", to_string(rec.id)}, {"fired", rec.fired}, {"params", rec.params}});
    return {{"seed", trace.seed}, {"task", to_string(trace.task)}, {"applied", std::move(applied)}};
}

DegradationTrace trace_from_json(const json& j) {
    DegradationTrace t;
    t.seed = j.at("seed").get<std::uint64_t>();
    t.task = task_from_string(j.at("task").get<std::string>());
    const auto& applied = j.at("applied");
    if (applied.size() != std::size(kPipelineOrder)) throw std::invalid_argument("trace must list every pipeline step");
    for (std::size_t i = 0; i < applied.size(); ++i) {
        const auto& rec = applied[i];
        const StepId id = step_from_string(rec.at("step").get<std::string>());
        if (id != kPipelineOrder[i]) throw std::invalid_argument("trace steps out of pipeline order");
        const bool fired = rec.at("fired").get<bool>();
        const json& p = rec.at("params");
        if (!fired) continue;
        switch (id) {
            case StepId::rotate: t.rotate_turns = p.at("turns").get<int>(); break;
            case StepId::multitip: {
                MultiTipParams mt;
                mt.n_tips = p.at("n_tips").get<int>();
                for (const auto& c : p.at("copies"))
                    mt.copies.push_back({c.at("A").get<double>(), c.at("c").get<double>(), c.at("d").get<double>(),
                                         c.at("dx").get<int>(), c.at("dy").get<int>(), kernel_from_json(c.at("kernel"))});
                t.multitip = std::move(mt);
                break;
            }
            case StepId::misalign:
                t.misalign = MisalignParams{p.at("sigma").get<double>(), p.at("row_shifts").get<std::vector<int>>()};
                break;
            case StepId::crop:
                t.crop = {p.at("top").get<int>(), p.at("left").get<int>(), p.at("height").get<int>(), p.at("width").get<int>()};
                break;
            case StepId::blunt: t.blunt_sigma = p.at("sigma").get<double>(); break;
            case StepId::tipchange: {
                TipChangeParams tc{p.at("start_row").get<int>(), p.at("sigma").get<double>(), std::nullopt};
                if (!p.at("offset_fraction").is_null()) tc.offset_fraction = p.at("offset_fraction").get<double>();
                t.tipchange = tc;
                break;
            }
            case StepId::resample: t.resample_factor = p.at("factor").get<int>(); break;
            case StepId::scanlinenoise: {
                ScanlineParams sp;
                for (const auto& s : p.at("segments")) sp.segments.push_back(segment_from_json(s));
                t.scanline = std::move(sp);
                break;
            }
            case StepId::normalize: break;
        }
    }
    return t;
}

}  // namespace stmforge::degrade
