#include "stmforge/degrade/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "stmforge/imagecore/filters.hpp"
#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::degrade {

using imagecore::NormState;

std::string_view to_string(TargetedDegradation d) {
    switch (d) {
        case TargetedDegradation::multitip: return "multitip";
        case TargetedDegradation::misalign: return "misalign";
        case TargetedDegradation::tipchange: return "tipchange";
        case TargetedDegradation::blunt: return "blunt";
        case TargetedDegradation::scanline: return "scanline";
        case TargetedDegradation::lowres_only: return "lowres_only";
    }
    return "multitip";
}

TargetedDegradation targeted_from_string(std::string_view s) {
    for (auto d : {TargetedDegradation::multitip, TargetedDegradation::misalign, TargetedDegradation::tipchange,
                   TargetedDegradation::blunt, TargetedDegradation::scanline, TargetedDegradation::lowres_only})
        if (to_string(d) == s) return d;
    throw std::invalid_argument("unknown degradation: " + std::string(s));
}

DegradeConfig DegradeConfig::targeted(TargetedDegradation d, int crop_size) {
    DegradeConfig cfg;
    cfg.crop_size = crop_size;
    cfg.multitip_prob = d == TargetedDegradation::multitip ? 1.0 : 0.0;
    cfg.misalign_prob = d == TargetedDegradation::misalign ? 1.0 : 0.0;
    cfg.blunt_prob = d == TargetedDegradation::blunt ? 1.0 : 0.0;
    cfg.tipchange_prob = d == TargetedDegradation::tipchange ? 1.0 : 0.0;
    cfg.scanline_prob = d == TargetedDegradation::scanline ? 1.0 : 0.0;
    return cfg;
}

DegradationTrace plan_degradation(int source_height, int source_width, Task task, Rng& rng, const DegradeConfig& cfg) {
    const int n = cfg.crop_size;
    DegradationTrace t;
    t.seed = rng.seed();
    t.task = task;

    t.rotate_turns = rng.uniform_int(0, 3);
    const bool odd = t.rotate_turns % 2 == 1;
    const int rh = odd ? source_width : source_height;
    const int rw = odd ? source_height : source_width;
    if (rh < n || rw < n)
        throw std::invalid_argument("source image " + std::to_string(source_height) + "x" + std::to_string(source_width) +
                                    " is smaller than the " + std::to_string(n) + " px crop");

    if (rng.bernoulli(cfg.multitip_prob)) t.multitip = sample_multi_tip(rng, cfg.tip_count_weights);
    if (rng.bernoulli(cfg.misalign_prob)) t.misalign = MisalignParams{cfg.misalign_sigma, sample_row_shifts(n, cfg.misalign_sigma, rng)};

    t.crop = {rng.uniform_int(0, rh - n), rng.uniform_int(0, rw - n), n, n};

    if (rng.bernoulli(cfg.blunt_prob)) t.blunt_sigma = rng.uniform(0.3, 0.6);
    if (rng.bernoulli(cfg.tipchange_prob)) {
        TipChangeParams tc;
        tc.start_row = rng.uniform_int(0, n - 1);
        tc.sigma = rng.uniform(0.3, 0.6);
        if (rng.bernoulli(cfg.tipchange_offset_prob)) {
            const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
            tc.offset_fraction = sign * rng.uniform(0.05, 0.4);
        }
        t.tipchange = tc;
    }
    if (task != Task::restore) t.resample_factor = task_factor(task);
    if (rng.bernoulli(cfg.scanline_prob)) t.scanline = sample_scanline_noise(n, n, rng, cfg.scanline);
    return t;
}

int influence_margin(const DegradationTrace& trace) {
    int ghost_reach = 0;
    if (trace.multitip)
        for (const auto& c : trace.multitip->copies)
            ghost_reach = std::max(ghost_reach, std::max(std::abs(c.dx), std::abs(c.dy)) + c.kernel.reach());
    int shift_reach = 0;
    if (trace.misalign)
        for (int s : trace.misalign->row_shifts) shift_reach = std::max(shift_reach, std::abs(s));
    return ghost_reach + shift_reach;
}

namespace {

double dynamic_range(const Image& img) {
    const double r = img.max() - img.min();
    return r > 0.0 ? r : 1.0;
}

}  // namespace

SampleRecord execute_trace(const Image& pristine, const DegradationTrace& trace, const ExecuteOptions& opts) {
    if (pristine.norm_state() != NormState::unit) throw std::invalid_argument("pristine image must be unit-normalized");
    const Image rotated = imagecore::rotate_quarter(pristine, trace.rotate_turns);
    const CropParams& cp = trace.crop;
    if (cp.top < 0 || cp.left < 0 || cp.top + cp.height > rotated.height() || cp.left + cp.width > rotated.width())
        throw std::invalid_argument("image smaller than crop");

    // Steps (2)-(3) only influence the crop through a bounded neighborhood.
    int top = 0, left = 0, bottom = rotated.height(), right = rotated.width();
    if (!opts.full_frame) {
        const int m = influence_margin(trace);
        top = std::max(0, cp.top - m);
        left = std::max(0, cp.left - m);
        bottom = std::min(rotated.height(), cp.top + cp.height + m);
        right = std::min(rotated.width(), cp.left + cp.width + m);
    }
    Image work = imagecore::crop(rotated, top, left, bottom - top, right - left);

    if (trace.multitip) work = apply_multi_tip(work, *trace.multitip);
    if (trace.misalign) {
        if (trace.misalign->row_shifts.size() != static_cast<std::size_t>(cp.height))
            throw std::invalid_argument("misalignment needs one shift per crop row");
        std::vector<int> shifts(static_cast<std::size_t>(work.height()), 0);
        for (int i = 0; i < cp.height; ++i) shifts[static_cast<std::size_t>(cp.top - top + i)] = trace.misalign->row_shifts[static_cast<std::size_t>(i)];
        work = imagecore::shift_rows(work, shifts);
    }

    Image degraded = imagecore::crop(work, cp.top - top, cp.left - left, cp.height, cp.width).with_state(NormState::raw);
    SampleRecord rec;
    rec.trace = trace;
    rec.task = trace.task;
    rec.ground_truth = imagecore::normalize_sym(imagecore::crop(rotated, cp.top, cp.left, cp.height, cp.width));

    if (trace.blunt_sigma) degraded = apply_blunt_tip(degraded, *trace.blunt_sigma);
    if (trace.tipchange) {
        std::optional<double> offset;
        if (trace.tipchange->offset_fraction) offset = *trace.tipchange->offset_fraction * dynamic_range(degraded);
        degraded = apply_tip_change(degraded, trace.tipchange->start_row, trace.tipchange->sigma, offset);
    }
    if (trace.resample_factor) {
        degraded = imagecore::resample_y(degraded, *trace.resample_factor, imagecore::ResampleDirection::down);
        degraded = imagecore::resample_y(degraded, *trace.resample_factor, imagecore::ResampleDirection::up_nearest);
    }
    if (trace.scanline) degraded = apply_scanline_segments(degraded, *trace.scanline, dynamic_range(degraded));
    rec.degraded = imagecore::normalize_sym(degraded);
    return rec;
}

SampleRecord degrade_sample(const Image& pristine, Task task, Rng& rng, const DegradeConfig& cfg) {
    const DegradationTrace trace = plan_degradation(pristine.height(), pristine.width(), task, rng, cfg);
    return execute_trace(pristine, trace);
}

}  // namespace stmforge::degrade
