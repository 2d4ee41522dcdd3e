#pragma once

#include <array>

#include "stmforge/common/rng.hpp"
#include "stmforge/degrade/steps.hpp"
#include "stmforge/degrade/trace.hpp"

namespace stmforge::degrade {

/// Degradations that can be isolated in a targeted test set.
enum class TargetedDegradation { multitip, misalign, tipchange, blunt, scanline, lowres_only };

std::string_view to_string(TargetedDegradation d);
TargetedDegradation targeted_from_string(std::string_view s);

/// Firing probabilities and sampling ranges of the generation pipeline.
struct DegradeConfig {
    int crop_size = 128;
    double multitip_prob = 1.0;
    double misalign_prob = 0.3;
    double blunt_prob = 0.6;
    double tipchange_prob = 0.6;
    double scanline_prob = 0.6;
    double misalign_sigma = 0.8;
    double tipchange_offset_prob = 0.5;
    std::array<double, 3> tip_count_weights = kTipCountWeights;
    ScanlineConfig scanline;

    /// Exactly one optional degradation fires with probability 1 (none for lowres_only).
    static DegradeConfig targeted(TargetedDegradation d, int crop_size = 128);
};

/// Two-channel training sample.
struct SampleRecord {
    Image ground_truth;  // rotate + crop only, normalized to [-1, 1]
    Image degraded;      // full pipeline, normalized to [-1, 1]
    DegradationTrace trace;
    Task task = Task::restore;
};

/// Draws every random parameter of one sample for a source of the given size.
DegradationTrace plan_degradation(int source_height, int source_width, Task task, Rng& rng, const DegradeConfig& cfg = {});

struct ExecuteOptions {
    /// Process steps (2)-(3) on the whole rotated frame instead of a window
    /// around the crop. Both paths give identical results.
    bool full_frame = false;
};

/// Deterministically executes a trace on its (unit-normalized) source image.
SampleRecord execute_trace(const Image& pristine, const DegradationTrace& trace, const ExecuteOptions& opts = {});

/// plan_degradation + execute_trace. trace.seed is set to rng.seed().
SampleRecord degrade_sample(const Image& pristine, Task task, Rng& rng, const DegradeConfig& cfg = {});

/// Margin around the crop that steps (2)-(3) can read from.
int influence_margin(const DegradationTrace& trace);

}  // namespace stmforge::degrade
