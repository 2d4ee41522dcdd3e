#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "stmforge/imagecore/image.hpp"

namespace stmforge::degrade {

using imagecore::Image;
using imagecore::Kernel;

enum class Task { restore, sr2, sr4 };

std::string_view to_string(Task t);
Task task_from_string(std::string_view s);
/// Row decimation factor of the task: 1, 2 or 4.
int task_factor(Task t);

/// Pipeline steps in order of application.
enum class StepId { rotate, multitip, misalign, crop, blunt, tipchange, resample, scanlinenoise, normalize };

inline constexpr StepId kPipelineOrder[] = {StepId::rotate,   StepId::multitip,  StepId::misalign,
                                            StepId::crop,     StepId::blunt,     StepId::tipchange,
                                            StepId::resample, StepId::scanlinenoise, StepId::normalize};

std::string_view to_string(StepId id);
StepId step_from_string(std::string_view s);

/// Tip-shape kernel applied to one ghost copy.
struct CopyKernel {
    enum class Kind { identity, gaussian, median, random };
    Kind kind = Kind::identity;
    double sigma = 0.0;    // gaussian
    int median_size = 1;   // median, odd
    Kernel weights;        // random

    /// Largest pixel distance the kernel reads from.
    int reach() const;
};

struct TipCopy {
    double amplitude = 0.0;  // A_i
    double c = 0.0;
    double d = 0.0;
    int dx = 0;  // x offset, px
    int dy = 0;  // y offset, px
    CopyKernel kernel;
};

struct MultiTipParams {
    int n_tips = 2;               // tips including the original
    std::vector<TipCopy> copies;  // n_tips - 1 ghosts
};

struct MisalignParams {
    double sigma = 0.8;
    std::vector<int> row_shifts;  // one per row of the crop window
};

struct CropParams {
    int top = 0;
    int left = 0;
    int height = 0;
    int width = 0;
};

struct TipChangeParams {
    int start_row = 0;
    double sigma = 0.0;
    /// Signed offset as a fraction of the image's dynamic range.
    std::optional<double> offset_fraction;
};

enum class Perturbation { constant, lognormal, sinusoid };

std::string_view to_string(Perturbation p);

struct ScanlineSegment {
    int row = 0;
    int start = 0;
    int length = 0;
    Perturbation kind = Perturbation::constant;
    int sign = 1;
    double value = 0.0;  // constant offset
    double mu = 0.0;     // log-normal location
    double sigma = 0.0;  // log-normal shape
    double peak = 0.0;   // log-normal peak height
    double amplitude = 0.0;  // sinusoid
    double period = 0.0;
    double phase = 0.0;
};

struct ScanlineParams {
    std::vector<ScanlineSegment> segments;
};

/// One entry of the ordered step list.
struct StepRecord {
    StepId id;
    bool fired = false;
    nlohmann::json params = nlohmann::json::object();
};

/// Every sampled parameter of one generated sample. Executing the trace on
/// its source image reproduces the sample exactly.
struct DegradationTrace {
    std::uint64_t seed = 0;
    Task task = Task::restore;
    int rotate_turns = 0;
    std::optional<MultiTipParams> multitip;
    std::optional<MisalignParams> misalign;
    CropParams crop;
    std::optional<double> blunt_sigma;
    std::optional<TipChangeParams> tipchange;
    std::optional<int> resample_factor;
    std::optional<ScanlineParams> scanline;

    bool fired(StepId id) const;
    /// All nine steps in pipeline order with their parameters.
    std::vector<StepRecord> applied() const;
};

nlohmann::json to_json(const DegradationTrace& trace);
DegradationTrace trace_from_json(const nlohmann::json& j);

}  // namespace stmforge::degrade
