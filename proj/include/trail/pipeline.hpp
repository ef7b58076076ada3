#pragma once

#include "trail/config.hpp"
#include "trail/dataset.hpp"
#include "trail/field.hpp"
#include "trail/validator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace trail {

enum class RunMode { Full, Original };

RunMode run_mode_from_string(const std::string& name);  // throws ConfigError
std::string run_mode_name(RunMode mode);

/// Per-keyframe result line of the report stream.
struct FrameReport {
    int index = 0;
    std::optional<std::array<double, 4>> plane;
    std::optional<double> pitch_deg;
    int h_max = 0;
    int obstacle_pixels = 0;
    std::optional<std::pair<double, double>> detection_centroid;
    std::string verdict = "valid";
    std::string cause = "none";
    double overlap_fraction = 0.0;
    std::string eval = "na";  // success | failure | na
    std::optional<double> cloud_ms, detector_ms, total_ms;

    std::string to_json_line() const;
};

struct PipelineOptions {
    RunMode mode = RunMode::Full;
    bool timings = false;  // timings make report streams run-dependent
    std::optional<std::filesystem::path> annotate_dir;
};

struct PipelineResult {
    std::vector<FrameReport> frames;
    std::vector<Detection> detections;   // per frame, for downstream checks
    std::string report_jsonl;            // header line + one line per frame
    int evaluated = 0;
    int successes = 0;
    double mean_overlap_fraction = 0.0;

    double success_rate() const { return evaluated > 0 ? static_cast<double>(successes) / evaluated : 0.0; }
};

/// Runs the full per-keyframe chain (cloud segmentation, obstacle mask,
/// swarm detector, neural field, validation, evaluation) over a dataset.
/// Original mode bypasses the 3-D path: empty mask, default horizon,
/// attenuation off, no motion compensation.
PipelineResult run_pipeline(const Dataset& dataset, const RunConfig& config,
                            const PipelineOptions& options);

/// Writes the blob/mask/horizon overlay for one frame.
void write_annotation(const std::filesystem::path& path, const Keyframe& kf, const Detection& detection,
                      const MaskRaster& mask, int h_max, int factor);

}  // namespace trail
