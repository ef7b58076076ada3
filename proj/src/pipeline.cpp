#include "trail/pipeline.hpp"

#include "trail/appearance.hpp"
#include "trail/conspicuity.hpp"
#include "trail/evaluate.hpp"
#include "trail/homography.hpp"
#include "trail/swarm.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <unordered_set>

using nlohmann::json;

namespace trail {

RunMode run_mode_from_string(const std::string& name) {
    if (name == "full") return RunMode::Full;
    if (name == "original") return RunMode::Original;
    throw ConfigError("unknown mode: " + name + " (expected full or original)");
}

std::string run_mode_name(RunMode mode) {
    return mode == RunMode::Full ? "full" : "original";
}

std::string FrameReport::to_json_line() const {
    json j;
    j["type"] = "frame";
    j["index"] = index;
    j["plane"] = plane ? json(*plane) : json(nullptr);
    j["pitch_deg"] = pitch_deg ? json(*pitch_deg) : json(nullptr);
    j["h_max"] = h_max;
    j["obstacle_pixels"] = obstacle_pixels;
    j["detection"] = detection_centroid
                         ? json{{"centroid", {detection_centroid->first, detection_centroid->second}}}
                         : json(nullptr);
    j["verdict"] = verdict;
    j["cause"] = cause;
    j["overlap_fraction"] = overlap_fraction;
    j["eval"] = eval;
    if (cloud_ms) j["cloud_ms"] = *cloud_ms;
    if (detector_ms) j["detector_ms"] = *detector_ms;
    if (total_ms) j["total_ms"] = *total_ms;
    return j.dump();
}

namespace {

PointCloud backproject_keyframe(const Keyframe& kf, const Intrinsics& k, int stride) {
    PointCloud cloud;
    cloud.frame = CloudFrame::Local;
    for (int v = 0; v < kf.depth.height; v += stride) {
        for (int u = 0; u < kf.depth.width; u += stride) {
            float d = kf.depth.at(u, v);
            if (!(d > 0.0f) || !std::isfinite(d)) continue;
            cloud.points.push_back({backproject(u, v, d, k), kf.rgb.at(u, v)});
        }
    }
    return cloud;
}

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void write_annotation(const std::filesystem::path& path, const Keyframe& kf, const Detection& detection,
                      const MaskRaster& mask, int h_max, int factor) {
    Raster<Rgb8> image = kf.rgb;
    auto blend = [&](int x, int y, int r, int g, int b) {
        Rgb8& px = image.at(x, y);
        px.r = static_cast<std::uint8_t>((px.r + r) / 2);
        px.g = static_cast<std::uint8_t>((px.g + g) / 2);
        px.b = static_cast<std::uint8_t>((px.b + b) / 2);
    };
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            for (int dy = 0; dy < factor; ++dy) {
                for (int dx = 0; dx < factor; ++dx) blend(x * factor + dx, y * factor + dy, 40, 90, 255);
            }
        }
    }
    for (auto [x, y] : detection.blob) {
        for (int dy = 0; dy < factor; ++dy) {
            for (int dx = 0; dx < factor; ++dx) blend(x * factor + dx, y * factor + dy, 255, 40, 40);
        }
    }
    int horizon_full = std::clamp(h_max * factor, 0, image.height - 1);
    for (int x = 0; x < image.width; ++x) image.at(x, horizon_full) = {60, 220, 60};
    write_ppm(path, image);
}

PipelineResult run_pipeline(const Dataset& dataset, const RunConfig& config,
                            const PipelineOptions& options) {
    const Intrinsics& k = dataset.intrinsics;
    const int det_w = config.detector_width;
    const int det_h = config.detector_height;
    if (det_w <= 0 || det_h <= 0 || k.width % det_w != 0 || k.height % det_h != 0 ||
        k.width / det_w != k.height / det_h) {
        throw DataError("detector resolution must divide the camera resolution evenly");
    }
    const int factor = k.width / det_w;
    if (dataset.has_ground_truth && !dataset.gt_trail.empty() &&
        (dataset.gt_trail.front().width != det_w || dataset.gt_trail.front().height != det_h)) {
        throw DataError("ground-truth masks do not match the configured detector resolution");
    }

    SwarmParams swarm = config.swarm;
    if (options.mode == RunMode::Original) swarm.attenuation_gamma = 1.0;

    if (options.annotate_dir) std::filesystem::create_directories(*options.annotate_dir);

    CloudWindow window(config.window_size);
    PheromonePair pheromone(det_w, det_h);
    NeuralField field(det_w, det_h);
    AppearanceModel appearance(swarm.appearance_bins);
    Pose prev_pose;
    bool have_prev = false;

    PipelineResult result;
    json header;
    header["type"] = "header";
    header["mode"] = run_mode_name(options.mode);
    header["dataset"] = dataset.name;
    header["config"] = config_to_json(config);
    result.report_jsonl = header.dump() + "\n";

    double overlap_sum = 0.0;
    for (const Keyframe& kf : dataset.frames) {
        auto t_start = std::chrono::steady_clock::now();

        FrameReport report;
        report.index = kf.index;

        // --- 3-D path: accumulate, filter, fit, segment, project. ---
        std::optional<PlaneFit> fit;
        ObstacleMask mask(det_w, det_h);
        int h_max = swarm.h_max_default;
        if (options.mode == RunMode::Full) {
            PointCloud local = backproject_keyframe(kf, k, config.cloud_stride);
            PointCloud world = window.accumulate(kf.index, local, kf.pose);
            PointCloud accumulated = transform_cloud(world, invert_pose(kf.pose), CloudFrame::Local);
            OutlierResult filtered = remove_outliers(accumulated, config.filters);
            DonSplit split = don_and_up_filter(filtered.cloud, config.filters);
            fit = fit_ground_plane(split.plane_candidates, split.plane_normals, config.filters,
                                   swarm.rng_seed);
            if (fit) {
                // Plane inliers may not double as obstacles.
                std::unordered_set<int> inlier_sources;
                for (int idx : fit->inlier_indices) inlier_sources.insert(split.plane_source[idx]);
                std::vector<int> exclude;
                for (size_t i = 0; i < split.obstacle_source.size(); ++i) {
                    if (inlier_sources.count(split.obstacle_source[i])) {
                        exclude.push_back(static_cast<int>(i));
                    }
                }
                PointCloud obstacles =
                    segment_obstacles(split.obstacle_candidates, fit->plane, config.filters, exclude);
                mask = build_obstacle_mask(obstacles, k, det_w, det_h, config.mask_inflate_radius);
                double pitch = estimate_pitch_deg(fit->plane);
                h_max = horizon_row(pitch, k, det_w, det_h);
                report.plane = {{fit->plane.a, fit->plane.b, fit->plane.c, fit->plane.d}};
                report.pitch_deg = pitch;
            }
        }
        double cloud_ms = ms_since(t_start);

        // --- Detector: conspicuity, swarm, field, blob. ---
        RgbImage rgb = downsample_box(to_rgb_image(kf.rgb), factor);
        ConspicuityMaps maps = conspicuity(rgb, det_w, det_h);
        PheromonePair deposits = run_swarm(maps, mask.bits, appearance, rgb, pheromone, swarm, h_max);
        FloatRaster saliency = combine_pheromone(deposits.color, deposits.intensity);

        Eigen::Matrix3d h_det = Eigen::Matrix3d::Identity();
        if (options.mode == RunMode::Full && have_prev && fit) {
            HomographyResult hres = pose_homography(prev_pose, kf.pose, fit->plane, k);
            if (!hres.degenerate) {
                h_det = scale_homography(hres.H, static_cast<double>(det_w) / k.width,
                                         static_cast<double>(det_h) / k.height);
            }
        }
        field = update_field(field, saliency, h_det, mask.bits, swarm);
        Detection detection = extract_path(field, swarm.blob_threshold);
        appearance = update_appearance(appearance, rgb, detection);

        ValidationReport validation =
            validate(field, mask, detection, config.validator_nu, config.suspect_frac,
                     config.invalid_frac, options.mode == RunMode::Full && !fit);

        report.h_max = h_max;
        report.obstacle_pixels = mask.set_bits();
        if (detection.present) report.detection_centroid = detection.centroid;
        report.verdict = verdict_name(validation.verdict);
        report.cause = cause_name(validation.cause);
        report.overlap_fraction = validation.overlap_fraction;
        overlap_sum += validation.overlap_fraction;

        if (dataset.has_ground_truth) {
            FrameEvalResult eval =
                evaluate_frame(field.activity, dataset.gt_trail[kf.index], config);
            report.eval = eval.success ? "success" : "failure";
            result.evaluated += 1;
            result.successes += eval.success ? 1 : 0;
        }

        if (options.annotate_dir) {
            char name[32];
            std::snprintf(name, sizeof(name), "%06d.ppm", kf.index);
            write_annotation(*options.annotate_dir / name, kf, detection, mask.bits, h_max, factor);
        }

        if (options.timings) {
            report.cloud_ms = cloud_ms;
            report.detector_ms = ms_since(t_start) - cloud_ms;
            report.total_ms = ms_since(t_start);
        }

        result.report_jsonl += report.to_json_line() + "\n";
        result.frames.push_back(std::move(report));
        result.detections.push_back(std::move(detection));

        pheromone = std::move(deposits);
        prev_pose = kf.pose;
        have_prev = true;
    }
    result.mean_overlap_fraction =
        dataset.frames.empty() ? 0.0 : overlap_sum / static_cast<double>(dataset.frames.size());
    return result;
}

}  // namespace trail
