#pragma once

#include "trail/keyframe.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace trail {

/// World frame convention: y down (matching the camera at identity pose),
/// nominal ground plane y = 0, up = -y. Obstacles stand on the ground and
/// extend to y = -height.

struct TrailSpec {
    std::vector<Eigen::Vector2d> centerline;  // (x, z) on the ground
    double width = 1.2;
    Eigen::Vector3d albedo{0.56, 0.46, 0.33};
};

struct TerrainSpec {
    Eigen::Vector3d albedo{0.24, 0.40, 0.18};
    double texture_amplitude = 0.45;  // multiplicative value-noise strength
    double texture_cell = 0.35;       // meters per noise lattice cell
};

struct CylinderSpec {
    Eigen::Vector2d center;
    double radius = 0.3;
    double height = 3.0;
    Eigen::Vector3d albedo{0.14, 0.11, 0.08};
};

struct BoxSpec {
    Eigen::Vector2d center;
    double half_x = 0.5;
    double half_z = 0.5;
    double height = 0.8;
    Eigen::Vector3d albedo{0.20, 0.24, 0.10};
};

struct NoiseSpec {
    double depth_sigma = 0.01;   // meters, applied on inverse depth
    double dropout = 0.05;       // fraction of depth pixels dropped
    double image_sigma = 0.01;   // per-channel color noise in [0,1]
};

struct GroundWave {
    double amplitude = 0.0;   // meters; 0 = flat plane
    double wavelength = 8.0;  // meters
};

struct SceneSpec {
    std::string name;
    Intrinsics intrinsics;
    int detector_width = 80;
    int detector_height = 60;
    TrailSpec trail;
    TerrainSpec terrain;
    std::vector<CylinderSpec> cylinders;
    std::vector<BoxSpec> shrubs;
    std::vector<BoxSpec> distractors;  // raised high-contrast off-trail patches
    std::vector<Pose> camera_path;
    std::vector<double> pitch_deg;  // per frame, matches camera_path
    NoiseSpec noise;
    GroundWave undulation;
    double max_depth = 12.0;  // depth pixels beyond this are censored
    std::uint64_t seed = 1;
};

enum class SurfaceLabel : std::uint8_t { Sky = 0, Ground = 1, Trail = 2, Obstacle = 3 };

/// Throws std::invalid_argument when the spec violates its invariants
/// (degenerate trail, camera below ground, obstacles on the corridor...).
void validate_spec(const SceneSpec& spec);

/// Ray-casts every frame of the spec into a dataset with ground truth.
/// Deterministic per (seed, frame index); frames carry poses verbatim.
Dataset render_sequence(const SceneSpec& spec);

/// Noise-free geometric label of each pixel at full resolution.
Raster<std::uint8_t> render_label_raster(const SceneSpec& spec, int frame_index);

/// Camera-to-world pose at `position`, heading `yaw_deg` around the
/// vertical and pitched down by `pitch_deg`.
Pose make_camera_pose(const Eigen::Vector3d& position, double yaw_deg, double pitch_deg);

/// The five fixed scene suites (S1..S5) used by the experiments.
std::vector<SceneSpec> standard_suites(std::uint64_t seed);

}  // namespace trail
