#pragma once

#include "trail/cloud.hpp"
#include "trail/geom.hpp"
#include "trail/raster.hpp"

#include <vector>

namespace trail {

/// One SLAM output unit: color, depth (meters, <=0 or NaN = missing) and
/// the camera-to-world pose.
struct Keyframe {
    int index = 0;
    Raster<Rgb8> rgb;
    Raster<float> depth;
    Pose pose;
};

/// A keyframe sequence with optional per-frame ground truth at detector
/// resolution.
struct Dataset {
    std::string name;
    Intrinsics intrinsics;
    std::vector<Keyframe> frames;

    bool has_ground_truth = false;
    std::vector<MaskRaster> gt_trail;       // 1 = trail
    std::vector<MaskRaster> gt_obstacle;    // 1 = obstacle silhouette
    GroundPlane gt_plane;                   // world frame
    std::vector<double> gt_pitch_deg;
};

}  // namespace trail
