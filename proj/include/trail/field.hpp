#pragma once

#include "trail/raster.hpp"
#include "trail/swarm.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace trail {

/// Persistent activity raster integrating saliency across frames.
struct NeuralField {
    FloatRaster activity;
    int frame_index = -1;

    NeuralField() = default;
    NeuralField(int w, int h) : activity(w, h, 0.0) {}
};

/// Largest super-threshold 4-connected component of the field.
struct Detection {
    std::vector<std::pair<int, int>> blob;  // (x, y) pixels
    std::pair<double, double> centroid{0.0, 0.0};
    bool present = false;
};

/// One field update: (1) motion-compensate by the detector-resolution
/// homography (bilinear, zero outside), (2) evaporate and inject saliency,
/// (3) subtract global inhibition and clamp to [0,1], (4) attenuate masked
/// pixels by attenuation_gamma.
NeuralField update_field(const NeuralField& field, const FloatRaster& saliency,
                         const Eigen::Matrix3d& homography, const MaskRaster& mask,
                         const SwarmParams& params);

Detection extract_path(const NeuralField& field, double blob_threshold);

}  // namespace trail
