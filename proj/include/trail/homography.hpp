#pragma once

#include "trail/cloud.hpp"
#include "trail/geom.hpp"

#include <Eigen/Dense>

namespace trail {

struct HomographyResult {
    Eigen::Matrix3d H = Eigen::Matrix3d::Identity();
    bool degenerate = false;
};

/// Planar homography mapping previous-frame pixels of ground-plane points
/// to current-frame pixels, derived from the two poses and the plane
/// fitted in the current camera frame. Returns the identity (flagged)
/// when the plane passes through the previous camera center.
HomographyResult pose_homography(const Pose& prev, const Pose& cur, const GroundPlane& plane_cur_local,
                                 const Intrinsics& k);

/// Conjugates a full-resolution homography into a scaled pixel grid.
Eigen::Matrix3d scale_homography(const Eigen::Matrix3d& h, double scale_x, double scale_y);

/// Expresses a world-frame plane in the local frame of `pose`.
GroundPlane plane_to_local(const GroundPlane& world_plane, const Pose& pose);

}  // namespace trail
