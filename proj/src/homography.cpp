#include "trail/homography.hpp"

namespace trail {

namespace {

Eigen::Matrix3d intrinsics_matrix(const Intrinsics& k) {
    Eigen::Matrix3d m;
    m << k.fx, 0.0, k.cx, 0.0, k.fy, k.cy, 0.0, 0.0, 1.0;
    return m;
}

}  // namespace

GroundPlane plane_to_local(const GroundPlane& world_plane, const Pose& pose) {
    Eigen::Vector3d n = pose.rotation.transpose() * world_plane.normal();
    double d = world_plane.d + world_plane.normal().dot(pose.translation);
    if (n.y() > 0.0) {
        n = -n;
        d = -d;
    }
    GroundPlane out;
    out.a = n.x();
    out.b = n.y();
    out.c = n.z();
    out.d = d;
    out.inlier_mean_dist = world_plane.inlier_mean_dist;
    out.inlier_count = world_plane.inlier_count;
    return out;
}

HomographyResult pose_homography(const Pose& prev, const Pose& cur, const GroundPlane& plane_cur_local,
                                 const Intrinsics& k) {
    if (prev.rotation == cur.rotation && prev.translation == cur.translation) {
        return {Eigen::Matrix3d::Identity(), false};
    }

    // Relative transform taking previous-camera coordinates to current.
    Eigen::Matrix3d rel_r = cur.rotation.transpose() * prev.rotation;
    Eigen::Vector3d rel_t = cur.rotation.transpose() * (prev.translation - cur.translation);

    // Plane expressed in the previous camera frame.
    Eigen::Vector3d n_cur = plane_cur_local.normal();
    Eigen::Vector3d n_prev = rel_r.transpose() * n_cur;
    double d_prev = plane_cur_local.d + n_cur.dot(rel_t);
    if (std::abs(d_prev) < 1e-6) return {Eigen::Matrix3d::Identity(), true};

    Eigen::Matrix3d km = intrinsics_matrix(k);
    Eigen::Matrix3d h = km * (rel_r - rel_t * n_prev.transpose() / d_prev) * km.inverse();
    if (std::abs(h(2, 2)) < 1e-12) return {Eigen::Matrix3d::Identity(), true};
    return {h / h(2, 2), false};
}

Eigen::Matrix3d scale_homography(const Eigen::Matrix3d& h, double scale_x, double scale_y) {
    Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
    s(0, 0) = scale_x;
    s(1, 1) = scale_y;
    Eigen::Matrix3d inv = Eigen::Matrix3d::Identity();
    inv(0, 0) = 1.0 / scale_x;
    inv(1, 1) = 1.0 / scale_y;
    Eigen::Matrix3d out = s * h * inv;
    if (std::abs(out(2, 2)) > 1e-12) out /= out(2, 2);
    return out;
}

}  // namespace trail
