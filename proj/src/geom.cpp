#include "trail/geom.hpp"

namespace trail {

bool Pose::is_rigid(double tol) const {
    Eigen::Matrix3d rtr = rotation.transpose() * rotation;
    if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(rotation.determinant() - 1.0) <= tol;
}

std::array<double, 16> Pose::to_matrix4() const {
    std::array<double, 16> m{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m[r * 4 + c] = rotation(r, c);
        m[r * 4 + 3] = translation(r);
    }
    m[12] = m[13] = m[14] = 0.0;
    m[15] = 1.0;
    return m;
}

Pose Pose::from_matrix4(const std::array<double, 16>& row_major) {
    Pose p;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) p.rotation(r, c) = row_major[r * 4 + c];
        p.translation(r) = row_major[r * 4 + 3];
    }
    return p;
}

Pose invert_pose(const Pose& s) {
    Pose inv;
    inv.rotation = s.rotation.transpose();
    inv.translation = -(inv.rotation * s.translation);
    return inv;
}

Pose compose(const Pose& a, const Pose& b) {
    Pose out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

std::optional<Pixel> project_point(const Eigen::Vector3d& p, const Intrinsics& k) {
    if (!(p.z() > 0.0)) return std::nullopt;
    double u = k.fx * p.x() / p.z() + k.cx;
    double v = k.fy * p.y() / p.z() + k.cy;
    if (u < 0.0 || u >= k.width || v < 0.0 || v >= k.height) return std::nullopt;
    return Pixel{u, v};
}

Eigen::Vector3d backproject(double u, double v, double depth, const Intrinsics& k) {
    return {(u - k.cx) * depth / k.fx, (v - k.cy) * depth / k.fy, depth};
}

PointCloud transform_cloud(const PointCloud& c, const Pose& s, CloudFrame result_frame) {
    PointCloud out;
    out.frame = result_frame;
    out.points.reserve(c.points.size());
    for (const ColoredPoint& p : c.points) {
        out.points.push_back({s.apply(p.position), p.color});
    }
    return out;
}

}  // namespace trail
