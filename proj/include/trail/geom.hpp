#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace trail {

/// Pinhole camera parameters. Camera frame convention throughout the
/// project: +z forward (optical axis), +x right, +y down (image rows).
struct Intrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    bool valid() const {
        return fx > 0.0 && fy > 0.0 && width > 0 && height > 0 &&
               cx >= 0.0 && cx < width && cy >= 0.0 && cy < height;
    }
};

/// Rigid camera-to-world transform (rotation orthonormal, det +1).
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

    /// Orthonormality and properness check, tolerance on |R^T R - I| and |det - 1|.
    bool is_rigid(double tol = 1e-6) const;

    std::array<double, 16> to_matrix4() const;
    static Pose from_matrix4(const std::array<double, 16>& row_major);
};

Pose invert_pose(const Pose& s);
/// Composition a∘b: x -> a(b(x)).
Pose compose(const Pose& a, const Pose& b);

struct Rgb8 {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb8&) const = default;
};

struct ColoredPoint {
    Eigen::Vector3d position;
    Rgb8 color;
};

enum class CloudFrame { Local, World };

struct PointCloud {
    std::vector<ColoredPoint> points;
    CloudFrame frame = CloudFrame::Local;

    size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

struct Pixel {
    double u = 0.0;
    double v = 0.0;
};

/// Pinhole projection. Returns nullopt for points behind the camera or
/// projecting outside [0,width)x[0,height).
std::optional<Pixel> project_point(const Eigen::Vector3d& p, const Intrinsics& k);

/// Inverse of project_point at a given depth (z coordinate, meters).
Eigen::Vector3d backproject(double u, double v, double depth, const Intrinsics& k);

/// Applies a rigid transform to every point; colors and order preserved.
/// The caller declares the frame of the result.
PointCloud transform_cloud(const PointCloud& c, const Pose& s, CloudFrame result_frame);

}  // namespace trail
