#pragma once

#include "trail/geom.hpp"
#include "trail/raster.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

namespace trail {

/// Tuning knobs for the point-cloud stages. Defaults are the documented
/// values used by the standard configuration.
struct FilterParams {
    int outlier_k = 10;                    // neighbors for statistical removal
    double outlier_stddev_mult = 1.0;
    double normal_radius = 0.35;           // meters, plane-fit normals
    double don_radius_small = 0.10;        // meters
    double don_radius_large = 0.35;        // meters
    double normal_up_max_angle_deg = 30.0; // max angle from vertical
    double don_magnitude_max = 0.25;       // in [0,2]
    int ransac_iterations = 300;
    double ransac_inlier_gamma = 0.05;     // meters, inlier distance threshold
    double obstacle_margin_upsilon = 0.10; // meters, safety margin above plane
};

/// Ground plane ax+by+cz+d=0 with unit normal (a,b,c) oriented toward the
/// camera's up half-space (negative y).
struct GroundPlane {
    double a = 0.0, b = -1.0, c = 0.0, d = 0.0;
    double inlier_mean_dist = 0.0;  // mean |signed distance| of the fit inliers
    int inlier_count = 0;

    Eigen::Vector3d normal() const { return {a, b, c}; }
};

/// Signed point-to-plane distance; positive on the up (camera) side.
double point_plane_distance(const Eigen::Vector3d& p, const GroundPlane& plane);

/// Sliding window of the n most recent past keyframe clouds plus the
/// current one, all in world frame.
class CloudWindow {
public:
    explicit CloudWindow(int window_size) : window_size_(window_size) {}

    /// Transforms `local` to world with `pose`, appends it, evicts entries
    /// beyond window_size+1, and returns the accumulated world cloud.
    PointCloud accumulate(int keyframe_index, const PointCloud& local, const Pose& pose);

    int window_size() const { return window_size_; }
    size_t entry_count() const { return entries_.size(); }

private:
    int window_size_;
    std::deque<std::pair<int, PointCloud>> entries_;
};

struct OutlierResult {
    PointCloud cloud;
    bool passthrough = false;  // too few points to filter
};

/// Statistical outlier removal: keep p iff its mean distance to the k
/// nearest neighbors is within mean + mult*stddev of the cloud-wide stats.
OutlierResult remove_outliers(const PointCloud& c, const FilterParams& params);

struct NormalField {
    std::vector<Eigen::Vector3d> normals;
    std::vector<std::uint8_t> valid;  // 0 = null normal (degenerate neighborhood)
};

/// Per-point normals from the neighborhood covariance within `radius`,
/// oriented so the camera-frame y component is <= 0 (pointing up).
NormalField estimate_normals(const PointCloud& c, double radius);

/// Output of the DoN + orientation split.
struct DonSplit {
    PointCloud plane_candidates;       // scale-stable, up-facing points
    NormalField plane_normals;         // normals of plane_candidates (at normal_radius)
    std::vector<int> plane_source;     // index of each candidate in the input cloud
    PointCloud obstacle_candidates;    // scale-stable points, any orientation
    std::vector<int> obstacle_source;  // index of each candidate in the input cloud
};

DonSplit don_and_up_filter(const PointCloud& c, const FilterParams& params);

struct PlaneFit {
    GroundPlane plane;
    std::vector<int> inlier_indices;  // into the candidate cloud
};

/// RANSAC plane fit over 3-point samples; inliers require both distance
/// below gamma and a normal close to the plane normal. The winner is
/// refined by least squares over its inliers. Returns nullopt on failure
/// (fewer than 3 candidates or no sample with >= 3 inliers).
std::optional<PlaneFit> fit_ground_plane(const PointCloud& candidates, const NormalField& normals,
                                         const FilterParams& params, std::uint64_t rng_seed);

/// Points strictly higher above the plane than upsilon + inlier mean
/// distance. `exclude` lists candidate indices that may not become
/// obstacles (the plane inliers, keeping the two sets disjoint).
PointCloud segment_obstacles(const PointCloud& obstacle_candidates, const GroundPlane& plane,
                             const FilterParams& params, const std::vector<int>& exclude = {});

struct ObstacleMask {
    int width = 0;
    int height = 0;
    MaskRaster bits;        // 1 = obstacle
    Raster<int> counts;     // projected-point counts after reduction/inflation

    ObstacleMask() = default;
    ObstacleMask(int w, int h) : width(w), height(h), bits(w, h, 0), counts(w, h, 0) {}
    int set_bits() const;
};

/// Projects a local-frame obstacle cloud at full camera resolution,
/// block-max reduces to detector resolution, inflates by a square
/// structuring element, and binarizes.
ObstacleMask build_obstacle_mask(const PointCloud& local_obstacles, const Intrinsics& k,
                                 int detector_width, int detector_height, int inflate_radius);

/// Camera pitch (degrees) from a camera-local ground plane; positive means
/// pitched down toward the plane.
double estimate_pitch_deg(const GroundPlane& local_plane);

}  // namespace trail
