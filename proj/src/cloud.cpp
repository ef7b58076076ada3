#include "trail/cloud.hpp"

#include "trail/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace trail {

namespace {

std::vector<Eigen::Vector3d> positions_of(const PointCloud& c) {
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(c.points.size());
    for (const ColoredPoint& p : c.points) pts.push_back(p.position);
    return pts;
}

/// Canonical up orientation: flip so y <= 0, with deterministic
/// tie-breaking for vertical-surface normals (y == 0).
void orient_up(Eigen::Vector3d& n) {
    if (n.y() > 0.0) {
        n = -n;
    } else if (n.y() == 0.0) {
        if (n.z() > 0.0 || (n.z() == 0.0 && n.x() > 0.0)) n = -n;
    }
}

}  // namespace

double point_plane_distance(const Eigen::Vector3d& p, const GroundPlane& plane) {
    return plane.a * p.x() + plane.b * p.y() + plane.c * p.z() + plane.d;
}

PointCloud CloudWindow::accumulate(int keyframe_index, const PointCloud& local, const Pose& pose) {
    PointCloud world = transform_cloud(local, pose, CloudFrame::World);
    entries_.emplace_back(keyframe_index, std::move(world));
    while (static_cast<int>(entries_.size()) > window_size_ + 1) entries_.pop_front();

    PointCloud accumulated;
    accumulated.frame = CloudFrame::World;
    size_t total = 0;
    for (const auto& [idx, cloud] : entries_) total += cloud.points.size();
    accumulated.points.reserve(total);
    for (const auto& [idx, cloud] : entries_) {
        accumulated.points.insert(accumulated.points.end(), cloud.points.begin(), cloud.points.end());
    }
    return accumulated;
}

OutlierResult remove_outliers(const PointCloud& c, const FilterParams& params) {
    const int k = params.outlier_k;
    const int n = static_cast<int>(c.points.size());
    if (n < k + 1) return {c, true};

    KdTree3 tree(positions_of(c));
    std::vector<double> mean_dist(n, 0.0);
    for (int i = 0; i < n; ++i) {
        std::vector<int> nb = tree.knn(c.points[i].position, k, i);
        double sum = 0.0;
        for (int j : nb) sum += (c.points[i].position - c.points[j].position).norm();
        mean_dist[i] = sum / static_cast<double>(nb.size());
    }

    double mean = 0.0;
    for (double d : mean_dist) mean += d;
    mean /= n;
    double var = 0.0;
    for (double d : mean_dist) var += (d - mean) * (d - mean);
    double stddev = std::sqrt(var / n);
    double threshold = mean + params.outlier_stddev_mult * stddev;

    OutlierResult out;
    out.cloud.frame = c.frame;
    out.cloud.points.reserve(c.points.size());
    for (int i = 0; i < n; ++i) {
        if (mean_dist[i] <= threshold) out.cloud.points.push_back(c.points[i]);
    }
    return out;
}

NormalField estimate_normals(const PointCloud& c, double radius) {
    const int n = static_cast<int>(c.points.size());
    NormalField field;
    field.normals.assign(n, Eigen::Vector3d::Zero());
    field.valid.assign(n, 0);
    if (n == 0) return field;

    KdTree3 tree(positions_of(c));
    for (int i = 0; i < n; ++i) {
        std::vector<int> nb = tree.radius_search(c.points[i].position, radius);
        if (nb.size() < 3) continue;

        Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
        for (int j : nb) centroid += c.points[j].position;
        centroid /= static_cast<double>(nb.size());

        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (int j : nb) {
            Eigen::Vector3d d = c.points[j].position - centroid;
            cov += d * d.transpose();
        }

        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
        const Eigen::Vector3d& evals = solver.eigenvalues();  // ascending
        // Collinear or duplicate neighborhoods have no usable second axis.
        if (!(evals(2) > 0.0) || evals(1) <= 1e-9 * evals(2)) continue;

        Eigen::Vector3d normal = solver.eigenvectors().col(0);
        normal.normalize();
        orient_up(normal);
        field.normals[i] = normal;
        field.valid[i] = 1;
    }
    return field;
}

DonSplit don_and_up_filter(const PointCloud& c, const FilterParams& params) {
    NormalField small = estimate_normals(c, params.don_radius_small);
    NormalField large = estimate_normals(c, params.don_radius_large);
    NormalField plane_scale = params.normal_radius == params.don_radius_large
                                  ? large
                                  : estimate_normals(c, params.normal_radius);

    const double up_cos = std::cos(params.normal_up_max_angle_deg * M_PI / 180.0);
    const Eigen::Vector3d up(0.0, -1.0, 0.0);

    DonSplit split;
    split.plane_candidates.frame = c.frame;
    split.obstacle_candidates.frame = c.frame;
    for (int i = 0; i < static_cast<int>(c.points.size()); ++i) {
        if (!small.valid[i] || !large.valid[i]) {
            // Normals not computable at both radii: unusable for plane
            // fitting but kept as potential obstacle structure.
            split.obstacle_candidates.points.push_back(c.points[i]);
            split.obstacle_source.push_back(i);
            continue;
        }
        Eigen::Vector3d don = 0.5 * (small.normals[i] - large.normals[i]);
        if (don.norm() > params.don_magnitude_max) continue;  // scale-unstable surface

        split.obstacle_candidates.points.push_back(c.points[i]);
        split.obstacle_source.push_back(i);

        if (plane_scale.valid[i] && plane_scale.normals[i].dot(up) >= up_cos) {
            split.plane_candidates.points.push_back(c.points[i]);
            split.plane_normals.normals.push_back(plane_scale.normals[i]);
            split.plane_normals.valid.push_back(1);
            split.plane_source.push_back(i);
        }
    }
    return split;
}

namespace {

struct PlaneModel {
    Eigen::Vector3d normal;
    double d;
};

std::optional<PlaneModel> plane_from_points(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                            const Eigen::Vector3d& p2) {
    Eigen::Vector3d n = (p1 - p0).cross(p2 - p0);
    double len = n.norm();
    if (len < 1e-12) return std::nullopt;
    n /= len;
    orient_up(n);
    return PlaneModel{n, -n.dot(p0)};
}

PlaneModel least_squares_plane(const PointCloud& cloud, const std::vector<int>& indices) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i : indices) centroid += cloud.points[i].position;
    centroid /= static_cast<double>(indices.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int i : indices) {
        Eigen::Vector3d d = cloud.points[i].position - centroid;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    Eigen::Vector3d n = solver.eigenvectors().col(0);
    n.normalize();
    orient_up(n);
    return PlaneModel{n, -n.dot(centroid)};
}

}  // namespace

std::optional<PlaneFit> fit_ground_plane(const PointCloud& candidates, const NormalField& normals,
                                         const FilterParams& params, std::uint64_t rng_seed) {
    const int n = static_cast<int>(candidates.points.size());
    if (n < 3) return std::nullopt;

    const double gamma = params.ransac_inlier_gamma;
    const double normal_cos = std::cos(params.normal_up_max_angle_deg * M_PI / 180.0);

    std::mt19937_64 rng(rng_seed);
    std::uniform_int_distribution<int> pick(0, n - 1);

    int best_count = 0;
    double best_mean = 0.0;
    PlaneModel best_model{Eigen::Vector3d(0, -1, 0), 0.0};
    bool have_best = false;

    std::vector<int> inliers;
    for (int iter = 0; iter < params.ransac_iterations; ++iter) {
        int i0 = pick(rng), i1 = pick(rng), i2 = pick(rng);
        if (i0 == i1 || i0 == i2 || i1 == i2) continue;
        auto model = plane_from_points(candidates.points[i0].position, candidates.points[i1].position,
                                       candidates.points[i2].position);
        if (!model) continue;

        inliers.clear();
        double dist_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            double dist = model->normal.dot(candidates.points[i].position) + model->d;
            if (std::abs(dist) >= gamma) continue;
            if (!normals.valid[i] || normals.normals[i].dot(model->normal) < normal_cos) continue;
            inliers.push_back(i);
            dist_sum += std::abs(dist);
        }
        int count = static_cast<int>(inliers.size());
        if (count < 3) continue;
        double mean = dist_sum / count;
        if (!have_best || count > best_count || (count == best_count && mean < best_mean)) {
            have_best = true;
            best_count = count;
            best_mean = mean;
            best_model = *model;
        }
    }
    if (!have_best) return std::nullopt;

    // Recover the winner's inlier set, refine by least squares, and
    // recompute the inlier statistics against the refined plane.
    inliers.clear();
    for (int i = 0; i < n; ++i) {
        double dist = best_model.normal.dot(candidates.points[i].position) + best_model.d;
        if (std::abs(dist) >= gamma) continue;
        if (!normals.valid[i] || normals.normals[i].dot(best_model.normal) < normal_cos) continue;
        inliers.push_back(i);
    }
    PlaneModel refined = least_squares_plane(candidates, inliers);

    PlaneFit fit;
    fit.plane.a = refined.normal.x();
    fit.plane.b = refined.normal.y();
    fit.plane.c = refined.normal.z();
    fit.plane.d = refined.d;
    fit.plane.inlier_count = static_cast<int>(inliers.size());
    double dist_sum = 0.0;
    for (int i : inliers) dist_sum += std::abs(point_plane_distance(candidates.points[i].position, fit.plane));
    fit.plane.inlier_mean_dist = dist_sum / static_cast<double>(inliers.size());
    fit.inlier_indices = std::move(inliers);
    return fit;
}

PointCloud segment_obstacles(const PointCloud& obstacle_candidates, const GroundPlane& plane,
                             const FilterParams& params, const std::vector<int>& exclude) {
    const double threshold = params.obstacle_margin_upsilon + plane.inlier_mean_dist;
    std::vector<std::uint8_t> excluded(obstacle_candidates.points.size(), 0);
    for (int i : exclude) {
        if (i >= 0 && i < static_cast<int>(excluded.size())) excluded[i] = 1;
    }

    PointCloud out;
    out.frame = obstacle_candidates.frame;
    for (int i = 0; i < static_cast<int>(obstacle_candidates.points.size()); ++i) {
        if (excluded[i]) continue;
        if (point_plane_distance(obstacle_candidates.points[i].position, plane) > threshold) {
            out.points.push_back(obstacle_candidates.points[i]);
        }
    }
    return out;
}

int ObstacleMask::set_bits() const {
    int count = 0;
    for (std::uint8_t b : bits.data) count += b != 0;
    return count;
}

ObstacleMask build_obstacle_mask(const PointCloud& local_obstacles, const Intrinsics& k,
                                 int detector_width, int detector_height, int inflate_radius) {
    if (detector_width <= 0 || detector_height <= 0 || k.width % detector_width != 0 ||
        k.height % detector_height != 0 || k.width / detector_width != k.height / detector_height) {
        throw std::invalid_argument("detector size must divide the camera resolution evenly");
    }
    const int factor = k.width / detector_width;

    Raster<int> full(k.width, k.height, 0);
    for (const ColoredPoint& p : local_obstacles.points) {
        std::optional<Pixel> px = project_point(p.position, k);
        if (!px) continue;
        full.at(static_cast<int>(px->u), static_cast<int>(px->v)) += 1;
    }

    ObstacleMask mask(detector_width, detector_height);
    mask.counts = dilate_square(block_reduce_max(full, factor), inflate_radius);
    for (size_t i = 0; i < mask.counts.data.size(); ++i) {
        mask.bits.data[i] = mask.counts.data[i] >= 1 ? 1 : 0;
    }
    return mask;
}

double estimate_pitch_deg(const GroundPlane& local_plane) {
    // Up-oriented normal of level ground is (0,-1,0); a camera pitched
    // down by theta sees it as (0,-cos,-sin), hence theta = asin(-c).
    double c = std::clamp(local_plane.c, -1.0, 1.0);
    return std::asin(-c) * 180.0 / M_PI;
}

}  // namespace trail
