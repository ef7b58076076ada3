#include "trail/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace trail {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Eigen::Vector3d kSkyColor{0.62, 0.72, 0.85};
const Eigen::Vector3d kLightDir = Eigen::Vector3d(0.3, -0.9, 0.2).normalized();

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double lattice_value(int ix, int iz, uint64_t seed) {
    uint64_t key = (static_cast<uint64_t>(static_cast<uint32_t>(ix)) << 32) |
                   static_cast<uint64_t>(static_cast<uint32_t>(iz));
    return static_cast<double>(splitmix64(seed ^ splitmix64(key)) >> 11) * 0x1.0p-53;
}

/// Smooth value noise in [0,1], world-anchored.
double value_noise(double x, double z, double cell, uint64_t seed) {
    double fx = x / cell, fz = z / cell;
    int ix = static_cast<int>(std::floor(fx));
    int iz = static_cast<int>(std::floor(fz));
    double tx = fx - ix, tz = fz - iz;
    double v00 = lattice_value(ix, iz, seed);
    double v10 = lattice_value(ix + 1, iz, seed);
    double v01 = lattice_value(ix, iz + 1, seed);
    double v11 = lattice_value(ix + 1, iz + 1, seed);
    return (v00 * (1 - tx) + v10 * tx) * (1 - tz) + (v01 * (1 - tx) + v11 * tx) * tz;
}

double segment_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
    Eigen::Vector2d ab = b - a;
    double len2 = ab.squaredNorm();
    if (len2 < 1e-18) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double polyline_distance(const std::vector<Eigen::Vector2d>& line, const Eigen::Vector2d& p) {
    double best = std::numeric_limits<double>::max();
    for (size_t i = 0; i + 1 < line.size(); ++i) {
        best = std::min(best, segment_distance(line[i], line[i + 1], p));
    }
    return best;
}

double rect_sdf(const Eigen::Vector2d& center, double hx, double hz, const Eigen::Vector2d& p) {
    double dx = std::max(std::abs(p.x() - center.x()) - hx, 0.0);
    double dz = std::max(std::abs(p.y() - center.y()) - hz, 0.0);
    return std::hypot(dx, dz);
}

std::vector<Eigen::Vector2d> sample_polyline(const std::vector<Eigen::Vector2d>& line, double step) {
    std::vector<Eigen::Vector2d> out;
    for (size_t i = 0; i + 1 < line.size(); ++i) {
        Eigen::Vector2d a = line[i], b = line[i + 1];
        double len = (b - a).norm();
        int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int j = 0; j < n; ++j) out.push_back(a + (b - a) * (static_cast<double>(j) / n));
    }
    out.push_back(line.back());
    return out;
}

struct Hit {
    double t = std::numeric_limits<double>::max();
    SurfaceLabel label = SurfaceLabel::Sky;
    Eigen::Vector3d albedo = Eigen::Vector3d::Zero();
    Eigen::Vector3d normal = Eigen::Vector3d(0, -1, 0);
};

double ground_height(const SceneSpec& spec, double x, double z) {
    if (spec.undulation.amplitude == 0.0) return 0.0;
    double w = 2.0 * kPi / spec.undulation.wavelength;
    return -spec.undulation.amplitude * std::sin(w * x) * std::cos(w * z);
}

/// Ray parameter of the ground hit; the ray is (o + t*d) with d.z scaled
/// so t equals camera z-depth. Returns false if the ray misses.
bool intersect_ground(const SceneSpec& spec, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                      double& t_out) {
    if (spec.undulation.amplitude == 0.0) {
        if (d.y() <= 1e-12) return false;
        double t = -o.y() / d.y();
        if (t <= 1e-9) return false;
        t_out = t;
        return true;
    }
    // March with geometrically growing steps, then bisect.
    auto above = [&](double t) {
        Eigen::Vector3d p = o + t * d;
        return p.y() - ground_height(spec, p.x(), p.z());  // negative while above
    };
    double t_prev = 1e-3;
    double f_prev = above(t_prev);
    if (f_prev >= 0.0) return false;  // starts at/under the surface
    double step = 0.05;
    for (double t = t_prev + step; t < 400.0; t += step, step *= 1.04) {
        double f = above(t);
        if (f >= 0.0) {
            double lo = t_prev, hi = t;
            for (int i = 0; i < 48; ++i) {
                double mid = 0.5 * (lo + hi);
                if (above(mid) >= 0.0) hi = mid;
                else lo = mid;
            }
            t_out = 0.5 * (lo + hi);
            return true;
        }
        t_prev = t;
        f_prev = f;
    }
    return false;
}

bool intersect_cylinder(const CylinderSpec& cyl, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                        double& t_out, Eigen::Vector3d& normal_out) {
    double ox = o.x() - cyl.center.x();
    double oz = o.z() - cyl.center.y();
    double a = d.x() * d.x() + d.z() * d.z();
    double best = std::numeric_limits<double>::max();
    bool found = false;
    if (a > 1e-15) {
        double b = 2.0 * (ox * d.x() + oz * d.z());
        double c = ox * ox + oz * oz - cyl.radius * cyl.radius;
        double disc = b * b - 4 * a * c;
        if (disc >= 0.0) {
            double sq = std::sqrt(disc);
            for (double t : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
                if (t <= 1e-9 || t >= best) continue;
                double y = o.y() + t * d.y();
                if (y < -cyl.height || y > 0.0) continue;
                best = t;
                found = true;
                Eigen::Vector3d p = o + t * d;
                normal_out = Eigen::Vector3d(p.x() - cyl.center.x(), 0.0, p.z() - cyl.center.y()).normalized();
            }
        }
    }
    // Top cap.
    if (std::abs(d.y()) > 1e-12) {
        double t = (-cyl.height - o.y()) / d.y();
        if (t > 1e-9 && t < best) {
            double px = o.x() + t * d.x() - cyl.center.x();
            double pz = o.z() + t * d.z() - cyl.center.y();
            if (px * px + pz * pz <= cyl.radius * cyl.radius) {
                best = t;
                found = true;
                normal_out = Eigen::Vector3d(0, -1, 0);
            }
        }
    }
    if (found) t_out = best;
    return found;
}

bool intersect_box(const BoxSpec& box, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                   double& t_out, Eigen::Vector3d& normal_out) {
    double lo[3] = {box.center.x() - box.half_x, -box.height, box.center.y() - box.half_z};
    double hi[3] = {box.center.x() + box.half_x, 0.0, box.center.y() + box.half_z};
    double t_enter = -std::numeric_limits<double>::max();
    double t_exit = std::numeric_limits<double>::max();
    int enter_axis = -1;
    for (int axis = 0; axis < 3; ++axis) {
        if (std::abs(d(axis)) < 1e-15) {
            if (o(axis) < lo[axis] || o(axis) > hi[axis]) return false;
            continue;
        }
        double t0 = (lo[axis] - o(axis)) / d(axis);
        double t1 = (hi[axis] - o(axis)) / d(axis);
        if (t0 > t1) std::swap(t0, t1);
        if (t0 > t_enter) {
            t_enter = t0;
            enter_axis = axis;
        }
        t_exit = std::min(t_exit, t1);
    }
    if (t_enter > t_exit || t_enter <= 1e-9 || enter_axis < 0) return false;
    t_out = t_enter;
    normal_out = Eigen::Vector3d::Zero();
    normal_out(enter_axis) = d(enter_axis) > 0 ? -1.0 : 1.0;
    return true;
}

Hit cast_ray(const SceneSpec& spec, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
    Hit hit;
    double t;
    Eigen::Vector3d n;
    if (intersect_ground(spec, o, d, t)) {
        hit.t = t;
        Eigen::Vector3d p = o + t * d;
        bool on_trail = polyline_distance(spec.trail.centerline, {p.x(), p.z()}) <= spec.trail.width * 0.5;
        hit.label = on_trail ? SurfaceLabel::Trail : SurfaceLabel::Ground;
        hit.normal = Eigen::Vector3d(0, -1, 0);
        if (on_trail) {
            hit.albedo = spec.trail.albedo;
        } else {
            double noise = value_noise(p.x(), p.z(), spec.terrain.texture_cell, spec.seed);
            hit.albedo = spec.terrain.albedo * (1.0 + spec.terrain.texture_amplitude * (2.0 * noise - 1.0));
        }
    }
    for (const CylinderSpec& cyl : spec.cylinders) {
        if (intersect_cylinder(cyl, o, d, t, n) && t < hit.t) {
            hit = {t, SurfaceLabel::Obstacle, cyl.albedo, n};
        }
    }
    auto try_boxes = [&](const std::vector<BoxSpec>& boxes) {
        for (const BoxSpec& box : boxes) {
            if (intersect_box(box, o, d, t, n) && t < hit.t) {
                hit = {t, SurfaceLabel::Obstacle, box.albedo, n};
            }
        }
    };
    try_boxes(spec.shrubs);
    try_boxes(spec.distractors);
    return hit;
}

Eigen::Vector3d shade(const Hit& hit) {
    double lambert = std::max(0.0, hit.normal.dot(kLightDir));
    return hit.albedo * (0.75 + 0.25 * lambert);
}

Raster<std::uint8_t> cast_labels(const SceneSpec& spec, const Pose& pose) {
    const Intrinsics& k = spec.intrinsics;
    Raster<std::uint8_t> labels(k.width, k.height, static_cast<std::uint8_t>(SurfaceLabel::Sky));
    for (int v = 0; v < k.height; ++v) {
        for (int u = 0; u < k.width; ++u) {
            Eigen::Vector3d dir_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
            Hit hit = cast_ray(spec, pose.translation, pose.rotation * dir_cam);
            if (hit.t < std::numeric_limits<double>::max()) {
                labels.at(u, v) = static_cast<std::uint8_t>(hit.label);
            }
        }
    }
    return labels;
}

/// Detector-resolution ground truth. Obstacle silhouette cells take the
/// majority label (ties broken obstacle > trail > ground > sky); trail
/// cells are any cell the sub-pixel trail passes through that is not an
/// obstacle cell, so the corridor stays meaningful up to the vanishing
/// point. The two masks are disjoint by construction.
MaskRaster reduce_label(const Raster<std::uint8_t>& labels, int factor, SurfaceLabel which) {
    MaskRaster out(labels.width / factor, labels.height / factor, 0);
    for (int by = 0; by < out.height; ++by) {
        for (int bx = 0; bx < out.width; ++bx) {
            int counts[4] = {0, 0, 0, 0};
            for (int dy = 0; dy < factor; ++dy) {
                for (int dx = 0; dx < factor; ++dx) {
                    counts[labels.at(bx * factor + dx, by * factor + dy)] += 1;
                }
            }
            static constexpr int order[4] = {3, 2, 1, 0};
            int winner = order[0];
            for (int c : order) {
                if (counts[c] > counts[winner]) winner = c;
            }
            bool is_obstacle = winner == static_cast<int>(SurfaceLabel::Obstacle);
            if (which == SurfaceLabel::Obstacle) {
                out.at(bx, by) = is_obstacle ? 1 : 0;
            } else if (which == SurfaceLabel::Trail) {
                out.at(bx, by) = !is_obstacle && counts[static_cast<int>(SurfaceLabel::Trail)] > 0 ? 1 : 0;
            } else {
                out.at(bx, by) = winner == static_cast<int>(which) ? 1 : 0;
            }
        }
    }
    return out;
}

}  // namespace

Pose make_camera_pose(const Eigen::Vector3d& position, double yaw_deg, double pitch_deg) {
    double yaw = yaw_deg * kPi / 180.0;
    double pitch = pitch_deg * kPi / 180.0;
    Eigen::Matrix3d ry;
    ry << std::cos(yaw), 0, std::sin(yaw), 0, 1, 0, -std::sin(yaw), 0, std::cos(yaw);
    Eigen::Matrix3d rp;  // pitch-down rotation about the camera x axis
    rp << 1, 0, 0, 0, std::cos(pitch), std::sin(pitch), 0, -std::sin(pitch), std::cos(pitch);
    Pose pose;
    pose.rotation = ry * rp;
    pose.translation = position;
    return pose;
}

void validate_spec(const SceneSpec& spec) {
    if (!spec.intrinsics.valid()) throw std::invalid_argument("scene: invalid intrinsics");
    if (spec.trail.width <= 0.0) throw std::invalid_argument("scene: trail width must be positive");
    if (spec.trail.centerline.size() < 2) throw std::invalid_argument("scene: trail centerline needs 2+ points");
    if (spec.camera_path.empty()) throw std::invalid_argument("scene: empty camera path");
    if (spec.camera_path.size() != spec.pitch_deg.size()) {
        throw std::invalid_argument("scene: camera path and pitch list differ in length");
    }
    if (spec.noise.dropout < 0.0 || spec.noise.dropout >= 1.0) {
        throw std::invalid_argument("scene: dropout must be in [0,1)");
    }
    if (spec.detector_width <= 0 || spec.detector_height <= 0 ||
        spec.intrinsics.width % spec.detector_width != 0 ||
        spec.intrinsics.height % spec.detector_height != 0 ||
        spec.intrinsics.width / spec.detector_width != spec.intrinsics.height / spec.detector_height) {
        throw std::invalid_argument("scene: detector size must divide the render resolution");
    }
    for (const Pose& pose : spec.camera_path) {
        if (pose.translation.y() >= 0.0) throw std::invalid_argument("scene: camera below ground plane");
    }

    std::vector<Eigen::Vector2d> samples = sample_polyline(spec.trail.centerline, 0.1);
    double half = spec.trail.width * 0.5;
    auto check_clear = [&](double clearance, const char* what) {
        if (clearance <= half) {
            throw std::invalid_argument(std::string("scene: ") + what + " intersects the trail corridor");
        }
    };
    for (const CylinderSpec& cyl : spec.cylinders) {
        double dist = std::numeric_limits<double>::max();
        for (const auto& s : samples) dist = std::min(dist, (s - cyl.center).norm() - cyl.radius);
        check_clear(dist, "cylinder");
    }
    auto check_boxes = [&](const std::vector<BoxSpec>& boxes, const char* what) {
        for (const BoxSpec& box : boxes) {
            double dist = std::numeric_limits<double>::max();
            for (const auto& s : samples) {
                dist = std::min(dist, rect_sdf(box.center, box.half_x, box.half_z, s));
            }
            check_clear(dist, what);
        }
    };
    check_boxes(spec.shrubs, "shrub");
    check_boxes(spec.distractors, "distractor");
}

Raster<std::uint8_t> render_label_raster(const SceneSpec& spec, int frame_index) {
    return cast_labels(spec, spec.camera_path.at(frame_index));
}

Dataset render_sequence(const SceneSpec& spec) {
    validate_spec(spec);
    const Intrinsics& k = spec.intrinsics;
    const int factor = k.width / spec.detector_width;

    Dataset ds;
    ds.name = spec.name;
    ds.intrinsics = k;
    ds.has_ground_truth = true;
    ds.gt_plane = GroundPlane{0.0, -1.0, 0.0, 0.0, 0.0, 0};
    ds.gt_pitch_deg = spec.pitch_deg;

    for (size_t i = 0; i < spec.camera_path.size(); ++i) {
        const Pose& pose = spec.camera_path[i];
        std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::mt19937 rng(seq);
        std::normal_distribution<double> depth_noise(0.0, spec.noise.depth_sigma);
        std::normal_distribution<double> image_noise(0.0, spec.noise.image_sigma);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);

        Keyframe kf;
        kf.index = static_cast<int>(i);
        kf.pose = pose;
        kf.rgb = Raster<Rgb8>(k.width, k.height);
        kf.depth = Raster<float>(k.width, k.height, 0.0f);
        Raster<std::uint8_t> labels(k.width, k.height, static_cast<std::uint8_t>(SurfaceLabel::Sky));

        for (int v = 0; v < k.height; ++v) {
            for (int u = 0; u < k.width; ++u) {
                // d.z = 1, so the ray parameter is the camera z-depth.
                Eigen::Vector3d dir_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
                Hit hit = cast_ray(spec, pose.translation, pose.rotation * dir_cam);

                Eigen::Vector3d color = kSkyColor;
                if (hit.t < std::numeric_limits<double>::max()) {
                    labels.at(u, v) = static_cast<std::uint8_t>(hit.label);
                    color = shade(hit);
                    if (hit.t <= spec.max_depth) {
                        double n = spec.noise.depth_sigma > 0.0 ? depth_noise(rng) : 0.0;
                        bool dropped = spec.noise.dropout > 0.0 && uniform(rng) < spec.noise.dropout;
                        double denom = hit.t + n;
                        if (!dropped && denom > 0.05) {
                            kf.depth.at(u, v) = static_cast<float>(hit.t * hit.t / denom);
                        }
                    }
                }
                auto quantize = [&](double c) {
                    double noisy = spec.noise.image_sigma > 0.0 ? c + image_noise(rng) : c;
                    noisy = std::clamp(noisy, 0.0, 1.0);
                    return static_cast<std::uint8_t>(std::lround(noisy * 255.0));
                };
                kf.rgb.at(u, v) = {quantize(color.x()), quantize(color.y()), quantize(color.z())};
            }
        }

        ds.frames.push_back(std::move(kf));
        ds.gt_trail.push_back(reduce_label(labels, factor, SurfaceLabel::Trail));
        ds.gt_obstacle.push_back(reduce_label(labels, factor, SurfaceLabel::Obstacle));
    }
    return ds;
}

namespace {

Intrinsics suite_intrinsics() {
    Intrinsics k;
    k.fx = 260.0;
    k.fy = 260.0;
    k.cx = 160.0;
    k.cy = 120.0;
    k.width = 320;
    k.height = 240;
    return k;
}

SceneSpec suite_base(const std::string& name, std::uint64_t seed) {
    SceneSpec spec;
    spec.name = name;
    spec.intrinsics = suite_intrinsics();
    // The trail continues far past the depth cap so its rasterization
    // reaches the vanishing point like a real trail would.
    spec.trail.centerline = {{0.0, -5.0}, {0.0, 2000.0}};
    spec.seed = seed;
    return spec;
}

void straight_path(SceneSpec& spec, int frames, double speed, double pitch) {
    for (int i = 0; i < frames; ++i) {
        spec.camera_path.push_back(make_camera_pose({0.0, -2.0, speed * i}, 0.0, pitch));
        spec.pitch_deg.push_back(pitch);
    }
}

}  // namespace

std::vector<SceneSpec> standard_suites(std::uint64_t seed) {
    std::vector<SceneSpec> suites;

    // S1: straight trail, no obstacles, stationary camera.
    {
        SceneSpec s = suite_base("S1", seed);
        straight_path(s, 50, 0.0, 10.0);
        suites.push_back(std::move(s));
    }

    // S2: curved trail lined with cylinder trees and a few shrubs.
    {
        SceneSpec s = suite_base("S2", seed);
        s.trail.centerline.clear();
        for (double z = -4.0; z <= 44.0; z += 3.0) {
            s.trail.centerline.push_back({1.8 * std::sin(2.0 * kPi * z / 40.0), z});
        }
        for (double z = 94.0; z <= 2000.0; z += 50.0) {
            s.trail.centerline.push_back({1.8 * std::sin(2.0 * kPi * z / 40.0), z});
        }
        std::mt19937_64 rng(splitmix64(seed ^ 0x5332ULL));
        std::uniform_real_distribution<double> jitter(-0.2, 0.2);
        int side = 1;
        for (double z = 3.0; z <= 30.0; z += 3.0) {
            double cx = 1.8 * std::sin(2.0 * kPi * z / 40.0);
            CylinderSpec cyl;
            cyl.center = {cx + side * (2.1 + jitter(rng)), z + jitter(rng)};
            cyl.radius = 0.3;
            cyl.height = 3.0;
            s.cylinders.push_back(cyl);
            side = -side;
        }
        for (double z : {8.0, 18.0, 28.0}) {
            BoxSpec shrub;
            shrub.center = {-3.6, z};
            shrub.half_x = 0.7;
            shrub.half_z = 0.5;
            shrub.height = 0.9;
            s.shrubs.push_back(shrub);
        }
        for (int i = 0; i < 60; ++i) {
            double z = 0.15 * i;
            double cx = 1.8 * std::sin(2.0 * kPi * z / 40.0);
            double dxdz = 1.8 * (2.0 * kPi / 40.0) * std::cos(2.0 * kPi * z / 40.0);
            double yaw = std::atan2(dxdz, 1.0) * 180.0 / kPi;
            s.camera_path.push_back(make_camera_pose({cx, -2.0, z}, yaw, 10.0));
            s.pitch_deg.push_back(10.0);
        }
        suites.push_back(std::move(s));
    }

    // S3: straight trail with strong off-trail distractor patches.
    {
        SceneSpec s = suite_base("S3", seed);
        for (double z : {4.0, 9.0, 14.0, 19.0, 24.0}) {
            BoxSpec patch;
            patch.center = {-2.3, z};
            patch.half_x = 1.0;
            patch.half_z = 1.6;
            patch.height = 0.35;
            patch.albedo = {0.96, 0.94, 0.86};
            s.distractors.push_back(patch);
        }
        straight_path(s, 50, 0.10, 10.0);
        suites.push_back(std::move(s));
    }

    // S4: undulating ground, planarity stress.
    {
        SceneSpec s = suite_base("S4", seed);
        s.undulation = {0.2, 7.0};
        straight_path(s, 40, 0.12, 10.0);
        suites.push_back(std::move(s));
    }

    // S5: sparse depth (50% dropout).
    {
        SceneSpec s = suite_base("S5", seed);
        s.noise.dropout = 0.5;
        straight_path(s, 40, 0.08, 10.0);
        suites.push_back(std::move(s));
    }
    return suites;
}

}  // namespace trail
