#include "trail/evaluate.hpp"

#include <algorithm>
#include <cmath>

namespace trail {

std::optional<double> principal_axis_deg(const std::vector<std::pair<int, int>>& pixels) {
    if (pixels.size() < 3) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pixels) {
        mx += x;
        my += y;
    }
    mx /= pixels.size();
    my /= pixels.size();
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto [x, y] : pixels) {
        double dx = x - mx, dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // Eigen-gap of the 2x2 second-moment matrix; isotropic sets have no axis.
    double tr = sxx + syy;
    double det = sxx * syy - sxy * sxy;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    double l1 = tr / 2.0 + disc;
    double l2 = tr / 2.0 - disc;
    if (l1 <= 0.0 || (l1 - l2) <= 1e-9 * l1) return std::nullopt;

    double vx, vy;
    if (std::abs(sxy) > 1e-12) {
        vx = l1 - syy;
        vy = sxy;
    } else if (sxx >= syy) {
        vx = 1.0;
        vy = 0.0;
    } else {
        vx = 0.0;
        vy = 1.0;
    }
    double angle = std::atan2(vy, vx) * 180.0 / M_PI;
    if (angle < 0.0) angle += 180.0;
    if (angle >= 180.0) angle -= 180.0;
    return angle;
}

namespace {

double acute_delta(double a, double b) {
    double d = std::abs(a - b);
    while (d >= 180.0) d -= 180.0;
    return std::min(d, 180.0 - d);
}

}  // namespace

FrameEvalResult evaluate_frame(const FloatRaster& field, const MaskRaster& gt_trail,
                               const RunConfig& config) {
    FrameEvalResult result;
    double peak = raster_max(field);
    if (peak <= 0.0) return result;  // no super-threshold pixels: failure

    const double threshold = config.eval_intensity_frac * peak;
    const int width = field.width, height = field.height;

    std::vector<std::pair<int, int>> super;
    int on_trail = 0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (field.at(x, y) >= threshold) {
                super.push_back({x, y});
                if (gt_trail.at(x, y) != 0) ++on_trail;
            }
        }
    }
    if (super.empty()) return result;
    result.containment = static_cast<double>(on_trail) / super.size();

    // Largest 4-connected blob of the super-threshold set; size ties go to
    // the higher activity peak.
    MaskRaster member(width, height, 0);
    for (auto [x, y] : super) member.at(x, y) = 1;
    MaskRaster visited(width, height, 0);
    std::vector<std::pair<int, int>> blob, component, stack;
    double blob_peak = -1.0;
    for (auto [sx, sy] : super) {
        if (visited.at(sx, sy)) continue;
        component.clear();
        stack.assign(1, {sx, sy});
        visited.at(sx, sy) = 1;
        double peak_here = 0.0;
        while (!stack.empty()) {
            auto [x, y] = stack.back();
            stack.pop_back();
            component.push_back({x, y});
            peak_here = std::max(peak_here, field.at(x, y));
            constexpr int dx[4] = {1, -1, 0, 0};
            constexpr int dy[4] = {0, 0, 1, -1};
            for (int n = 0; n < 4; ++n) {
                int nx = x + dx[n], ny = y + dy[n];
                if (!member.in_bounds(nx, ny) || !member.at(nx, ny) || visited.at(nx, ny)) continue;
                visited.at(nx, ny) = 1;
                stack.push_back({nx, ny});
            }
        }
        if (component.size() > blob.size() ||
            (component.size() == blob.size() && peak_here > blob_peak)) {
            blob = component;
            blob_peak = peak_here;
        }
    }

    std::vector<std::pair<int, int>> trail_pixels;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (gt_trail.at(x, y) != 0) trail_pixels.push_back({x, y});
        }
    }
    if (trail_pixels.empty()) return result;  // no trail to be inside of

    auto blob_axis = principal_axis_deg(blob);
    auto trail_axis = principal_axis_deg(trail_pixels);
    bool aligned = true;
    if (blob_axis && trail_axis) {
        result.axis_delta_deg = acute_delta(*blob_axis, *trail_axis);
        aligned = result.axis_delta_deg <= config.eval_axis_max_deg;
    }
    result.success = result.containment >= config.eval_containment_frac && aligned;
    return result;
}

}  // namespace trail
