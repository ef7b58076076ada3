#include "trail/field.hpp"

#include <algorithm>
#include <cmath>

namespace trail {

namespace {

double sample_bilinear_zero(const FloatRaster& src, double x, double y) {
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double wx = x - x0;
    double wy = y - y0;
    auto value = [&](int xx, int yy) { return src.in_bounds(xx, yy) ? src.at(xx, yy) : 0.0; };
    double top = value(x0, y0) * (1.0 - wx) + value(x0 + 1, y0) * wx;
    double bot = value(x0, y0 + 1) * (1.0 - wx) + value(x0 + 1, y0 + 1) * wx;
    return top * (1.0 - wy) + bot * wy;
}

}  // namespace

NeuralField update_field(const NeuralField& field, const FloatRaster& saliency,
                         const Eigen::Matrix3d& homography, const MaskRaster& mask,
                         const SwarmParams& params) {
    const int width = saliency.width;
    const int height = saliency.height;

    NeuralField out(width, height);
    out.frame_index = field.frame_index + 1;

    // 1) motion compensation: pull each output pixel from the previous
    //    frame through the inverse homography.
    FloatRaster warped(width, height, 0.0);
    bool have_prev = field.activity.width == width && field.activity.height == height;
    if (have_prev) {
        if (homography.isIdentity(0.0)) {
            warped = field.activity;
        } else {
            Eigen::Matrix3d inv = homography.inverse();
            for (int y = 0; y < height; ++y) {
                for (int x = 0; x < width; ++x) {
                    Eigen::Vector3d src = inv * Eigen::Vector3d(x, y, 1.0);
                    if (std::abs(src.z()) < 1e-12) continue;
                    warped.at(x, y) = sample_bilinear_zero(field.activity, src.x() / src.z(),
                                                           src.y() / src.z());
                }
            }
        }
    }

    // 2) evaporation + saliency injection.
    for (size_t i = 0; i < out.activity.data.size(); ++i) {
        out.activity.data[i] =
            (1.0 - params.evaporation_rho) * warped.data[i] + params.field_gain_beta * saliency.data[i];
    }

    // 3) global inhibition, then clamp to [0,1].
    double mean = raster_mean(out.activity);
    for (double& v : out.activity.data) {
        v = std::clamp(v - params.inhibition_kappa * mean, 0.0, 1.0);
    }

    // 4) attenuate activity on obstacle pixels.
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (mask.at(x, y) != 0) out.activity.at(x, y) *= params.attenuation_gamma;
        }
    }
    return out;
}

Detection extract_path(const NeuralField& field, double blob_threshold) {
    const FloatRaster& f = field.activity;
    const int width = f.width;
    const int height = f.height;

    Detection best;
    std::vector<std::uint8_t> visited(f.data.size(), 0);
    std::vector<std::pair<int, int>> stack;
    std::vector<std::pair<int, int>> component;

    for (int sy = 0; sy < height; ++sy) {
        for (int sx = 0; sx < width; ++sx) {
            size_t sidx = static_cast<size_t>(sy) * width + sx;
            if (visited[sidx] || !(f.data[sidx] > blob_threshold)) continue;

            component.clear();
            stack.assign(1, {sx, sy});
            visited[sidx] = 1;
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                component.push_back({x, y});
                constexpr int dx[4] = {1, -1, 0, 0};
                constexpr int dy[4] = {0, 0, 1, -1};
                for (int n = 0; n < 4; ++n) {
                    int nx = x + dx[n], ny = y + dy[n];
                    if (!f.in_bounds(nx, ny)) continue;
                    size_t nidx = static_cast<size_t>(ny) * width + nx;
                    if (visited[nidx] || !(f.data[nidx] > blob_threshold)) continue;
                    visited[nidx] = 1;
                    stack.push_back({nx, ny});
                }
            }

            double cx = 0.0, cy = 0.0;
            for (auto [x, y] : component) {
                cx += x;
                cy += y;
            }
            cx /= component.size();
            cy /= component.size();

            bool take = false;
            if (!best.present || component.size() > best.blob.size()) {
                take = true;
            } else if (component.size() == best.blob.size()) {
                // Ties go to the blob with the smaller centroid row, then column.
                if (cy < best.centroid.second ||
                    (cy == best.centroid.second && cx < best.centroid.first)) {
                    take = true;
                }
            }
            if (take) {
                best.present = true;
                best.blob = component;
                best.centroid = {cx, cy};
            }
        }
    }
    if (best.present) {
        std::sort(best.blob.begin(), best.blob.end(),
                  [](auto& a, auto& b) { return a.second != b.second ? a.second < b.second : a.first < b.first; });
    }
    return best;
}

}  // namespace trail
