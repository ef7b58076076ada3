#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <vector>

namespace trail {

/// Row-major 2-D raster. (0,0) is the top-left pixel; y grows downward.
template <typename T>
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Raster() = default;
    Raster(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    T& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    const T& at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t size() const { return data.size(); }
    bool same_size(const Raster& other) const { return width == other.width && height == other.height; }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }
};

using MaskRaster = Raster<std::uint8_t>;
using FloatRaster = Raster<double>;

inline double raster_max(const FloatRaster& r) {
    double m = 0.0;
    for (double v : r.data) m = std::max(m, v);
    return m;
}

inline double raster_mean(const FloatRaster& r) {
    if (r.data.empty()) return 0.0;
    double s = 0.0;
    for (double v : r.data) s += v;
    return s / static_cast<double>(r.data.size());
}

/// Scales so the peak becomes 1. All-zero (or non-positive) input is left untouched.
inline void max_normalize(FloatRaster& r) {
    double m = raster_max(r);
    if (m <= 0.0) return;
    for (double& v : r.data) v /= m;
}

/// Square max-filter of half-width `radius` (radius 0 = identity).
template <typename T>
Raster<T> dilate_square(const Raster<T>& src, int radius) {
    if (radius <= 0) return src;
    Raster<T> out(src.width, src.height);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            T m = T{};
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    int xx = x + dx, yy = y + dy;
                    if (src.in_bounds(xx, yy)) m = std::max(m, src.at(xx, yy));
                }
            }
            out.at(x, y) = m;
        }
    }
    return out;
}

/// Block reduction by an integer factor, keeping the block maximum.
template <typename T>
Raster<T> block_reduce_max(const Raster<T>& src, int factor) {
    assert(factor >= 1 && src.width % factor == 0 && src.height % factor == 0);
    Raster<T> out(src.width / factor, src.height / factor);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            T& cell = out.at(x / factor, y / factor);
            cell = std::max(cell, src.at(x, y));
        }
    }
    return out;
}

}  // namespace trail
