#include "trail/conspicuity.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace trail {

namespace {

constexpr int kLevels = 5;
constexpr std::array<std::pair<int, int>, 4> kCenterSurround = {{{0, 2}, {0, 3}, {1, 3}, {1, 4}}};

/// Across-scale center-surround sum, accumulated at pyramid level 0.
FloatRaster feature_map(const FloatRaster& channel) {
    std::array<FloatRaster, kLevels> pyramid;
    pyramid[0] = channel;
    for (int l = 1; l < kLevels; ++l) pyramid[l] = pyr_down(pyramid[l - 1]);

    FloatRaster total(channel.width, channel.height, 0.0);
    for (auto [c, s] : kCenterSurround) {
        FloatRaster surround = resize_bilinear(pyramid[s], pyramid[c].width, pyramid[c].height);
        FloatRaster diff(pyramid[c].width, pyramid[c].height);
        for (size_t i = 0; i < diff.data.size(); ++i) {
            diff.data[i] = std::abs(pyramid[c].data[i] - surround.data[i]);
        }
        FloatRaster at_base = c == 0 ? std::move(diff) : resize_bilinear(diff, channel.width, channel.height);
        for (size_t i = 0; i < total.data.size(); ++i) total.data[i] += at_base.data[i];
    }
    max_normalize(total);
    return total;
}

}  // namespace

ConspicuityMaps conspicuity(const RgbImage& rgb, int detector_width, int detector_height) {
    RgbImage base = rgb;
    if (rgb.width() != detector_width || rgb.height() != detector_height) {
        if (rgb.width() % detector_width != 0 || rgb.height() % detector_height != 0 ||
            rgb.width() / detector_width != rgb.height() / detector_height) {
            throw std::invalid_argument("conspicuity input must be an integer multiple of detector size");
        }
        base = downsample_box(rgb, rgb.width() / detector_width);
    }

    FloatRaster intensity(detector_width, detector_height);
    FloatRaster rg(detector_width, detector_height);
    FloatRaster by(detector_width, detector_height);
    for (size_t i = 0; i < intensity.data.size(); ++i) {
        double r = base.r.data[i], g = base.g.data[i], b = base.b.data[i];
        intensity.data[i] = (r + g + b) / 3.0;
        rg.data[i] = r - g;
        by.data[i] = b - (r + g) / 2.0;
    }

    ConspicuityMaps maps;
    maps.intensity = feature_map(intensity);

    FloatRaster rg_map = feature_map(rg);
    FloatRaster by_map = feature_map(by);
    maps.color = FloatRaster(detector_width, detector_height);
    for (size_t i = 0; i < maps.color.data.size(); ++i) {
        maps.color.data[i] = rg_map.data[i] + by_map.data[i];
    }
    max_normalize(maps.color);
    return maps;
}

}  // namespace trail
