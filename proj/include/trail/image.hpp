#pragma once

#include "trail/geom.hpp"
#include "trail/raster.hpp"

namespace trail {

/// Planar RGB image with channels in [0,1].
struct RgbImage {
    FloatRaster r, g, b;

    RgbImage() = default;
    RgbImage(int w, int h) : r(w, h), g(w, h), b(w, h) {}
    int width() const { return r.width; }
    int height() const { return r.height; }
};

RgbImage to_rgb_image(const Raster<Rgb8>& image);

/// Box average over factor x factor blocks; dimensions must divide evenly.
RgbImage downsample_box(const RgbImage& image, int factor);
FloatRaster downsample_box(const FloatRaster& image, int factor);

/// Bilinear resize with center-aligned sampling.
FloatRaster resize_bilinear(const FloatRaster& src, int out_w, int out_h);

/// 5-tap binomial blur followed by factor-2 decimation (pyramid step).
FloatRaster pyr_down(const FloatRaster& src);

}  // namespace trail
