#include "trail/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trail {

RgbImage to_rgb_image(const Raster<Rgb8>& image) {
    RgbImage out(image.width, image.height);
    for (size_t i = 0; i < image.data.size(); ++i) {
        out.r.data[i] = image.data[i].r / 255.0;
        out.g.data[i] = image.data[i].g / 255.0;
        out.b.data[i] = image.data[i].b / 255.0;
    }
    return out;
}

FloatRaster downsample_box(const FloatRaster& image, int factor) {
    if (factor <= 1) return image;
    if (image.width % factor != 0 || image.height % factor != 0) {
        throw std::invalid_argument("downsample factor must divide the image size");
    }
    FloatRaster out(image.width / factor, image.height / factor, 0.0);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            out.at(x / factor, y / factor) += image.at(x, y);
        }
    }
    double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (double& v : out.data) v *= inv;
    return out;
}

RgbImage downsample_box(const RgbImage& image, int factor) {
    RgbImage out;
    out.r = downsample_box(image.r, factor);
    out.g = downsample_box(image.g, factor);
    out.b = downsample_box(image.b, factor);
    return out;
}

FloatRaster resize_bilinear(const FloatRaster& src, int out_w, int out_h) {
    FloatRaster out(out_w, out_h);
    double sx = static_cast<double>(src.width) / out_w;
    double sy = static_cast<double>(src.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        int y0c = std::clamp(y0, 0, src.height - 1);
        int y1c = std::clamp(y0 + 1, 0, src.height - 1);
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            int x0c = std::clamp(x0, 0, src.width - 1);
            int x1c = std::clamp(x0 + 1, 0, src.width - 1);
            double top = src.at(x0c, y0c) * (1.0 - wx) + src.at(x1c, y0c) * wx;
            double bot = src.at(x0c, y1c) * (1.0 - wx) + src.at(x1c, y1c) * wx;
            out.at(x, y) = top * (1.0 - wy) + bot * wy;
        }
    }
    return out;
}

namespace {

// Separable [1 4 6 4 1]/16 with clamped borders.
FloatRaster blur5(const FloatRaster& src) {
    static const double kKernel[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    FloatRaster tmp(src.width, src.height);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            double s = 0.0;
            for (int t = -2; t <= 2; ++t) {
                int xx = std::clamp(x + t, 0, src.width - 1);
                s += kKernel[t + 2] * src.at(xx, y);
            }
            tmp.at(x, y) = s;
        }
    }
    FloatRaster out(src.width, src.height);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            double s = 0.0;
            for (int t = -2; t <= 2; ++t) {
                int yy = std::clamp(y + t, 0, src.height - 1);
                s += kKernel[t + 2] * tmp.at(x, yy);
            }
            out.at(x, y) = s;
        }
    }
    return out;
}

}  // namespace

FloatRaster pyr_down(const FloatRaster& src) {
    FloatRaster blurred = blur5(src);
    int w = (src.width + 1) / 2;
    int h = (src.height + 1) / 2;
    FloatRaster out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.at(x, y) = blurred.at(std::min(2 * x, src.width - 1), std::min(2 * y, src.height - 1));
        }
    }
    return out;
}

}  // namespace trail
