#pragma once

#include "trail/image.hpp"

#include <vector>

namespace trail {

struct Detection;

/// Self-supervised path appearance: a normalized 3-D RGB histogram
/// learned from the pixels of previous detections.
struct AppearanceModel {
    int bins = 8;
    std::vector<double> histogram;  // bins^3 cells, sums to 1 when valid
    bool valid = false;

    explicit AppearanceModel(int bins_per_channel = 8)
        : bins(bins_per_channel),
          histogram(static_cast<size_t>(bins_per_channel) * bins_per_channel * bins_per_channel, 0.0) {}

    /// Histogram probability of an RGB triple in [0,1]; 0 when invalid.
    double probability(double r, double g, double b) const;
};

/// Blends the histogram of the detection blob into the model
/// (0.7 old + 0.3 new); the first valid detection initializes it.
/// An absent detection leaves the model unchanged.
AppearanceModel update_appearance(const AppearanceModel& model, const RgbImage& rgb,
                                  const Detection& detection);

}  // namespace trail
