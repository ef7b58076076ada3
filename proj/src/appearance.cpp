#include "trail/appearance.hpp"

#include "trail/field.hpp"

#include <algorithm>

namespace trail {

namespace {

int bin_index(double v, int bins) {
    int i = static_cast<int>(v * bins);
    return std::clamp(i, 0, bins - 1);
}

}  // namespace

double AppearanceModel::probability(double r, double g, double b) const {
    if (!valid) return 0.0;
    size_t idx = (static_cast<size_t>(bin_index(r, bins)) * bins + bin_index(g, bins)) * bins +
                 bin_index(b, bins);
    return histogram[idx];
}

AppearanceModel update_appearance(const AppearanceModel& model, const RgbImage& rgb,
                                  const Detection& detection) {
    if (!detection.present) return model;

    std::vector<double> fresh(model.histogram.size(), 0.0);
    for (auto [x, y] : detection.blob) {
        size_t idx = (static_cast<size_t>(bin_index(rgb.r.at(x, y), model.bins)) * model.bins +
                      bin_index(rgb.g.at(x, y), model.bins)) *
                         model.bins +
                     bin_index(rgb.b.at(x, y), model.bins);
        fresh[idx] += 1.0;
    }
    double total = static_cast<double>(detection.blob.size());
    for (double& v : fresh) v /= total;

    AppearanceModel out(model.bins);
    out.valid = true;
    if (!model.valid) {
        out.histogram = std::move(fresh);
        return out;
    }
    double sum = 0.0;
    for (size_t i = 0; i < fresh.size(); ++i) {
        out.histogram[i] = 0.7 * model.histogram[i] + 0.3 * fresh[i];
        sum += out.histogram[i];
    }
    if (sum > 0.0) {
        for (double& v : out.histogram) v /= sum;
    }
    return out;
}

}  // namespace trail
