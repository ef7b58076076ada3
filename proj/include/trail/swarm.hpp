#pragma once

#include "trail/appearance.hpp"
#include "trail/conspicuity.hpp"
#include "trail/raster.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace trail {

/// Detector parameters (swarm, neural field, blob extraction).
struct SwarmParams {
    int agents_per_map = 96;
    int max_steps = 24;
    int h_max_default = 18;
    double deposit_base = 0.2;
    double epsilon = 0.25;  // deposits below this are dropped
    double weight_pheromone = 1.0;
    double weight_saliency = 1.0;
    double weight_appearance = 0.8;
    double weight_inertia = 0.3;
    double weight_centering = 0.7;
    double evaporation_rho = 0.15;
    double field_gain_beta = 0.12;
    double inhibition_kappa = 0.05;
    double attenuation_gamma = 0.5;  // field multiplier on masked pixels
    double blob_threshold = 0.30;
    int appearance_bins = 8;
    std::uint64_t rng_seed = 0;
    bool deposit_multiplicative = false;  // alternative deposit modulation
};

/// Per-step pheromone magnitude after obstacle modulation: the base
/// deposit plus (or, in multiplicative mode, times) sqrt(1 - o/m).
double deposit_level(double base, int crossings, int moves, bool multiplicative);

struct PheromonePair {
    FloatRaster color;
    FloatRaster intensity;

    PheromonePair() = default;
    PheromonePair(int w, int h) : color(w, h, 0.0), intensity(w, h, 0.0) {}
};

/// Recorded agent walk, exposed for tests and diagnostics.
struct AgentTrace {
    std::vector<std::pair<int, int>> trajectory;  // (x, y) incl. spawn
    int moves = 0;
    int crossings = 0;
    double deposit = 0.0;
    bool deposited = false;
};

/// Runs both agent populations (color and intensity) for one frame and
/// returns the pheromone they deposited. Agents step in synchronous
/// rounds; deposits merge at round boundaries in a canonical order, so
/// the result is independent of agent ordering. `prev` is read-only
/// stigmergic context from the previous frame.
PheromonePair run_swarm(const ConspicuityMaps& maps, const MaskRaster& obstacle_mask,
                        const AppearanceModel& appearance, const RgbImage& rgb,
                        const PheromonePair& prev, const SwarmParams& params, int h_max,
                        std::vector<AgentTrace>* traces = nullptr);

/// Mean of the two max-normalized maps, max-normalized again.
FloatRaster combine_pheromone(const FloatRaster& color, const FloatRaster& intensity);

/// Detector row of the expected horizon for a camera pitched down by
/// theta degrees (positive raises the horizon), clamped to
/// [1, detector_height - 2]. Agents may not move above this row.
int horizon_row(double theta_deg, const Intrinsics& k, int detector_width, int detector_height);

}  // namespace trail
