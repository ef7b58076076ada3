#pragma once

#include "trail/cloud.hpp"
#include "trail/swarm.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

namespace trail {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every pipeline constant, serialized as one flat JSON object. Missing
/// keys take the documented defaults; unknown keys are rejected.
struct RunConfig {
    FilterParams filters;
    SwarmParams swarm;
    int window_size = 2;      // past keyframes retained (n)
    int cloud_stride = 4;     // depth pixel sampling stride
    int detector_width = 80;
    int detector_height = 60;
    int mask_inflate_radius = 1;
    double validator_nu = 0.30;
    double suspect_frac = 0.1;
    double invalid_frac = 0.4;
    double eval_intensity_frac = 0.8;
    double eval_containment_frac = 0.9;
    double eval_axis_max_deg = 30.0;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config_file(const std::string& path);  // empty path = defaults

}  // namespace trail
