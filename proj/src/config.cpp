#include "trail/config.hpp"

#include <fstream>
#include <functional>
#include <map>

using nlohmann::json;

namespace trail {

namespace {

using Setter = std::function<void(RunConfig&, const json&)>;

template <typename T, typename Member>
Setter set(Member member) {
    return [member](RunConfig& c, const json& v) { c.*member = v.get<T>(); };
}

template <typename T, typename Sub, typename Member>
Setter set_sub(Sub sub, Member member) {
    return [sub, member](RunConfig& c, const json& v) { (c.*sub).*member = v.get<T>(); };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"window_size", set<int>(&RunConfig::window_size)},
        {"cloud_stride", set<int>(&RunConfig::cloud_stride)},
        {"detector_width", set<int>(&RunConfig::detector_width)},
        {"detector_height", set<int>(&RunConfig::detector_height)},
        {"mask_inflate_radius", set<int>(&RunConfig::mask_inflate_radius)},
        {"outlier_k", set_sub<int>(&RunConfig::filters, &FilterParams::outlier_k)},
        {"outlier_stddev_mult", set_sub<double>(&RunConfig::filters, &FilterParams::outlier_stddev_mult)},
        {"normal_radius", set_sub<double>(&RunConfig::filters, &FilterParams::normal_radius)},
        {"don_radius_small", set_sub<double>(&RunConfig::filters, &FilterParams::don_radius_small)},
        {"don_radius_large", set_sub<double>(&RunConfig::filters, &FilterParams::don_radius_large)},
        {"normal_up_max_angle", set_sub<double>(&RunConfig::filters, &FilterParams::normal_up_max_angle_deg)},
        {"don_magnitude_max", set_sub<double>(&RunConfig::filters, &FilterParams::don_magnitude_max)},
        {"ransac_iterations", set_sub<int>(&RunConfig::filters, &FilterParams::ransac_iterations)},
        {"ransac_inlier_gamma", set_sub<double>(&RunConfig::filters, &FilterParams::ransac_inlier_gamma)},
        {"obstacle_margin_upsilon",
         set_sub<double>(&RunConfig::filters, &FilterParams::obstacle_margin_upsilon)},
        {"agents_per_map", set_sub<int>(&RunConfig::swarm, &SwarmParams::agents_per_map)},
        {"max_steps", set_sub<int>(&RunConfig::swarm, &SwarmParams::max_steps)},
        {"h_max_default", set_sub<int>(&RunConfig::swarm, &SwarmParams::h_max_default)},
        {"deposit_base", set_sub<double>(&RunConfig::swarm, &SwarmParams::deposit_base)},
        {"epsilon", set_sub<double>(&RunConfig::swarm, &SwarmParams::epsilon)},
        {"weight_pheromone", set_sub<double>(&RunConfig::swarm, &SwarmParams::weight_pheromone)},
        {"weight_saliency", set_sub<double>(&RunConfig::swarm, &SwarmParams::weight_saliency)},
        {"weight_appearance", set_sub<double>(&RunConfig::swarm, &SwarmParams::weight_appearance)},
        {"weight_inertia", set_sub<double>(&RunConfig::swarm, &SwarmParams::weight_inertia)},
        {"weight_centering", set_sub<double>(&RunConfig::swarm, &SwarmParams::weight_centering)},
        {"evaporation_rho", set_sub<double>(&RunConfig::swarm, &SwarmParams::evaporation_rho)},
        {"field_gain_beta", set_sub<double>(&RunConfig::swarm, &SwarmParams::field_gain_beta)},
        {"inhibition_kappa", set_sub<double>(&RunConfig::swarm, &SwarmParams::inhibition_kappa)},
        {"attenuation_gamma", set_sub<double>(&RunConfig::swarm, &SwarmParams::attenuation_gamma)},
        {"blob_threshold", set_sub<double>(&RunConfig::swarm, &SwarmParams::blob_threshold)},
        {"appearance_bins", set_sub<int>(&RunConfig::swarm, &SwarmParams::appearance_bins)},
        {"rng_seed", set_sub<std::uint64_t>(&RunConfig::swarm, &SwarmParams::rng_seed)},
        {"deposit_multiplicative", set_sub<bool>(&RunConfig::swarm, &SwarmParams::deposit_multiplicative)},
        {"validator_nu", set<double>(&RunConfig::validator_nu)},
        {"suspect_frac", set<double>(&RunConfig::suspect_frac)},
        {"invalid_frac", set<double>(&RunConfig::invalid_frac)},
        {"eval_intensity_frac", set<double>(&RunConfig::eval_intensity_frac)},
        {"eval_containment_frac", set<double>(&RunConfig::eval_containment_frac)},
        {"eval_axis_max_deg", set<double>(&RunConfig::eval_axis_max_deg)},
    };
    return table;
}

void check(bool ok, const char* message) {
    if (!ok) throw ConfigError(message);
}

void validate(const RunConfig& c) {
    check(c.window_size >= 0, "window_size must be >= 0");
    check(c.cloud_stride >= 1, "cloud_stride must be >= 1");
    check(c.detector_width > 0 && c.detector_height > 0, "detector size must be positive");
    check(c.mask_inflate_radius >= 0, "mask_inflate_radius must be >= 0");
    check(c.filters.outlier_k >= 3, "outlier_k must be >= 3");
    check(c.filters.don_radius_small < c.filters.don_radius_large,
          "don_radius_small must be below don_radius_large");
    check(c.filters.normal_up_max_angle_deg > 0.0 && c.filters.normal_up_max_angle_deg < 90.0,
          "normal_up_max_angle must be in (0,90)");
    check(c.filters.don_magnitude_max >= 0.0 && c.filters.don_magnitude_max <= 2.0,
          "don_magnitude_max must be in [0,2]");
    check(c.filters.ransac_iterations >= 1, "ransac_iterations must be >= 1");
    check(c.filters.ransac_inlier_gamma > 0.0, "ransac_inlier_gamma must be positive");
    check(c.filters.obstacle_margin_upsilon >= 0.0, "obstacle_margin_upsilon must be >= 0");
    check(c.swarm.agents_per_map >= 1, "agents_per_map must be >= 1");
    check(c.swarm.max_steps >= 1, "max_steps must be >= 1");
    check(c.swarm.epsilon >= 0.0, "epsilon must be >= 0");
    double weights[] = {c.swarm.weight_pheromone, c.swarm.weight_saliency, c.swarm.weight_appearance,
                        c.swarm.weight_inertia, c.swarm.weight_centering};
    double weight_sum = 0.0;
    for (double w : weights) {
        check(w >= 0.0, "behavior weights must be >= 0");
        weight_sum += w;
    }
    check(weight_sum > 0.0, "at least one behavior weight must be positive");
    check(c.swarm.evaporation_rho >= 0.0 && c.swarm.evaporation_rho <= 1.0,
          "evaporation_rho must be in [0,1]");
    check(c.swarm.field_gain_beta >= 0.0, "field_gain_beta must be >= 0");
    check(c.swarm.inhibition_kappa >= 0.0, "inhibition_kappa must be >= 0");
    check(c.swarm.attenuation_gamma >= 0.0 && c.swarm.attenuation_gamma <= 1.0,
          "attenuation_gamma must be in [0,1]");
    check(c.swarm.blob_threshold >= 0.0 && c.swarm.blob_threshold <= 1.0,
          "blob_threshold must be in [0,1]");
    check(c.swarm.appearance_bins >= 1, "appearance_bins must be >= 1");
    check(c.suspect_frac >= 0.0 && c.suspect_frac <= c.invalid_frac && c.invalid_frac <= 1.0,
          "need 0 <= suspect_frac <= invalid_frac <= 1");
    check(c.eval_intensity_frac > 0.0 && c.eval_intensity_frac <= 1.0,
          "eval_intensity_frac must be in (0,1]");
    check(c.eval_containment_frac >= 0.0 && c.eval_containment_frac <= 1.0,
          "eval_containment_frac must be in [0,1]");
}

}  // namespace

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig config;
    const auto& table = setters();
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto entry = table.find(it.key());
        if (entry == table.end()) throw ConfigError("unknown config key: " + it.key());
        try {
            entry->second(config, it.value());
        } catch (const json::exception&) {
            throw ConfigError("bad value type for config key: " + it.key());
        }
    }
    validate(config);
    return config;
}

json config_to_json(const RunConfig& c) {
    json j;
    j["window_size"] = c.window_size;
    j["cloud_stride"] = c.cloud_stride;
    j["detector_width"] = c.detector_width;
    j["detector_height"] = c.detector_height;
    j["mask_inflate_radius"] = c.mask_inflate_radius;
    j["outlier_k"] = c.filters.outlier_k;
    j["outlier_stddev_mult"] = c.filters.outlier_stddev_mult;
    j["normal_radius"] = c.filters.normal_radius;
    j["don_radius_small"] = c.filters.don_radius_small;
    j["don_radius_large"] = c.filters.don_radius_large;
    j["normal_up_max_angle"] = c.filters.normal_up_max_angle_deg;
    j["don_magnitude_max"] = c.filters.don_magnitude_max;
    j["ransac_iterations"] = c.filters.ransac_iterations;
    j["ransac_inlier_gamma"] = c.filters.ransac_inlier_gamma;
    j["obstacle_margin_upsilon"] = c.filters.obstacle_margin_upsilon;
    j["agents_per_map"] = c.swarm.agents_per_map;
    j["max_steps"] = c.swarm.max_steps;
    j["h_max_default"] = c.swarm.h_max_default;
    j["deposit_base"] = c.swarm.deposit_base;
    j["epsilon"] = c.swarm.epsilon;
    j["weight_pheromone"] = c.swarm.weight_pheromone;
    j["weight_saliency"] = c.swarm.weight_saliency;
    j["weight_appearance"] = c.swarm.weight_appearance;
    j["weight_inertia"] = c.swarm.weight_inertia;
    j["weight_centering"] = c.swarm.weight_centering;
    j["evaporation_rho"] = c.swarm.evaporation_rho;
    j["field_gain_beta"] = c.swarm.field_gain_beta;
    j["inhibition_kappa"] = c.swarm.inhibition_kappa;
    j["attenuation_gamma"] = c.swarm.attenuation_gamma;
    j["blob_threshold"] = c.swarm.blob_threshold;
    j["appearance_bins"] = c.swarm.appearance_bins;
    j["rng_seed"] = c.swarm.rng_seed;
    j["deposit_multiplicative"] = c.swarm.deposit_multiplicative;
    j["validator_nu"] = c.validator_nu;
    j["suspect_frac"] = c.suspect_frac;
    j["invalid_frac"] = c.invalid_frac;
    j["eval_intensity_frac"] = c.eval_intensity_frac;
    j["eval_containment_frac"] = c.eval_containment_frac;
    j["eval_axis_max_deg"] = c.eval_axis_max_deg;
    return j;
}

RunConfig load_config_file(const std::string& path) {
    if (path.empty()) return RunConfig{};
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("malformed JSON in config file: " + path);
    return config_from_json(j);
}

}  // namespace trail
