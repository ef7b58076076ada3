#include "trail/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace trail {

double deposit_level(double base, int crossings, int moves, bool multiplicative) {
    double ratio = 1.0 - static_cast<double>(crossings) / static_cast<double>(moves);
    double term = std::sqrt(std::max(0.0, ratio));
    return multiplicative ? base * term : base + term;
}

namespace {

struct Agent {
    int col = 0;
    int row = 0;
    int moves = 0;
    int crossings = 0;
    int bias = 0;  // lateral direction of the last move
    bool alive = true;
    std::vector<std::pair<int, int>> trajectory;
};

struct RowRun {
    int start = 0;
    int end = 0;  // inclusive
};

/// Maximal runs of super-mean pixels, per row of the conspicuity map.
std::vector<std::vector<RowRun>> super_mean_runs(const FloatRaster& consp) {
    std::vector<std::vector<RowRun>> rows(consp.height);
    for (int y = 0; y < consp.height; ++y) {
        double mean = 0.0;
        for (int x = 0; x < consp.width; ++x) mean += consp.at(x, y);
        mean /= consp.width;
        int start = -1;
        for (int x = 0; x <= consp.width; ++x) {
            bool on = x < consp.width && consp.at(x, y) > mean;
            if (on && start < 0) start = x;
            if (!on && start >= 0) {
                rows[y].push_back({start, x - 1});
                start = -1;
            }
        }
    }
    return rows;
}

/// Midpoint of the run nearest to `col`, if the row has any.
std::optional<double> nearest_run_mid(const std::vector<RowRun>& runs, int col) {
    if (runs.empty()) return std::nullopt;
    double best_dist = 0.0;
    const RowRun* best = nullptr;
    for (const RowRun& run : runs) {
        double dist = 0.0;
        if (col < run.start) dist = run.start - col;
        else if (col > run.end) dist = col - run.end;
        if (best == nullptr || dist < best_dist) {
            best = &run;
            best_dist = dist;
        }
    }
    return 0.5 * (best->start + best->end);
}

double local_pheromone(const FloatRaster& read, int cx, int cy) {
    double sum = 0.0;
    int count = 0;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            int x = cx + dx, y = cy + dy;
            if (!read.in_bounds(x, y)) continue;
            sum += read.at(x, y);
            ++count;
        }
    }
    return count > 0 ? sum / count : 0.0;
}

void run_population(const FloatRaster& consp, const MaskRaster& mask, const AppearanceModel& appearance,
                    const RgbImage& rgb, const FloatRaster& prev, const SwarmParams& params, int h_max,
                    FloatRaster& deposits, std::vector<AgentTrace>* traces) {
    const int width = consp.width;
    const int height = consp.height;
    deposits = FloatRaster(width, height, 0.0);

    const int spawn_row = height - 1;
    if (spawn_row <= h_max || params.agents_per_map <= 0) return;  // nothing can move

    // Pheromone is read at the scale of the previous frame's peak so the
    // behavior components stay commensurate.
    double scale = raster_max(prev);
    if (scale <= 0.0) scale = 1.0;
    FloatRaster read = prev;
    for (double& v : read.data) v /= scale;

    std::vector<std::vector<RowRun>> runs = super_mean_runs(consp);

    std::vector<Agent> agents(params.agents_per_map);
    for (int a = 0; a < params.agents_per_map; ++a) {
        agents[a].col = static_cast<int>((a + 0.5) * width / params.agents_per_map);
        agents[a].row = spawn_row;
        agents[a].trajectory.push_back({agents[a].col, spawn_row});
    }

    int alive = static_cast<int>(agents.size());
    std::vector<std::pair<int, double>> stamps;  // (pixel index, value)
    while (alive > 0) {
        stamps.clear();
        for (Agent& agent : agents) {
            if (!agent.alive) continue;

            std::optional<double> mid = nearest_run_mid(runs[agent.row], agent.col);
            // Candidate distances to the run midpoint, normalized over the
            // candidate set so centering is a real directional vote.
            double d_min = 0.0, d_max = 0.0;
            if (mid) {
                bool first = true;
                for (int dcol = -1; dcol <= 1; ++dcol) {
                    int nc = agent.col + dcol;
                    if (nc < 0 || nc >= width) continue;
                    double d = std::abs(nc - *mid);
                    if (first || d < d_min) d_min = first ? d : std::min(d_min, d);
                    d_max = first ? d : std::max(d_max, d);
                    first = false;
                }
            }
            double best_score = 0.0;
            int best_dcol = 0;
            bool have_best = false;
            for (int dcol = -1; dcol <= 1; ++dcol) {
                int nc = agent.col + dcol;
                int nr = agent.row - 1;
                if (nc < 0 || nc >= width) continue;
                double pher = local_pheromone(read, nc, nr);
                double sal = consp.at(nc, nr);
                double app = appearance.valid
                                 ? appearance.probability(rgb.r.at(nc, nr), rgb.g.at(nc, nr), rgb.b.at(nc, nr))
                                 : 0.0;
                double inertia = dcol == agent.bias ? 1.0 : 0.0;
                double centering = 0.0;
                if (mid && d_max > d_min) {
                    centering = 1.0 - (std::abs(nc - *mid) - d_min) / (d_max - d_min);
                } else if (mid) {
                    centering = 1.0;
                }
                double score = params.weight_pheromone * pher + params.weight_saliency * sal +
                               params.weight_appearance * app + params.weight_inertia * inertia +
                               params.weight_centering * centering;
                if (!have_best || score > best_score) {
                    have_best = true;
                    best_score = score;
                    best_dcol = dcol;
                }
            }

            agent.col += best_dcol;
            agent.row -= 1;
            agent.bias = best_dcol;
            agent.moves += 1;
            agent.trajectory.push_back({agent.col, agent.row});
            if (mask.at(agent.col, agent.row) != 0) agent.crossings += 1;

            if (agent.row == h_max || agent.moves == params.max_steps) {
                agent.alive = false;
                --alive;
                double level = deposit_level(params.deposit_base, agent.crossings, agent.moves,
                                             params.deposit_multiplicative);
                bool deposited = level >= params.epsilon;
                if (deposited) {
                    for (size_t k = 1; k < agent.trajectory.size(); ++k) {
                        auto [x, y] = agent.trajectory[k];
                        stamps.push_back({y * width + x, level});
                    }
                }
                if (traces != nullptr) {
                    traces->push_back({agent.trajectory, agent.moves, agent.crossings, level, deposited});
                }
            }
        }
        // Canonical merge order keeps the result independent of agent order.
        std::sort(stamps.begin(), stamps.end());
        for (auto [pixel, value] : stamps) {
            deposits.data[pixel] += value;
            read.data[pixel] += value / scale;
        }
    }
}

}  // namespace

PheromonePair run_swarm(const ConspicuityMaps& maps, const MaskRaster& obstacle_mask,
                        const AppearanceModel& appearance, const RgbImage& rgb,
                        const PheromonePair& prev, const SwarmParams& params, int h_max,
                        std::vector<AgentTrace>* traces) {
    PheromonePair out;
    run_population(maps.color, obstacle_mask, appearance, rgb, prev.color, params, h_max, out.color, traces);
    run_population(maps.intensity, obstacle_mask, appearance, rgb, prev.intensity, params, h_max,
                   out.intensity, traces);
    return out;
}

int horizon_row(double theta_deg, const Intrinsics& k, int detector_width, int detector_height) {
    (void)detector_width;
    double v_full = k.cy - k.fy * std::tan(theta_deg * M_PI / 180.0);
    int row = static_cast<int>(std::floor(v_full * detector_height / k.height));
    return std::clamp(row, 1, detector_height - 2);
}

FloatRaster combine_pheromone(const FloatRaster& color, const FloatRaster& intensity) {
    FloatRaster c = color;
    FloatRaster i = intensity;
    max_normalize(c);
    max_normalize(i);
    FloatRaster out(color.width, color.height);
    for (size_t k = 0; k < out.data.size(); ++k) {
        out.data[k] = 0.5 * (c.data[k] + i.data[k]);
    }
    max_normalize(out);
    return out;
}

}  // namespace trail
