#include "trail/appearance.hpp"
#include "trail/conspicuity.hpp"
#include "trail/field.hpp"
#include "trail/homography.hpp"
#include "trail/swarm.hpp"
#include "trail/synth.hpp"

#include <doctest.h>

#include <random>

using namespace trail;

namespace {

RgbImage uniform_image(int w, int h, double r, double g, double b) {
    RgbImage img(w, h);
    img.r.fill(r);
    img.g.fill(g);
    img.b.fill(b);
    return img;
}

ConspicuityMaps flat_maps(int w, int h, double value = 0.0) {
    ConspicuityMaps maps;
    maps.intensity = FloatRaster(w, h, value);
    maps.color = FloatRaster(w, h, value);
    return maps;
}

SwarmParams quiet_params() {
    SwarmParams sp;
    sp.agents_per_map = 16;
    sp.max_steps = 96;
    return sp;
}

}  // namespace

TEST_CASE("conspicuity of a uniform image is all-zero") {
    RgbImage grey = uniform_image(80, 60, 0.5, 0.5, 0.5);
    ConspicuityMaps maps = conspicuity(grey, 80, 60);
    CHECK(raster_max(maps.intensity) == 0.0);
    CHECK(raster_max(maps.color) == 0.0);
}

TEST_CASE("conspicuity maps peak at 1 when non-zero") {
    RgbImage img = uniform_image(80, 60, 0.8, 0.7, 0.6);
    for (int y = 20; y < 40; ++y) {
        for (int x = 35; x < 45; ++x) {
            img.r.at(x, y) = 0.2;
            img.g.at(x, y) = 0.3;
            img.b.at(x, y) = 0.7;
        }
    }
    ConspicuityMaps maps = conspicuity(img, 80, 60);
    CHECK(raster_max(maps.intensity) == doctest::Approx(1.0));
    CHECK(raster_max(maps.color) == doctest::Approx(1.0));
}

TEST_CASE("a dark vertical band pops in the intensity conspicuity map") {
    RgbImage img = uniform_image(80, 60, 0.75, 0.75, 0.75);
    for (int y = 0; y < 60; ++y) {
        for (int x = 36; x <= 44; ++x) {
            img.r.at(x, y) = img.g.at(x, y) = img.b.at(x, y) = 0.3;
        }
    }
    ConspicuityMaps maps = conspicuity(img, 80, 60);
    double inside = 0.0, outside = 0.0;
    int n_in = 0, n_out = 0;
    for (int y = 5; y < 55; ++y) {
        for (int x = 0; x < 80; ++x) {
            if (x >= 37 && x <= 43) {
                inside += maps.intensity.at(x, y);
                ++n_in;
            } else if (x < 30 || x > 50) {
                outside += maps.intensity.at(x, y);
                ++n_out;
            }
        }
    }
    CHECK(inside / n_in > outside / n_out);
}

TEST_CASE("conspicuity downsamples integer-multiple inputs") {
    RgbImage img = uniform_image(320, 240, 0.5, 0.5, 0.5);
    ConspicuityMaps maps = conspicuity(img, 80, 60);
    CHECK(maps.intensity.width == 80);
    CHECK(maps.intensity.height == 60);
}

TEST_CASE("horizon_row reference values") {
    Intrinsics k{500.0, 500.0, 320.0, 240.0, 640, 480};
    CHECK(horizon_row(0.0, k, 80, 60) == 30);
    CHECK(horizon_row(10.0, k, 80, 60) == 18);  // 240 - 500*tan(10 deg) = 151.8 -> row 18
    CHECK(horizon_row(75.0, k, 80, 60) == 1);   // clamped
    CHECK(horizon_row(-60.0, k, 80, 60) == 58); // clamped at the bottom
}

TEST_CASE("deposit_level reproduces the modulation formula exactly") {
    CHECK(deposit_level(0.2, 0, 10, false) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(deposit_level(0.2, 10, 10, false) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(deposit_level(0.2, 5, 10, false) == doctest::Approx(0.2 + std::sqrt(0.5)).epsilon(1e-12));
    // Multiplicative variant.
    CHECK(deposit_level(0.2, 5, 10, true) == doctest::Approx(0.2 * std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("deposit_level is non-increasing in crossings and spans [base, base+1]") {
    for (int m = 1; m <= 20; ++m) {
        double prev = deposit_level(0.3, 0, m, false);
        CHECK(prev == doctest::Approx(1.3));
        for (int o = 1; o <= m; ++o) {
            double cur = deposit_level(0.3, o, m, false);
            CHECK(cur <= prev + 1e-15);
            CHECK(cur >= 0.3 - 1e-15);
            CHECK(cur <= 1.3 + 1e-15);
            prev = cur;
        }
        CHECK(deposit_level(0.3, m, m, false) == doctest::Approx(0.3));
    }
}

TEST_CASE("agents count crossings at post-move positions") {
    const int w = 40, h = 30;
    ConspicuityMaps maps = flat_maps(w, h);
    MaskRaster mask(w, h, 0);
    // Full masked rows are crossed exactly once each, wherever agents drift.
    for (int x = 0; x < w; ++x) {
        mask.at(x, 27) = 1;
        mask.at(x, 26) = 1;
        mask.at(x, 20) = 1;
    }
    SwarmParams sp = quiet_params();
    AppearanceModel model(sp.appearance_bins);
    RgbImage rgb = uniform_image(w, h, 0.5, 0.5, 0.5);
    PheromonePair prev(w, h);

    std::vector<AgentTrace> traces;
    run_swarm(maps, mask, model, rgb, prev, sp, 10, &traces);
    REQUIRE_FALSE(traces.empty());
    for (const AgentTrace& trace : traces) {
        CHECK(trace.crossings == 3);
        CHECK(trace.moves == h - 1 - 10);
        CHECK(trace.trajectory.size() == static_cast<size_t>(trace.moves) + 1);
    }
}

TEST_CASE("trajectories stay 8-connected, strictly rising, and at or below h_max") {
    const int w = 64, h = 48;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ConspicuityMaps maps = flat_maps(w, h);
    for (double& v : maps.color.data) v = u(rng);
    for (double& v : maps.intensity.data) v = u(rng);
    MaskRaster mask(w, h, 0);
    for (auto& v : mask.data) v = u(rng) < 0.2 ? 1 : 0;
    PheromonePair prev(w, h);
    for (double& v : prev.color.data) v = u(rng);
    for (double& v : prev.intensity.data) v = u(rng);

    SwarmParams sp = quiet_params();
    sp.agents_per_map = 32;
    AppearanceModel model(sp.appearance_bins);
    RgbImage rgb = uniform_image(w, h, 0.4, 0.5, 0.6);

    const int h_max = 7;
    std::vector<AgentTrace> traces;
    run_swarm(maps, mask, model, rgb, prev, sp, h_max, &traces);
    REQUIRE(traces.size() == 64);  // both populations
    for (const AgentTrace& trace : traces) {
        for (size_t i = 0; i < trace.trajectory.size(); ++i) {
            CHECK(trace.trajectory[i].second >= h_max);
            if (i > 0) {
                CHECK(trace.trajectory[i].second == trace.trajectory[i - 1].second - 1);
                CHECK(std::abs(trace.trajectory[i].first - trace.trajectory[i - 1].first) <= 1);
            }
        }
        CHECK(trace.crossings <= trace.moves);
    }
}

TEST_CASE("epsilon cutoff suppresses deposits of fully obstructed agents") {
    const int w = 32, h = 24;
    ConspicuityMaps maps = flat_maps(w, h);
    MaskRaster mask(w, h, 1);  // everything is obstacle
    SwarmParams sp = quiet_params();
    sp.deposit_base = 0.2;
    sp.epsilon = 0.25;  // base < epsilon: o == m deposits nothing
    AppearanceModel model(sp.appearance_bins);
    RgbImage rgb = uniform_image(w, h, 0.5, 0.5, 0.5);
    PheromonePair out = run_swarm(maps, mask, model, rgb, PheromonePair(w, h), sp, 5);
    CHECK(raster_max(out.color) == 0.0);
    CHECK(raster_max(out.intensity) == 0.0);

    // With a clear mask the same agents deposit base + 1 per visited pixel.
    MaskRaster clear(w, h, 0);
    out = run_swarm(maps, clear, model, rgb, PheromonePair(w, h), sp, 5);
    CHECK(raster_max(out.color) > 0.0);
}

TEST_CASE("agents spawned at h_max are discarded without deposits") {
    const int w = 16, h = 12;
    ConspicuityMaps maps = flat_maps(w, h);
    MaskRaster mask(w, h, 0);
    SwarmParams sp = quiet_params();
    AppearanceModel model(sp.appearance_bins);
    RgbImage rgb = uniform_image(w, h, 0.5, 0.5, 0.5);
    std::vector<AgentTrace> traces;
    PheromonePair out = run_swarm(maps, mask, model, rgb, PheromonePair(w, h), sp, h - 1, &traces);
    CHECK(traces.empty());
    CHECK(raster_max(out.color) == 0.0);
}

TEST_CASE("run_swarm is deterministic") {
    const int w = 48, h = 36;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ConspicuityMaps maps = flat_maps(w, h);
    for (double& v : maps.color.data) v = u(rng);
    for (double& v : maps.intensity.data) v = u(rng);
    MaskRaster mask(w, h, 0);
    for (auto& v : mask.data) v = u(rng) < 0.15 ? 1 : 0;
    SwarmParams sp = quiet_params();
    AppearanceModel model(sp.appearance_bins);
    RgbImage rgb = uniform_image(w, h, 0.3, 0.6, 0.2);
    PheromonePair prev(w, h);
    for (double& v : prev.color.data) v = u(rng);

    PheromonePair a = run_swarm(maps, mask, model, rgb, prev, sp, 6);
    PheromonePair b = run_swarm(maps, mask, model, rgb, prev, sp, 6);
    CHECK(a.color.data == b.color.data);
    CHECK(a.intensity.data == b.intensity.data);
}

TEST_CASE("combine_pheromone basics") {
    FloatRaster a(10, 8, 0.0), b(10, 8, 0.0);
    a.at(2, 2) = 2.0;
    b.at(7, 5) = 4.0;
    FloatRaster combined = combine_pheromone(a, b);
    CHECK(combined.at(2, 2) == doctest::Approx(1.0));   // equal peaks after normalization
    CHECK(combined.at(7, 5) == doctest::Approx(1.0));
    CHECK(combined.at(0, 0) == 0.0);

    FloatRaster zero(10, 8, 0.0);
    FloatRaster only = combine_pheromone(a, zero);
    CHECK(only.at(2, 2) == doctest::Approx(1.0));

    FloatRaster same = combine_pheromone(a, a);
    CHECK(same.at(2, 2) == doctest::Approx(1.0));
    CHECK(raster_max(combine_pheromone(zero, zero)) == 0.0);
}

TEST_CASE("pose_homography of identical poses is the exact identity") {
    Pose pose = make_camera_pose({0.4, -2.0, 1.0}, 3.0, 12.0);
    GroundPlane plane{0, -1, 0, 2.0, 0, 0};
    HomographyResult res = pose_homography(pose, pose, plane, Intrinsics{260, 260, 160, 120, 320, 240});
    CHECK_FALSE(res.degenerate);
    CHECK(res.H.isIdentity(0.0));
}

namespace {

/// Projects world ground points through two poses and measures the pixel
/// transfer error of the homography.
double max_transfer_error(const Pose& prev, const Pose& cur, const Intrinsics& k) {
    GroundPlane world_plane{0, -1, 0, 0, 0, 0};  // ground y = 0
    GroundPlane plane_cur = plane_to_local(world_plane, cur);
    HomographyResult res = pose_homography(prev, cur, plane_cur, k);
    REQUIRE_FALSE(res.degenerate);

    Pose prev_inv = invert_pose(prev);
    Pose cur_inv = invert_pose(cur);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    std::uniform_real_distribution<double> uz(2.0, 10.0);
    double worst = 0.0;
    int used = 0;
    while (used < 50) {
        Eigen::Vector3d world(ux(rng), 0.0, uz(rng));
        auto px_prev = project_point(prev_inv.apply(world), k);
        auto px_cur = project_point(cur_inv.apply(world), k);
        if (!px_prev || !px_cur) continue;
        ++used;
        Eigen::Vector3d mapped = res.H * Eigen::Vector3d(px_prev->u, px_prev->v, 1.0);
        mapped /= mapped.z();
        worst = std::max(worst, std::hypot(mapped.x() - px_cur->u, mapped.y() - px_cur->v));
    }
    return worst;
}

}  // namespace

TEST_CASE("pose_homography under pure roll matches K R K^-1") {
    Intrinsics k{260, 260, 160, 120, 320, 240};
    Pose prev = make_camera_pose({0, -2.0, 0}, 0.0, 10.0);
    Pose cur = prev;
    double roll = 5.0 * M_PI / 180.0;
    Eigen::Matrix3d rz;
    rz << std::cos(roll), -std::sin(roll), 0, std::sin(roll), std::cos(roll), 0, 0, 0, 1;
    cur.rotation = prev.rotation * rz;

    CHECK(max_transfer_error(prev, cur, k) < 0.1);
}

TEST_CASE("pose_homography under forward translation transfers ground points") {
    Intrinsics k{260, 260, 160, 120, 320, 240};
    Pose prev = make_camera_pose({0, -2.0, 0}, 0.0, 10.0);
    Pose cur = make_camera_pose({0, -2.0, 0.4}, 0.0, 10.0);
    CHECK(max_transfer_error(prev, cur, k) < 0.5);
}

TEST_CASE("pose_homography flags a plane through the camera center") {
    Intrinsics k{260, 260, 160, 120, 320, 240};
    Pose prev = make_camera_pose({0, -1.0, 0}, 0.0, 0.0);
    Pose cur = make_camera_pose({0.3, -1.0, 0}, 0.0, 0.0);
    // In the current local frame a plane through the camera center has
    // d = 0; with a lateral baseline its previous-frame offset vanishes too.
    GroundPlane through{0, -1, 0, 0.0, 0, 0};
    HomographyResult res = pose_homography(prev, cur, through, k);
    CHECK(res.degenerate);
    CHECK(res.H.isIdentity(0.0));
}

TEST_CASE("update_field applies attenuation exactly at masked pixels") {
    SwarmParams sp;
    sp.evaporation_rho = 0.0;
    sp.field_gain_beta = 0.0;
    sp.inhibition_kappa = 0.0;
    sp.attenuation_gamma = 0.5;

    NeuralField field(20, 15);
    field.activity.fill(0.6);
    MaskRaster mask(20, 15, 0);
    mask.at(4, 3) = 1;
    FloatRaster zero(20, 15, 0.0);
    NeuralField out = update_field(field, zero, Eigen::Matrix3d::Identity(), mask, sp);
    CHECK(out.activity.at(4, 3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(out.activity.at(5, 3) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("update_field pure evaporation decays by (1 - rho)") {
    SwarmParams sp;
    sp.evaporation_rho = 0.2;
    sp.field_gain_beta = 0.1;
    sp.inhibition_kappa = 0.0;
    sp.attenuation_gamma = 1.0;

    NeuralField field(10, 10);
    field.activity.fill(0.5);
    MaskRaster mask(10, 10, 0);
    FloatRaster zero(10, 10, 0.0);
    NeuralField out = update_field(field, zero, Eigen::Matrix3d::Identity(), mask, sp);
    for (double v : out.activity.data) CHECK(v == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("update_field converges to the closed-form fixed point") {
    SwarmParams sp;
    sp.evaporation_rho = 0.25;
    sp.field_gain_beta = 0.05;
    sp.inhibition_kappa = 0.0;
    sp.attenuation_gamma = 1.0;

    const double s = 1.0;
    const double fixed_point = sp.field_gain_beta * s / sp.evaporation_rho;  // 0.2
    FloatRaster saliency(8, 6, s);
    MaskRaster mask(8, 6, 0);
    NeuralField field(8, 6);
    int frames = static_cast<int>(std::ceil(5.0 / sp.evaporation_rho));
    for (int t = 1; t <= frames; ++t) {
        field = update_field(field, saliency, Eigen::Matrix3d::Identity(), mask, sp);
        // Exact linear-recurrence solution at every step.
        double expected = fixed_point * (1.0 - std::pow(1.0 - sp.evaporation_rho, t));
        CHECK(field.activity.at(3, 3) == doctest::Approx(expected).epsilon(1e-10));
    }
    CHECK(std::abs(field.activity.at(3, 3) - fixed_point) < 1e-3);
}

TEST_CASE("update_field keeps activity in [0,1] for in-range parameters") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        SwarmParams sp;
        sp.evaporation_rho = u(rng);
        sp.field_gain_beta = 2.0 * u(rng);
        sp.inhibition_kappa = u(rng);
        sp.attenuation_gamma = u(rng);
        NeuralField field(12, 9);
        for (double& v : field.activity.data) v = u(rng);
        FloatRaster saliency(12, 9);
        for (double& v : saliency.data) v = u(rng);
        MaskRaster mask(12, 9);
        for (auto& v : mask.data) v = u(rng) < 0.3 ? 1 : 0;
        NeuralField out = update_field(field, saliency, Eigen::Matrix3d::Identity(), mask, sp);
        for (double v : out.activity.data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("update_field warps by the homography before integrating") {
    SwarmParams sp;
    sp.evaporation_rho = 0.0;
    sp.field_gain_beta = 0.0;
    sp.inhibition_kappa = 0.0;
    NeuralField field(16, 12);
    field.activity.at(5, 7) = 1.0;
    Eigen::Matrix3d shift = Eigen::Matrix3d::Identity();
    shift(0, 2) = 3.0;  // prev (x,y) maps to cur (x+3, y)
    MaskRaster mask(16, 12, 0);
    FloatRaster zero(16, 12, 0.0);
    NeuralField out = update_field(field, zero, shift, mask, sp);
    CHECK(out.activity.at(8, 7) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out.activity.at(5, 7) == doctest::Approx(0.0));
}

TEST_CASE("zero mask makes attenuation inert (extension degenerates)") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    NeuralField field(14, 10);
    for (double& v : field.activity.data) v = u(rng);
    FloatRaster saliency(14, 10);
    for (double& v : saliency.data) v = u(rng);
    MaskRaster empty(14, 10, 0);

    SwarmParams attenuated;
    attenuated.attenuation_gamma = 0.4;
    SwarmParams inert = attenuated;
    inert.attenuation_gamma = 1.0;

    NeuralField a = update_field(field, saliency, Eigen::Matrix3d::Identity(), empty, attenuated);
    NeuralField b = update_field(field, saliency, Eigen::Matrix3d::Identity(), empty, inert);
    CHECK(a.activity.data == b.activity.data);
}

TEST_CASE("extract_path basics and tie-breaking") {
    NeuralField field(20, 20);
    CHECK_FALSE(extract_path(field, 0.3).present);

    // 40-pixel blob vs 12-pixel blob.
    for (int y = 2; y < 10; ++y)
        for (int x = 2; x < 7; ++x) field.activity.at(x, y) = 0.9;
    for (int y = 14; y < 18; ++y)
        for (int x = 14; x < 17; ++x) field.activity.at(x, y) = 0.9;
    Detection det = extract_path(field, 0.3);
    REQUIRE(det.present);
    CHECK(det.blob.size() == 40);
    CHECK(det.centroid.first == doctest::Approx(4.0));

    // Equal-size components: the one with the smaller centroid row wins.
    NeuralField tie(20, 30);
    for (int y = 20; y < 24; ++y)
        for (int x = 2; x < 6; ++x) tie.activity.at(x, y) = 0.8;
    for (int y = 4; y < 8; ++y)
        for (int x = 10; x < 14; ++x) tie.activity.at(x, y) = 0.8;
    det = extract_path(tie, 0.3);
    REQUIRE(det.present);
    CHECK(det.centroid.second == doctest::Approx(5.5));
}

TEST_CASE("extract_path uses strict threshold and 4-connectivity") {
    NeuralField field(8, 8);
    field.activity.at(1, 1) = 0.3;   // not > 0.3
    field.activity.at(3, 3) = 0.31;
    field.activity.at(4, 4) = 0.31;  // diagonal: separate component
    Detection det = extract_path(field, 0.3);
    REQUIRE(det.present);
    CHECK(det.blob.size() == 1);
}

TEST_CASE("appearance model learns a uniform blob as a single bin") {
    RgbImage img = uniform_image(10, 10, 0.51, 0.52, 0.53);
    Detection det;
    det.present = true;
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) det.blob.push_back({x, y});

    AppearanceModel model(8);
    model = update_appearance(model, img, det);
    CHECK(model.valid);
    CHECK(model.probability(0.51, 0.52, 0.53) == doctest::Approx(1.0));
    double total = 0.0;
    for (double v : model.histogram) total += v;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("appearance model converges under repeated identical updates") {
    RgbImage img = uniform_image(10, 10, 0.1, 0.2, 0.9);
    Detection det;
    det.present = true;
    for (int x = 0; x < 10; ++x) det.blob.push_back({x, 5});

    AppearanceModel model(8);
    // Start from a different color so the blend has somewhere to go.
    RgbImage other = uniform_image(10, 10, 0.9, 0.9, 0.1);
    model = update_appearance(model, other, det);
    for (int i = 0; i < 50; ++i) model = update_appearance(model, img, det);
    CHECK(model.probability(0.1, 0.2, 0.9) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("appearance model: first detection initializes, absent detection is a no-op") {
    RgbImage img = uniform_image(6, 6, 0.4, 0.4, 0.4);
    Detection none;
    AppearanceModel model(4);
    AppearanceModel unchanged = update_appearance(model, img, none);
    CHECK_FALSE(unchanged.valid);

    Detection det;
    det.present = true;
    det.blob = {{0, 0}, {1, 0}};
    AppearanceModel init = update_appearance(model, img, det);
    CHECK(init.valid);
    CHECK(init.probability(0.4, 0.4, 0.4) == doctest::Approx(1.0));
}
