#include "trail/config.hpp"
#include "trail/dataset.hpp"
#include "trail/synth.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

namespace fs = std::filesystem;
using namespace trail;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("trail_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Dataset tiny_dataset() {
    SceneSpec spec;
    spec.name = "tiny";
    spec.intrinsics = {130.0, 130.0, 80.0, 60.0, 0, 0};
    spec.intrinsics.width = 160;
    spec.intrinsics.height = 120;
    spec.detector_width = 40;
    spec.detector_height = 30;
    spec.trail.centerline = {{0.0, -5.0}, {0.0, 30.0}};
    spec.noise = {0.01, 0.1, 0.01};
    for (int i = 0; i < 3; ++i) {
        spec.camera_path.push_back(make_camera_pose({0.0, -2.0, 0.2 * i}, 2.0, 10.0));
        spec.pitch_deg.push_back(10.0);
    }
    return render_sequence(spec);
}

void rewrite_pose_line(const fs::path& dir, int target_index, const json& replacement) {
    std::ifstream in(dir / "poses.jsonl");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    in.close();
    std::ofstream out(dir / "poses.jsonl", std::ios::trunc);
    for (const std::string& l : lines) {
        json j = json::parse(l);
        if (j["index"] == target_index) {
            out << replacement.dump() << "\n";
        } else {
            out << l << "\n";
        }
    }
}

}  // namespace

TEST_CASE("raster formats round-trip bit-exactly") {
    TempDir tmp;
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_real_distribution<float> depth(0.1f, 20.0f);

    Raster<Rgb8> image(37, 23);
    for (auto& px : image.data) {
        px = {static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
              static_cast<std::uint8_t>(byte(rng))};
    }
    write_ppm(tmp.path / "image.ppm", image);
    CHECK(read_ppm(tmp.path / "image.ppm").data == image.data);

    Raster<float> pfm(37, 23);
    for (auto& v : pfm.data) v = depth(rng);
    pfm.at(5, 5) = 0.0f;  // missing stays missing
    write_pfm(tmp.path / "depth.pfm", pfm);
    CHECK(read_pfm(tmp.path / "depth.pfm").data == pfm.data);

    MaskRaster mask(37, 23, 0);
    for (auto& v : mask.data) v = byte(rng) % 2;
    write_pgm(tmp.path / "mask.pgm", mask);
    CHECK(read_pgm(tmp.path / "mask.pgm").data == mask.data);
}

TEST_CASE("dataset save-load round trip is bit-exact") {
    TempDir tmp;
    Dataset ds = tiny_dataset();
    save_dataset(tmp.path, ds);
    Dataset loaded = load_dataset(tmp.path);

    CHECK(loaded.intrinsics.fx == ds.intrinsics.fx);
    CHECK(loaded.intrinsics.width == ds.intrinsics.width);
    REQUIRE(loaded.frames.size() == ds.frames.size());
    for (size_t i = 0; i < ds.frames.size(); ++i) {
        CHECK(loaded.frames[i].rgb.data == ds.frames[i].rgb.data);
        CHECK(loaded.frames[i].depth.data == ds.frames[i].depth.data);
        CHECK(loaded.frames[i].pose.rotation == ds.frames[i].pose.rotation);
        CHECK(loaded.frames[i].pose.translation == ds.frames[i].pose.translation);
    }
    REQUIRE(loaded.has_ground_truth);
    for (size_t i = 0; i < ds.frames.size(); ++i) {
        CHECK(loaded.gt_trail[i].data == ds.gt_trail[i].data);
        CHECK(loaded.gt_obstacle[i].data == ds.gt_obstacle[i].data);
    }
    CHECK(loaded.gt_plane.b == ds.gt_plane.b);
    CHECK(loaded.gt_pitch_deg == ds.gt_pitch_deg);
}

TEST_CASE("a skipped keyframe index is reported by name") {
    TempDir tmp;
    save_dataset(tmp.path, tiny_dataset());
    // Drop index 1 from the pose list.
    std::ifstream in(tmp.path / "poses.jsonl");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    in.close();
    std::ofstream out(tmp.path / "poses.jsonl", std::ios::trunc);
    for (const std::string& l : lines) {
        if (json::parse(l)["index"] != 1) out << l << "\n";
    }
    out.close();

    CHECK_THROWS_WITH_AS(load_dataset(tmp.path), doctest::Contains("missing keyframe index 1"),
                         DataError);
}

TEST_CASE("missing depth file is a hard error naming the file") {
    TempDir tmp;
    save_dataset(tmp.path, tiny_dataset());
    fs::remove(tmp.path / "frames" / "000002.pfm");
    CHECK_THROWS_WITH_AS(load_dataset(tmp.path), doctest::Contains("000002.pfm"), DataError);
}

TEST_CASE("improper rotation is rejected with the declared message") {
    TempDir tmp;
    Dataset ds = tiny_dataset();
    save_dataset(tmp.path, ds);
    Pose bad = ds.frames[0].pose;
    bad.rotation.col(0) *= -1.0;  // determinant flips to -1
    json repl;
    repl["index"] = 0;
    repl["matrix"] = bad.to_matrix4();
    rewrite_pose_line(tmp.path, 0, repl);
    CHECK_THROWS_WITH_AS(load_dataset(tmp.path), doctest::Contains("improper rotation"), DataError);
}

TEST_CASE("non-orthonormal rotation is rejected") {
    TempDir tmp;
    Dataset ds = tiny_dataset();
    save_dataset(tmp.path, ds);
    Pose bad = ds.frames[1].pose;
    bad.rotation(0, 0) += 0.01;
    json repl;
    repl["index"] = 1;
    repl["matrix"] = bad.to_matrix4();
    rewrite_pose_line(tmp.path, 1, repl);
    CHECK_THROWS_WITH_AS(load_dataset(tmp.path), doctest::Contains("non-orthonormal"), DataError);
}

TEST_CASE("dimension mismatches are load errors") {
    TempDir tmp;
    Dataset ds = tiny_dataset();
    save_dataset(tmp.path, ds);
    Raster<Rgb8> wrong(32, 24);
    write_ppm(tmp.path / "frames" / "000000.ppm", wrong);
    CHECK_THROWS_WITH_AS(load_dataset(tmp.path), doctest::Contains("dimensions"), DataError);
}

TEST_CASE("partial ground truth is rejected as a set") {
    TempDir tmp;
    save_dataset(tmp.path, tiny_dataset());
    fs::remove(tmp.path / "gt" / "000001.obst.pgm");
    CHECK_THROWS_WITH_AS(load_dataset(tmp.path), doctest::Contains("all or none"), DataError);

    // Removing the whole gt directory makes the dataset valid again.
    fs::remove_all(tmp.path / "gt");
    Dataset loaded = load_dataset(tmp.path);
    CHECK_FALSE(loaded.has_ground_truth);
}

TEST_CASE("config defaults serialize and parse back unchanged") {
    RunConfig defaults;
    json j = config_to_json(defaults);
    RunConfig back = config_from_json(j);
    CHECK(back.window_size == defaults.window_size);
    CHECK(back.swarm.epsilon == defaults.swarm.epsilon);
    CHECK(back.filters.ransac_inlier_gamma == defaults.filters.ransac_inlier_gamma);
    CHECK(back.eval_axis_max_deg == defaults.eval_axis_max_deg);
    // Exactly the documented keys, nothing else.
    CHECK(j.size() == 39);
}

TEST_CASE("unknown config keys are rejected by name") {
    json j;
    j["windoww_size"] = 3;
    CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("windoww_size"), ConfigError);
}

TEST_CASE("config invariants are enforced") {
    json j;
    j["outlier_k"] = 2;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = json{};
    j["don_radius_small"] = 0.5;
    j["don_radius_large"] = 0.2;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = json{};
    j["suspect_frac"] = 0.5;
    j["invalid_frac"] = 0.2;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = json{};
    j["attenuation_gamma"] = 1.5;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = json{};
    j["weight_pheromone"] = 0.0;
    j["weight_saliency"] = 0.0;
    j["weight_appearance"] = 0.0;
    j["weight_inertia"] = 0.0;
    j["weight_centering"] = 0.0;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
}

TEST_CASE("missing config keys fall back to defaults") {
    json j;
    j["window_size"] = 4;
    RunConfig config = config_from_json(j);
    CHECK(config.window_size == 4);
    CHECK(config.cloud_stride == RunConfig{}.cloud_stride);
    CHECK(config.swarm.agents_per_map == RunConfig{}.swarm.agents_per_map);
}
