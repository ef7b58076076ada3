#include "trail/dataset.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace trail {

namespace {

static_assert(std::endian::native == std::endian::little, "little-endian host assumed for PFM I/O");

std::string frame_stem(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d", index);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path.string());
    return in;
}

/// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in, const fs::path& path) {
    std::string tok;
    while (true) {
        int c = in.get();
        if (c == EOF) throw DataError("truncated header in " + path.string());
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        if (c == '#' && tok.empty()) {
            std::string line;
            std::getline(in, line);
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
}

int parse_dim(const std::string& tok, const fs::path& path) {
    try {
        size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw DataError("bad dimension '" + tok + "' in " + path.string());
    }
}

json read_json_file(const fs::path& path) {
    std::ifstream in = open_in(path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON in " + path.string());
    return j;
}

}  // namespace

void write_ppm(const fs::path& path, const Raster<Rgb8>& image) {
    std::ofstream out = open_out(path);
    out << "P6\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.data.data()),
              static_cast<std::streamsize>(image.data.size() * sizeof(Rgb8)));
}

Raster<Rgb8> read_ppm(const fs::path& path) {
    std::ifstream in = open_in(path);
    if (next_token(in, path) != "P6") throw DataError("not a binary PPM: " + path.string());
    int w = parse_dim(next_token(in, path), path);
    int h = parse_dim(next_token(in, path), path);
    if (next_token(in, path) != "255") throw DataError("unsupported PPM maxval in " + path.string());
    Raster<Rgb8> image(w, h);
    in.read(reinterpret_cast<char*>(image.data.data()),
            static_cast<std::streamsize>(image.data.size() * sizeof(Rgb8)));
    if (in.gcount() != static_cast<std::streamsize>(image.data.size() * sizeof(Rgb8))) {
        throw DataError("truncated pixel data in " + path.string());
    }
    return image;
}

void write_pgm(const fs::path& path, const MaskRaster& mask) {
    std::ofstream out = open_out(path);
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    std::vector<std::uint8_t> bytes(mask.data.size());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

MaskRaster read_pgm(const fs::path& path) {
    std::ifstream in = open_in(path);
    if (next_token(in, path) != "P5") throw DataError("not a binary PGM: " + path.string());
    int w = parse_dim(next_token(in, path), path);
    int h = parse_dim(next_token(in, path), path);
    if (next_token(in, path) != "255") throw DataError("unsupported PGM maxval in " + path.string());
    std::vector<std::uint8_t> bytes(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
        throw DataError("truncated pixel data in " + path.string());
    }
    MaskRaster mask(w, h);
    for (size_t i = 0; i < bytes.size(); ++i) mask.data[i] = bytes[i] >= 128 ? 1 : 0;
    return mask;
}

void write_pfm(const fs::path& path, const Raster<float>& depth) {
    std::ofstream out = open_out(path);
    out << "Pf\n" << depth.width << " " << depth.height << "\n-1.0\n";
    // PFM stores rows bottom-up.
    for (int y = depth.height - 1; y >= 0; --y) {
        out.write(reinterpret_cast<const char*>(&depth.at(0, y)),
                  static_cast<std::streamsize>(depth.width * sizeof(float)));
    }
}

Raster<float> read_pfm(const fs::path& path) {
    std::ifstream in = open_in(path);
    if (next_token(in, path) != "Pf") throw DataError("not a greyscale PFM: " + path.string());
    int w = parse_dim(next_token(in, path), path);
    int h = parse_dim(next_token(in, path), path);
    double scale = 0.0;
    try {
        scale = std::stod(next_token(in, path));
    } catch (const std::exception&) {
        throw DataError("bad PFM scale in " + path.string());
    }
    if (scale >= 0.0) throw DataError("big-endian PFM unsupported: " + path.string());
    Raster<float> depth(w, h);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(&depth.at(0, y)), static_cast<std::streamsize>(w * sizeof(float)));
        if (in.gcount() != static_cast<std::streamsize>(w * sizeof(float))) {
            throw DataError("truncated pixel data in " + path.string());
        }
    }
    return depth;
}

void save_dataset(const fs::path& dir, const Dataset& dataset) {
    fs::create_directories(dir / "frames");

    {
        json j;
        j["fx"] = dataset.intrinsics.fx;
        j["fy"] = dataset.intrinsics.fy;
        j["cx"] = dataset.intrinsics.cx;
        j["cy"] = dataset.intrinsics.cy;
        j["width"] = dataset.intrinsics.width;
        j["height"] = dataset.intrinsics.height;
        open_out(dir / "intrinsics.json") << j.dump(2) << "\n";
    }
    {
        std::ofstream out = open_out(dir / "poses.jsonl");
        for (const Keyframe& kf : dataset.frames) {
            json j;
            j["index"] = kf.index;
            j["matrix"] = kf.pose.to_matrix4();
            out << j.dump() << "\n";
        }
    }
    for (const Keyframe& kf : dataset.frames) {
        write_ppm(dir / "frames" / (frame_stem(kf.index) + ".ppm"), kf.rgb);
        write_pfm(dir / "frames" / (frame_stem(kf.index) + ".pfm"), kf.depth);
    }
    if (dataset.has_ground_truth) {
        fs::create_directories(dir / "gt");
        for (size_t i = 0; i < dataset.frames.size(); ++i) {
            const std::string stem = frame_stem(dataset.frames[i].index);
            write_pgm(dir / "gt" / (stem + ".trail.pgm"), dataset.gt_trail[i]);
            write_pgm(dir / "gt" / (stem + ".obst.pgm"), dataset.gt_obstacle[i]);
        }
        json j;
        j["a"] = dataset.gt_plane.a;
        j["b"] = dataset.gt_plane.b;
        j["c"] = dataset.gt_plane.c;
        j["d"] = dataset.gt_plane.d;
        j["pitch_per_frame"] = dataset.gt_pitch_deg;
        open_out(dir / "gt" / "plane.json") << j.dump(2) << "\n";
    }
}

Dataset load_dataset(const fs::path& dir) {
    Dataset ds;
    ds.name = dir.filename().string();

    const fs::path intr_path = dir / "intrinsics.json";
    json intr = read_json_file(intr_path);
    try {
        ds.intrinsics.fx = intr.at("fx").get<double>();
        ds.intrinsics.fy = intr.at("fy").get<double>();
        ds.intrinsics.cx = intr.at("cx").get<double>();
        ds.intrinsics.cy = intr.at("cy").get<double>();
        ds.intrinsics.width = intr.at("width").get<int>();
        ds.intrinsics.height = intr.at("height").get<int>();
    } catch (const json::exception& e) {
        throw DataError(intr_path.string() + ": " + e.what());
    }
    if (!ds.intrinsics.valid()) throw DataError("invalid intrinsics in " + intr_path.string());

    const fs::path poses_path = dir / "poses.jsonl";
    std::ifstream poses_in = open_in(poses_path);
    std::map<int, Pose> poses;
    std::string line;
    int line_no = 0;
    while (std::getline(poses_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw DataError(poses_path.string() + ": malformed JSON at line " + std::to_string(line_no));
        }
        int index = 0;
        std::array<double, 16> m{};
        try {
            index = j.at("index").get<int>();
            auto vec = j.at("matrix").get<std::vector<double>>();
            if (vec.size() != 16) throw DataError(poses_path.string() + ": matrix must have 16 numbers");
            std::copy(vec.begin(), vec.end(), m.begin());
        } catch (const json::exception& e) {
            throw DataError(poses_path.string() + ": " + e.what());
        }
        if (poses.count(index)) {
            throw DataError(poses_path.string() + ": duplicate keyframe index " + std::to_string(index));
        }
        Pose pose = Pose::from_matrix4(m);
        if (pose.rotation.determinant() < 0.0) {
            throw DataError(poses_path.string() + ": improper rotation at index " + std::to_string(index));
        }
        if (!pose.is_rigid(1e-4)) {
            throw DataError(poses_path.string() + ": non-orthonormal rotation at index " +
                            std::to_string(index));
        }
        poses[index] = pose;
    }
    if (poses.empty()) throw DataError(poses_path.string() + ": no keyframes");

    int expected = 0;
    for (const auto& [index, pose] : poses) {
        if (index != expected) {
            throw DataError(poses_path.string() + ": missing keyframe index " + std::to_string(expected));
        }
        ++expected;
    }

    for (const auto& [index, pose] : poses) {
        const std::string stem = frame_stem(index);
        const fs::path rgb_path = dir / "frames" / (stem + ".ppm");
        const fs::path depth_path = dir / "frames" / (stem + ".pfm");
        if (!fs::exists(rgb_path)) throw DataError("missing color frame: " + rgb_path.string());
        if (!fs::exists(depth_path)) throw DataError("missing depth frame: " + depth_path.string());

        Keyframe kf;
        kf.index = index;
        kf.pose = pose;
        kf.rgb = read_ppm(rgb_path);
        kf.depth = read_pfm(depth_path);
        if (kf.rgb.width != ds.intrinsics.width || kf.rgb.height != ds.intrinsics.height) {
            throw DataError(rgb_path.string() + ": dimensions do not match intrinsics");
        }
        if (kf.depth.width != kf.rgb.width || kf.depth.height != kf.rgb.height) {
            throw DataError(depth_path.string() + ": dimensions do not match the color frame");
        }
        ds.frames.push_back(std::move(kf));
    }

    // Ground truth is optional but must be complete if present.
    const fs::path gt_dir = dir / "gt";
    const fs::path plane_path = gt_dir / "plane.json";
    int gt_present = 0, gt_total = 0;
    auto tally = [&](const fs::path& p) {
        ++gt_total;
        if (fs::exists(p)) ++gt_present;
    };
    tally(plane_path);
    for (const Keyframe& kf : ds.frames) {
        tally(gt_dir / (frame_stem(kf.index) + ".trail.pgm"));
        tally(gt_dir / (frame_stem(kf.index) + ".obst.pgm"));
    }
    if (gt_present == 0) {
        ds.has_ground_truth = false;
        return ds;
    }
    if (gt_present != gt_total) {
        throw DataError(gt_dir.string() + ": ground truth is partial (" + std::to_string(gt_present) +
                        "/" + std::to_string(gt_total) + " files); provide all or none");
    }

    ds.has_ground_truth = true;
    json plane = read_json_file(plane_path);
    try {
        ds.gt_plane.a = plane.at("a").get<double>();
        ds.gt_plane.b = plane.at("b").get<double>();
        ds.gt_plane.c = plane.at("c").get<double>();
        ds.gt_plane.d = plane.at("d").get<double>();
        ds.gt_pitch_deg = plane.at("pitch_per_frame").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw DataError(plane_path.string() + ": " + e.what());
    }
    if (ds.gt_pitch_deg.size() != ds.frames.size()) {
        throw DataError(plane_path.string() + ": pitch_per_frame length does not match frame count");
    }
    for (const Keyframe& kf : ds.frames) {
        const std::string stem = frame_stem(kf.index);
        MaskRaster trail = read_pgm(gt_dir / (stem + ".trail.pgm"));
        MaskRaster obst = read_pgm(gt_dir / (stem + ".obst.pgm"));
        if (!trail.same_size(obst)) {
            throw DataError(gt_dir.string() + "/" + stem + ": trail and obstacle mask dimensions differ");
        }
        if (!ds.gt_trail.empty() && !trail.same_size(ds.gt_trail.front())) {
            throw DataError(gt_dir.string() + "/" + stem + ": mask dimensions differ across frames");
        }
        ds.gt_trail.push_back(std::move(trail));
        ds.gt_obstacle.push_back(std::move(obst));
    }
    return ds;
}

}  // namespace trail
