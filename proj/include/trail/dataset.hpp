#pragma once

#include "trail/keyframe.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace trail {

/// Raised for malformed or inconsistent on-disk data; the message names
/// the offending file and reason.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raster formats (all binary, little-endian where it matters).
void write_ppm(const std::filesystem::path& path, const Raster<Rgb8>& image);
Raster<Rgb8> read_ppm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const MaskRaster& mask);  // 255 = set
MaskRaster read_pgm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const Raster<float>& depth);
Raster<float> read_pfm(const std::filesystem::path& path);

/// Writes the dataset directory layout (intrinsics.json, poses.jsonl,
/// frames/, gt/ when ground truth is present).
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);

/// Loads and validates a dataset directory. Throws DataError on missing
/// frames, format problems, dimension mismatches, non-orthonormal or
/// improper rotations, and partially present ground truth.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace trail
