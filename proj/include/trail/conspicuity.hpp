#pragma once

#include "trail/image.hpp"

namespace trail {

/// Center-surround contrast maps, max-normalized to [0,1].
struct ConspicuityMaps {
    FloatRaster intensity;
    FloatRaster color;
};

/// Itti-style conspicuity from a 5-level Gaussian pyramid over the
/// intensity and the RG/BY opponent channels, center-surround pairs
/// (0,2) (0,3) (1,3) (1,4). Input must be at detector resolution or an
/// integer multiple of it (box-downsampled first).
ConspicuityMaps conspicuity(const RgbImage& rgb, int detector_width, int detector_height);

}  // namespace trail
