#pragma once

#include "trail/config.hpp"
#include "trail/field.hpp"
#include "trail/raster.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace trail {

struct FrameEvalResult {
    bool success = false;
    double containment = 0.0;      // fraction of super-threshold pixels on the trail
    double axis_delta_deg = 0.0;   // acute angle between blob and trail axes
};

/// Direction of the pixel set's principal axis, degrees in [0,180);
/// nullopt for sets too small or too isotropic to define one.
std::optional<double> principal_axis_deg(const std::vector<std::pair<int, int>>& pixels);

/// Success rule: >= eval_containment_frac of the pixels whose activity
/// reaches eval_intensity_frac of the field maximum lie inside the
/// ground-truth trail mask, and the dominant super-threshold blob's
/// principal axis is within eval_axis_max_deg of the trail's. Blob-size
/// ties go to the blob with the higher activity peak.
FrameEvalResult evaluate_frame(const FloatRaster& field, const MaskRaster& gt_trail,
                               const RunConfig& config);

}  // namespace trail
