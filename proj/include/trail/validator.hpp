#pragma once

#include "trail/cloud.hpp"
#include "trail/field.hpp"

#include <optional>
#include <string>

namespace trail {

enum class Verdict { Valid, Suspect, Invalid };
enum class CauseHint { None, PathOnObstacle, NoDetection, NoPlane };

std::string verdict_name(Verdict v);
std::string cause_name(CauseHint c);

struct PixelRect {
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};

struct ValidationReport {
    int overlap_pixels = 0;
    double overlap_fraction = 0.0;  // overlap / blob size, 0 when blob empty
    std::optional<PixelRect> bounding_rect;
    Verdict verdict = Verdict::Valid;
    CauseHint cause = CauseHint::None;
};

/// Counts pixels where field activity exceeds nu on an obstacle-mask bit,
/// fits their bounding rectangle, and grades the detection. An upstream
/// plane failure or an absent detection downgrades the verdict to suspect
/// with the corresponding cause hint.
ValidationReport validate(const NeuralField& field, const ObstacleMask& mask, const Detection& detection,
                          double nu, double suspect_frac, double invalid_frac, bool plane_failed = false);

}  // namespace trail
