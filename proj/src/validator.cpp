#include "trail/validator.hpp"

namespace trail {

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Valid: return "valid";
        case Verdict::Suspect: return "suspect";
        case Verdict::Invalid: return "invalid";
    }
    return "valid";
}

std::string cause_name(CauseHint c) {
    switch (c) {
        case CauseHint::None: return "none";
        case CauseHint::PathOnObstacle: return "path_on_obstacle";
        case CauseHint::NoDetection: return "no_detection";
        case CauseHint::NoPlane: return "no_plane";
    }
    return "none";
}

ValidationReport validate(const NeuralField& field, const ObstacleMask& mask, const Detection& detection,
                          double nu, double suspect_frac, double invalid_frac, bool plane_failed) {
    ValidationReport report;

    std::optional<PixelRect> rect;
    for (int y = 0; y < field.activity.height; ++y) {
        for (int x = 0; x < field.activity.width; ++x) {
            if (!(field.activity.at(x, y) > nu) || mask.bits.at(x, y) == 0) continue;
            report.overlap_pixels += 1;
            if (!rect) {
                rect = PixelRect{x, y, x, y};
            } else {
                rect->min_x = std::min(rect->min_x, x);
                rect->min_y = std::min(rect->min_y, y);
                rect->max_x = std::max(rect->max_x, x);
                rect->max_y = std::max(rect->max_y, y);
            }
        }
    }
    report.bounding_rect = rect;
    report.overlap_fraction =
        detection.present ? static_cast<double>(report.overlap_pixels) / detection.blob.size() : 0.0;

    if (plane_failed) {
        report.verdict = Verdict::Suspect;
        report.cause = CauseHint::NoPlane;
        return report;
    }
    if (!detection.present) {
        report.verdict = Verdict::Suspect;
        report.cause = CauseHint::NoDetection;
        return report;
    }
    if (report.overlap_fraction >= invalid_frac) {
        report.verdict = Verdict::Invalid;
        report.cause = CauseHint::PathOnObstacle;
    } else if (report.overlap_fraction >= suspect_frac) {
        report.verdict = Verdict::Suspect;
        report.cause = CauseHint::PathOnObstacle;
    } else {
        report.verdict = Verdict::Valid;
        report.cause = CauseHint::None;
    }
    return report;
}

}  // namespace trail
