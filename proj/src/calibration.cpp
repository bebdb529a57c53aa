#include "crackdet/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "crackdet/errors.hpp"

namespace crackdet {

double oog(const CropWindow& crop, const BoundingBox& gt) {
    const double gt_area = gt.width * gt.height;
    if (!(gt_area > 0.0))
        throw std::domain_error("oog: degenerate ground-truth box");

    const double gu0 = gt.center_u - gt.width / 2.0, gu1 = gt.center_u + gt.width / 2.0;
    const double gv0 = gt.center_v - gt.height / 2.0, gv1 = gt.center_v + gt.height / 2.0;
    const double iw = std::max(0.0, std::min<double>(crop.u_max, gu1) - std::max<double>(crop.u_min, gu0));
    const double ih = std::max(0.0, std::min<double>(crop.v_max, gv1) - std::max<double>(crop.v_min, gv0));
    return iw * ih / gt_area;
}

BoundaryPixel boundary_pixel(const PixelPoint& crop_center, const PixelPoint& gt_center,
                             double l_crop, double eps) {
    if (!(l_crop > 0.0) || !(eps > 0.0))
        throw std::domain_error("boundary_pixel: l_crop and eps must be positive");

    const auto floored = [eps](double d) {
        if (std::abs(d) >= eps) return d;
        return d == 0.0 ? eps : std::copysign(eps, d);
    };
    const double dcx = floored(gt_center.u - crop_center.u);
    const double dcy = floored(gt_center.v - crop_center.v);

    const double half = l_crop / 2.0;
    const double s = std::min(half / std::abs(dcx), half / std::abs(dcy));

    BoundaryPixel b;
    b.x_star = crop_center.u + s * dcx;
    b.y_star = crop_center.v + s * dcy;
    b.d_crop = std::hypot(s * dcx, s * dcy);
    b.d_gt = std::hypot(b.x_star - gt_center.u, b.y_star - gt_center.v);
    b.offset = half - b.d_crop;
    return b;
}

double aot(const CropWindow& crop, const BoundingBox& gt, double eps) {
    if (crop.b_w != crop.b_h)
        throw ConfigError("aot requires a square crop window");
    const double l = crop.b_w;
    const BoundaryPixel b = boundary_pixel({crop.center_u(), crop.center_v()},
                                           {gt.center_u, gt.center_v}, l, eps);
    const double radius = l * std::sqrt(2.0) / 2.0;  // half-diagonal
    return (b.d_gt + b.offset) / radius;
}

double calibration_objective(const std::vector<CalibrationSample>& samples,
                             const CameraModel& model, const ExtrinsicAngles& angles,
                             int crop_l, std::vector<SampleScore>* per_sample) {
    CameraModel m = model;
    m.angles = angles;
    const double half = crop_l / 2.0;

    double total = 0.0;
    for (const CalibrationSample& s : samples) {
        SampleScore score;
        score.image_id = s.image_id;

        FrameRecord frame;
        frame.vehicle_fix = s.vehicle_fix;
        frame.heading_deg = s.heading_deg;
        const VehicleVector p_rel = crack_relative_to_lens(frame, s.target_fix, m);
        const CameraVector p_c = vehicle_to_camera(p_rel, m);
        if (p_c.z_m > 0.0) {
            const PixelPoint px = project_pinhole(p_c, m.intrinsics);
            const CropWindow crop = compute_crop_window(px, crop_l, crop_l,
                                                        m.intrinsics.i_w, m.intrinsics.i_h);
            const bool feasible =
                std::abs(s.gt_box.center_u - crop.center_u()) <= half &&
                std::abs(s.gt_box.center_v - crop.center_v()) <= half;
            if (feasible) {
                score.feasible = true;
                score.score.oog = oog(crop, s.gt_box);
                score.score.aot = aot(crop, s.gt_box);
                total += score.score.total();
            }
        }
        if (per_sample) per_sample->push_back(score);
    }
    return total;
}

namespace {

struct Candidate {
    ExtrinsicAngles angles;
    double objective = -1.0;
};

// Higher objective wins; ties go to the smallest angles.
bool better(const Candidate& a, const Candidate& b) {
    if (a.objective != b.objective) return a.objective > b.objective;
    const auto key = [](const ExtrinsicAngles& x) {
        return std::array<double, 7>{
            std::abs(x.yaw_deg) + std::abs(x.pitch_deg) + std::abs(x.roll_deg),
            std::abs(x.yaw_deg), std::abs(x.pitch_deg), std::abs(x.roll_deg),
            x.yaw_deg, x.pitch_deg, x.roll_deg};
    };
    return key(a.angles) < key(b.angles);
}

double& axis(ExtrinsicAngles& a, int i) {
    return i == 0 ? a.yaw_deg : (i == 1 ? a.pitch_deg : a.roll_deg);
}

double axis(const ExtrinsicAngles& a, int i) {
    return i == 0 ? a.yaw_deg : (i == 1 ? a.pitch_deg : a.roll_deg);
}

}  // namespace

CalibrationResult calibrate_extrinsics(const std::vector<CalibrationSample>& samples,
                                       const CameraModel& model_template,
                                       const CalibrationSearch& search, int crop_l) {
    if (samples.empty())
        throw std::domain_error("calibrate_extrinsics: no samples");
    if (!(search.step_deg > 0.0))
        throw std::domain_error("calibrate_extrinsics: step_deg must be positive");

    const ExtrinsicAngles center = model_template.angles;
    const double range = search.range_deg;
    const double step = search.step_deg;

    const auto evaluate = [&](const ExtrinsicAngles& a) {
        return calibration_objective(samples, model_template, a, crop_l);
    };

    // Coordinate interval halving, two passes over the three axes. Brackets
    // restart each pass: an axis narrowed while the other axes were still
    // wrong must be allowed to move again once they have been corrected.
    ExtrinsicAngles current = center;
    for (int pass = 0; pass < 2; ++pass) {
        std::array<double, 3> lo{-range, -range, -range};
        std::array<double, 3> hi{range, range, range};
        for (int ax = 0; ax < 3; ++ax) {
            while (hi[ax] - lo[ax] > 4.0 * step) {
                Candidate best;
                double best_off = 0.0;
                for (int k = 0; k <= 4; ++k) {
                    const double off = lo[ax] + (hi[ax] - lo[ax]) * k / 4.0;
                    ExtrinsicAngles a = current;
                    axis(a, ax) = axis(center, ax) + off;
                    const Candidate c{a, evaluate(a)};
                    if (best.objective < 0.0 || better(c, best)) {
                        best = c;
                        best_off = off;
                    }
                }
                const double quarter = (hi[ax] - lo[ax]) / 4.0;
                lo[ax] = std::max(-range, best_off - quarter);
                hi[ax] = std::min(range, best_off + quarter);
                current = best.angles;
            }
        }
    }

    // Exhaustive grid sweep at step resolution over the whole search range,
    // snapped to the grid anchored at the template angles. The halving passes
    // above only warm-start `current`; the sweep guarantees the optimum on
    // the grid regardless of where coordinate descent settled.
    const long kmax = std::lround(range / step);

    Candidate best;
    for (long ky = -kmax; ky <= kmax; ++ky)
        for (long kp = -kmax; kp <= kmax; ++kp)
            for (long kr = -kmax; kr <= kmax; ++kr) {
                ExtrinsicAngles a{center.yaw_deg + ky * step,
                                  center.pitch_deg + kp * step,
                                  center.roll_deg + kr * step};
                const Candidate c{a, evaluate(a)};
                if (best.objective < 0.0 || better(c, best)) best = c;
            }

    CalibrationResult result;
    result.angles = best.angles;
    result.objective = calibration_objective(samples, model_template, best.angles,
                                             crop_l, &result.per_sample);
    const bool any_feasible = std::any_of(result.per_sample.begin(), result.per_sample.end(),
                                          [](const SampleScore& s) { return s.feasible; });
    if (!any_feasible)
        throw CalibrationFailedError("no sample satisfies the alignment constraints "
                                     "anywhere in the search range");
    return result;
}

}  // namespace crackdet
