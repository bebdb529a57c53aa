#pragma once

#include <string>
#include <vector>

#include "crackdet/camera.hpp"
#include "crackdet/crop.hpp"
#include "crackdet/geodesy.hpp"

namespace crackdet {

/// Axis-aligned box given by center and size, pixels.
struct BoundingBox {
    double center_u = 0.0;
    double center_v = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// One calibration drive-by observation of the checkerboard target.
struct CalibrationSample {
    GeoPoint vehicle_fix;
    double heading_deg = 0.0;
    GeoPoint target_fix;
    BoundingBox gt_box;
    std::string image_id;
};

struct AlignmentScore {
    double oog = 0.0;
    double aot = 0.0;
    double total() const { return oog + aot; }
};

/// Fraction of the ground-truth box covered by the crop window.
/// Throws std::domain_error on a degenerate (zero-area) gt box.
double oog(const CropWindow& crop, const BoundingBox& gt);

struct BoundaryPixel {
    double x_star = 0.0;
    double y_star = 0.0;
    double d_crop = 0.0;   // boundary pixel to crop center
    double d_gt = 0.0;     // boundary pixel to gt center
    double offset = 0.0;   // L/2 - d_crop
};

/// Pixel on the crop boundary along the line joining the two centers.
/// eps floors the per-axis offset magnitude to guard the division.
BoundaryPixel boundary_pixel(const PixelPoint& crop_center, const PixelPoint& gt_center,
                             double l_crop, double eps = 1e-9);

/// Alignment-of-traveling-distance score; requires a square crop.
double aot(const CropWindow& crop, const BoundingBox& gt, double eps = 1e-9);

struct CalibrationSearch {
    double range_deg = 10.0;  // half-width around the template angles
    double step_deg = 1.0;
};

struct SampleScore {
    std::string image_id;
    AlignmentScore score;
    bool feasible = false;
};

struct CalibrationResult {
    ExtrinsicAngles angles;
    double objective = 0.0;
    std::vector<SampleScore> per_sample;
};

struct CalibrationFailedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Alignment objective at a fixed angle triple (sum over samples of OoG+AoT;
/// constraint-violating or behind-camera samples contribute 0).
double calibration_objective(const std::vector<CalibrationSample>& samples,
                             const CameraModel& model, const ExtrinsicAngles& angles,
                             int crop_l, std::vector<SampleScore>* per_sample = nullptr);

/// Coordinate interval halving plus final grid refinement over the mounting
/// angles, terminating at step_deg resolution.
CalibrationResult calibrate_extrinsics(const std::vector<CalibrationSample>& samples,
                                       const CameraModel& model_template,
                                       const CalibrationSearch& search,
                                       int crop_l = 512);

}  // namespace crackdet
