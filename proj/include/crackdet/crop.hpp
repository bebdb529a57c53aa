#pragma once

#include <string>
#include <vector>

#include "crackdet/camera.hpp"
#include "crackdet/geodesy.hpp"

namespace crackdet {

/// Pixel rectangle of requested size (b_w, b_h), clamped inside the image.
struct CropWindow {
    int u_min = 0, v_min = 0;
    int u_max = 0, v_max = 0;
    int b_w = 0, b_h = 0;

    double center_u() const { return u_min + b_w / 2.0; }
    double center_v() const { return v_min + b_h / 2.0; }
    bool contains(double u, double v) const {
        return u >= u_min && u <= u_max && v >= v_min && v <= v_max;
    }
};

/// One logged frame with its synced pose sample.
struct FrameRecord {
    double timestamp = 0.0;
    GeoPoint vehicle_fix;
    double heading_deg = 0.0;
    std::string image_path;
    std::string frame_id;
    // filled during gating
    double crack_distance_m = 0.0;
    double pixels_per_meter = 0.0;
};

struct GateResult {
    bool pass = false;
    double measured_ppm = 0.0;
    std::string reject_reason;  // empty on pass
};

/// Crack-centered window clamped to stay inside the image.
/// Throws ConfigError when the box does not fit in the image.
CropWindow compute_crop_window(const PixelPoint& center, int b_w, int b_h,
                               int i_w, int i_h);

/// Pixel density fx / z_C of the crack center; pass iff >= threshold.
GateResult resolution_gate(const VehicleVector& p_rel, const CameraModel& model,
                           double threshold_ppm);

struct FrameRejection {
    std::size_t index;
    std::string reason;
};

struct EmptySelectionError : std::runtime_error {
    explicit EmptySelectionError(std::vector<FrameRejection> r)
        : std::runtime_error("no frame passed the resolution/visibility gate"),
          rejections(std::move(r)) {}
    std::vector<FrameRejection> rejections;
};

/// Crack position relative to the camera lens in F_V for a given frame pose.
VehicleVector crack_relative_to_lens(const FrameRecord& frame, const GeoPoint& crack,
                                     const CameraModel& model);

/// Index of the visible, gate-passing frame with the highest pixel density.
/// Ties broken by earliest timestamp.
std::size_t select_best_frame(std::vector<FrameRecord>& frames, const CameraModel& model,
                              const GeoPoint& crack, double threshold_ppm);

}  // namespace crackdet
