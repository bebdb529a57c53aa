#include "crackdet/crop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crackdet/errors.hpp"

namespace crackdet {

CropWindow compute_crop_window(const PixelPoint& center, int b_w, int b_h,
                               int i_w, int i_h) {
    if (b_w > i_w || b_h > i_h)
        throw ConfigError("crop box larger than image");

    const auto clamp_min = [](double c, int b, int i) {
        const long lo = std::lround(c) - b / 2;
        return static_cast<int>(std::max(0L, std::min(lo, static_cast<long>(i - b))));
    };

    CropWindow w;
    w.b_w = b_w;
    w.b_h = b_h;
    w.u_min = clamp_min(center.u, b_w, i_w);
    w.v_min = clamp_min(center.v, b_h, i_h);
    w.u_max = w.u_min + b_w;
    w.v_max = w.v_min + b_h;
    return w;
}

GateResult resolution_gate(const VehicleVector& p_rel, const CameraModel& model,
                           double threshold_ppm) {
    const CameraVector p_c = vehicle_to_camera(p_rel, model);
    if (!(p_c.z_m > 0.0))
        return {false, 0.0, "crack behind camera"};
    const double ppm = model.intrinsics.fx / p_c.z_m;
    if (ppm < threshold_ppm)
        return {false, ppm, "resolution below threshold"};
    return {true, ppm, ""};
}

VehicleVector crack_relative_to_lens(const FrameRecord& frame, const GeoPoint& crack,
                                     const CameraModel& model) {
    const EnuVector enu = geodetic_to_enu(crack, frame.vehicle_fix);
    const VehicleVector p_v = enu_to_vehicle(enu, frame.heading_deg);
    return p_v - model.t_vc;
}

std::size_t select_best_frame(std::vector<FrameRecord>& frames, const CameraModel& model,
                              const GeoPoint& crack, double threshold_ppm) {
    if (frames.empty())
        throw std::domain_error("select_best_frame: empty frame list");

    std::vector<FrameRejection> rejections;
    std::size_t best = frames.size();
    double best_ppm = -1.0;
    double best_ts = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < frames.size(); ++i) {
        FrameRecord& f = frames[i];
        const VehicleVector p_rel = crack_relative_to_lens(f, crack, model);
        const GateResult gate = resolution_gate(p_rel, model, threshold_ppm);
        f.pixels_per_meter = gate.measured_ppm;
        f.crack_distance_m = p_rel.vec().norm();
        if (!gate.pass) {
            rejections.push_back({i, gate.reject_reason});
            continue;
        }
        const PixelPoint px = project_pinhole(vehicle_to_camera(p_rel, model), model.intrinsics);
        if (px.u < 0 || px.u >= model.intrinsics.i_w || px.v < 0 || px.v >= model.intrinsics.i_h) {
            rejections.push_back({i, "projected crack center outside image"});
            continue;
        }
        if (gate.measured_ppm > best_ppm ||
            (gate.measured_ppm == best_ppm && f.timestamp < best_ts)) {
            best = i;
            best_ppm = gate.measured_ppm;
            best_ts = f.timestamp;
        }
    }

    if (best == frames.size())
        throw EmptySelectionError(std::move(rejections));
    return best;
}

}  // namespace crackdet
