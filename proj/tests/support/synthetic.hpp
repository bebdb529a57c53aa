// Shared fixtures: synthetic drive-by scenes rendered through the forward
// projection model, used by the pipeline and acceptance suites.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "crackdet/calibration.hpp"
#include "crackdet/camera.hpp"
#include "crackdet/crop.hpp"
#include "crackdet/geodesy.hpp"
#include "crackdet/image.hpp"
#include "crackdet/pipeline.hpp"

namespace testsupport {

using namespace crackdet;

inline CameraModel test_camera() {
    CameraModel m;
    m.intrinsics = {1000.0, 1000.0, 1032.0, 772.0, 2064, 1544};
    m.t_vc = {0.0, 0.0, 1.5};
    return m;
}

/// Approximate inverse of geodetic_to_enu for small offsets; both sides of a
/// fixture go through geodetic_to_enu afterwards, so the approximation cancels.
inline GeoPoint geo_offset(const GeoPoint& base, double east_m, double north_m,
                           double up_m = 0.0) {
    const double lat_rad = base.lat_deg * M_PI / 180.0;
    GeoPoint p = base;
    p.lat_deg += north_m / 111132.95;
    p.lon_deg += east_m / (111319.49 * std::cos(lat_rad));
    p.alt_m += up_m;
    return p;
}

inline const GeoPoint kBase{45.0, 7.0, 0.0};

/// Vehicle-frame ground point for a frame pose.
inline VehicleVector ground_point_in_frame(const GeoPoint& point, const FrameRecord& frame) {
    return enu_to_vehicle(geodetic_to_enu(point, frame.vehicle_fix), frame.heading_deg);
}

struct DrawnScene {
    GrayImage image;
    BinaryMask gt_full;  // crack pixels in the full frame
};

/// Render ground points of a crack polyline into a full frame: dark line on
/// a bright background, 1-pixel brush around each projected sample.
inline DrawnScene render_crack_frame(const CameraModel& model, const FrameRecord& frame,
                                     const GeoPoint& crack_a, const GeoPoint& crack_b,
                                     int samples = 8000) {
    DrawnScene scene;
    scene.image = GrayImage(model.intrinsics.i_w, model.intrinsics.i_h, 200);
    scene.gt_full = BinaryMask(model.intrinsics.i_w, model.intrinsics.i_h);

    const VehicleVector a = ground_point_in_frame(crack_a, frame);
    const VehicleVector b = ground_point_in_frame(crack_b, frame);
    for (int i = 0; i <= samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        const VehicleVector g{a.x_m + t * (b.x_m - a.x_m), a.y_m + t * (b.y_m - a.y_m), 0.0};
        CameraVector pc;
        try {
            pc = vehicle_to_camera(g - model.t_vc, model);
            if (pc.z_m <= 0.1) continue;
        } catch (...) {
            continue;
        }
        const PixelPoint px = project_pinhole(pc, model.intrinsics);
        const int u = static_cast<int>(std::lround(px.u));
        const int v = static_cast<int>(std::lround(px.v));
        for (int dv = -1; dv <= 1; ++dv)
            for (int du = -1; du <= 1; ++du) {
                const int x = u + du, y = v + dv;
                if (!scene.image.in_bounds(x, y)) continue;
                scene.image.at(x, y) = 50;
                scene.gt_full.at(x, y) = 1;
            }
    }
    return scene;
}

/// Thin dark clutter line drawn directly in image space (stays out of the gt).
inline void draw_clutter_line(GrayImage& img, int x0, int y0, int x1, int y1) {
    const int steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
    for (int i = 0; i <= steps; ++i) {
        const double t = steps == 0 ? 0.0 : static_cast<double>(i) / steps;
        const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
        const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
        for (int d = -1; d <= 1; ++d)
            if (img.in_bounds(x + d, y)) img.at(x + d, y) = 50;
    }
}

/// A 3.24 m crack straddling quadrants 2 and 4 of its centroid, centered
/// `dist_m` ahead of the given vehicle position.
struct CrackGeometry {
    GeoPoint end_a;  // quadrant-2 side (left-rear of centroid)
    GeoPoint end_b;  // quadrant-4 side
    GeoPoint center;
    double true_length_m;
};

inline CrackGeometry make_crack(const GeoPoint& vehicle, double heading_deg,
                                double dist_m, double length_m = 3.24) {
    // Direction (-0.8, 0.6) in the vehicle frame: one endpoint lands in
    // quadrant 2 (-x, +y), the other in quadrant 4 (+x, -y).
    const double hx = -0.8, hy = 0.6;
    const double half = length_m / 2.0;
    const VehicleVector c{dist_m, 0.0, 0.0};
    const VehicleVector a{c.x_m + half * hx, c.y_m + half * hy, 0.0};
    const VehicleVector b{c.x_m - half * hx, c.y_m - half * hy, 0.0};

    // vehicle frame -> ENU for heading (deg clockwise from north)
    const double h = heading_deg * M_PI / 180.0;
    const auto to_geo = [&](const VehicleVector& p) {
        const double east = std::sin(h) * p.x_m - std::cos(h) * p.y_m;
        const double north = std::cos(h) * p.x_m + std::sin(h) * p.y_m;
        return geo_offset(vehicle, east, north);
    };
    return {to_geo(a), to_geo(b), to_geo(c), length_m};
}

/// Calibration scene: checkerboard targets observed from several poses. The
/// targets are placed so their projections under the true angles spread over
/// all four image quadrants (as a real calibration sweep would); a tight
/// cluster would leave the optical-axis rotation nearly unobservable.
inline std::vector<CalibrationSample> make_calibration_scene(
    const CameraModel& model_template, const ExtrinsicAngles& true_angles,
    std::mt19937_64& rng, int n_samples = 5, double box_px = 80.0) {
    CameraModel truth = model_template;
    truth.angles = true_angles;
    const CameraIntrinsics& k = truth.intrinsics;

    const Eigen::Matrix3d cam_from_vehicle =
        rotation_zyx(truth.angles, truth.rotation_order) * truth.r_c_v;

    std::uniform_real_distribution<double> dist_m(6.0, 16.0);
    std::uniform_real_distribution<double> lateral_m(-3.0, 3.0);
    std::uniform_real_distribution<double> ru(350.0, 650.0), rv(250.0, 450.0);

    std::vector<CalibrationSample> samples;
    while (static_cast<int>(samples.size()) < n_samples) {
        const int quadrant = static_cast<int>(samples.size()) % 4;
        const double su = quadrant == 0 || quadrant == 3 ? 1.0 : -1.0;
        const double sv = quadrant <= 1 ? -1.0 : 1.0;
        const double u = k.cx + su * ru(rng);
        const double v = k.cy + sv * rv(rng);
        const double d = dist_m(rng);

        // pixel under the true angles -> camera ray -> vehicle-frame point
        const Eigen::Vector3d p_c{(u - k.cx) / k.fx * d, (v - k.cy) / k.fy * d, d};
        const Eigen::Vector3d p_rel = cam_from_vehicle.transpose() * p_c;

        CalibrationSample s;
        s.vehicle_fix = geo_offset(kBase, lateral_m(rng), lateral_m(rng));
        s.heading_deg = 0.0;
        const VehicleVector p_abs{p_rel.x() + truth.t_vc.x_m, p_rel.y() + truth.t_vc.y_m,
                                  p_rel.z() + truth.t_vc.z_m};
        // vehicle frame -> ENU at heading 0: forward = north, left = -east
        s.target_fix = geo_offset(s.vehicle_fix, -p_abs.y_m, p_abs.x_m, p_abs.z_m);

        // round-trip check: projection of the stored geo target under truth
        FrameRecord frame;
        frame.vehicle_fix = s.vehicle_fix;
        frame.heading_deg = s.heading_deg;
        const CameraVector check =
            vehicle_to_camera(crack_relative_to_lens(frame, s.target_fix, truth), truth);
        if (check.z_m <= 0.5) continue;
        const PixelPoint px = project_pinhole(check, k);
        // keep a 512 crop window centered on the target unclamped
        const double margin = 256.0 + 40.0;
        if (px.u < margin || px.u > k.i_w - margin || px.v < margin ||
            px.v > k.i_h - margin)
            continue;
        s.gt_box = {px.u, px.v, box_px, box_px};
        s.image_id = "cal_" + std::to_string(samples.size());
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace testsupport
