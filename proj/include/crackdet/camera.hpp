#pragma once

#include <string>

#include <Eigen/Dense>

#include "crackdet/geodesy.hpp"

namespace crackdet {

/// Position in the camera optical frame F_C (x right, y down, z forward).
struct CameraVector {
    double x_m = 0.0;
    double y_m = 0.0;
    double z_m = 0.0;

    Eigen::Vector3d vec() const { return {x_m, y_m, z_m}; }
    static CameraVector from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

/// Image-plane point, fractional pixels.
struct PixelPoint {
    double u = 0.0;  // column
    double v = 0.0;  // row
};

struct CameraIntrinsics {
    double fx = 0.0, fy = 0.0;  // focal lengths [px]
    double cx = 0.0, cy = 0.0;  // principal point [px]
    int i_w = 0, i_h = 0;       // sensor resolution [px]
};

/// Camera mounting angles, degrees.
struct ExtrinsicAngles {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
};

enum class RotationOrder {
    ZXY,  // R_z(yaw) * R_x(pitch) * R_y(roll)
    ZYX,  // R_z(yaw) * R_y(pitch) * R_x(roll)
};

struct CameraModel {
    CameraIntrinsics intrinsics;
    ExtrinsicAngles angles;
    Eigen::Matrix3d r_c_v = default_r_c_v();  // fixed axis rotation F_V -> F_C
    VehicleVector t_vc{0.0, 0.0, 1.5};        // lens offset from the RTK antenna
    RotationOrder rotation_order = RotationOrder::ZXY;

    /// (x,y,z)_V -> (-y,-z,x)_C: vehicle forward becomes optical z.
    static Eigen::Matrix3d default_r_c_v();
};

/// Mounting rotation R_z(yaw) * R_x(pitch) * R_y(roll) (or the zyx
/// alternative), right-handed active elementary rotations, angles in degrees.
Eigen::Matrix3d rotation_zyx(const ExtrinsicAngles& angles,
                             RotationOrder order = RotationOrder::ZXY);

/// p_C = R_zyx * R_C^V * p_rel.  p_rel is relative to the camera lens,
/// expressed in F_V (t_vc already removed).
CameraVector vehicle_to_camera(const VehicleVector& p_rel, const CameraModel& model);

/// Convenience wrapper: subtracts the lens offset first.
CameraVector vehicle_point_to_camera(const VehicleVector& p_v, const CameraModel& model);

/// Pinhole projection. Throws BehindCameraError when z_m <= 0.
PixelPoint project_pinhole(const CameraVector& p_c, const CameraIntrinsics& intr);

/// Intersect the pixel ray with the ground plane z = 0 of F_V.
/// Throws NoGroundIntersectionError when the ray misses the ground.
VehicleVector back_project_ground(const PixelPoint& pixel, const CameraModel& model);

/// Load/store the camera model as a JSON config (keys: fx, fy, cx, cy, i_w,
/// i_h, yaw_deg, pitch_deg, roll_deg, r_c_v row-major, t_vc, rotation_order).
CameraModel load_camera_model(const std::string& path);
void save_camera_model(const CameraModel& model, const std::string& path);

}  // namespace crackdet
