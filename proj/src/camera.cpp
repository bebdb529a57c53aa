#include "crackdet/camera.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "crackdet/errors.hpp"

namespace crackdet {

namespace {

constexpr double kGroundRayTolerance = 1e-12;

constexpr double deg2rad(double d) { return d * M_PI / 180.0; }

Eigen::Matrix3d rot_x(double rad) {
    const double c = std::cos(rad), s = std::sin(rad);
    Eigen::Matrix3d m;
    m << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return m;
}

Eigen::Matrix3d rot_y(double rad) {
    const double c = std::cos(rad), s = std::sin(rad);
    Eigen::Matrix3d m;
    m << c, 0, s,
         0, 1, 0,
         -s, 0, c;
    return m;
}

Eigen::Matrix3d rot_z(double rad) {
    const double c = std::cos(rad), s = std::sin(rad);
    Eigen::Matrix3d m;
    m << c, -s, 0,
         s, c, 0,
         0, 0, 1;
    return m;
}

}  // namespace

Eigen::Matrix3d CameraModel::default_r_c_v() {
    Eigen::Matrix3d m;
    m << 0, -1, 0,
         0, 0, -1,
         1, 0, 0;
    return m;
}

Eigen::Matrix3d rotation_zyx(const ExtrinsicAngles& angles, RotationOrder order) {
    const double yaw = deg2rad(angles.yaw_deg);
    const double pitch = deg2rad(angles.pitch_deg);
    const double roll = deg2rad(angles.roll_deg);
    if (order == RotationOrder::ZYX)
        return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
    return rot_z(yaw) * rot_x(pitch) * rot_y(roll);
}

CameraVector vehicle_to_camera(const VehicleVector& p_rel, const CameraModel& model) {
    const Eigen::Matrix3d r = rotation_zyx(model.angles, model.rotation_order);
    return CameraVector::from(r * model.r_c_v * p_rel.vec());
}

CameraVector vehicle_point_to_camera(const VehicleVector& p_v, const CameraModel& model) {
    return vehicle_to_camera(p_v - model.t_vc, model);
}

PixelPoint project_pinhole(const CameraVector& p_c, const CameraIntrinsics& intr) {
    if (!(p_c.z_m > 0.0))
        throw BehindCameraError("projection requires z_C > 0, got z_C = " +
                                std::to_string(p_c.z_m));
    return {intr.fx * p_c.x_m / p_c.z_m + intr.cx,
            intr.fy * p_c.y_m / p_c.z_m + intr.cy};
}

VehicleVector back_project_ground(const PixelPoint& pixel, const CameraModel& model) {
    const CameraIntrinsics& k = model.intrinsics;
    const Eigen::Vector3d norm_c{(pixel.u - k.cx) / k.fx, (pixel.v - k.cy) / k.fy, 1.0};
    const Eigen::Matrix3d r = rotation_zyx(model.angles, model.rotation_order);
    const Eigen::Vector3d norm_v = model.r_c_v.transpose() * r.transpose() * norm_c;

    if (norm_v.z() >= -kGroundRayTolerance)
        throw NoGroundIntersectionError("pixel ray does not reach the ground plane");

    const double cz = -model.t_vc.z_m / norm_v.z();
    VehicleVector out = model.t_vc + VehicleVector::from(cz * norm_v);
    out.z_m = 0.0;  // lies on the ground plane by construction
    return out;
}

CameraModel load_camera_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open camera model: " + path);
    nlohmann::json j;
    in >> j;

    CameraModel m;
    m.intrinsics.fx = j.at("fx").get<double>();
    m.intrinsics.fy = j.at("fy").get<double>();
    m.intrinsics.cx = j.at("cx").get<double>();
    m.intrinsics.cy = j.at("cy").get<double>();
    m.intrinsics.i_w = j.at("i_w").get<int>();
    m.intrinsics.i_h = j.at("i_h").get<int>();
    m.angles.yaw_deg = j.value("yaw_deg", 0.0);
    m.angles.pitch_deg = j.value("pitch_deg", 0.0);
    m.angles.roll_deg = j.value("roll_deg", 0.0);
    if (j.contains("r_c_v")) {
        const auto rows = j.at("r_c_v").get<std::vector<double>>();
        if (rows.size() != 9) throw ConfigError("r_c_v must have 9 entries");
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m.r_c_v(r, c) = rows[r * 3 + c];
    }
    if (j.contains("t_vc")) {
        const auto t = j.at("t_vc").get<std::vector<double>>();
        if (t.size() != 3) throw ConfigError("t_vc must have 3 entries");
        m.t_vc = {t[0], t[1], t[2]};
    }
    const std::string order = j.value("rotation_order", "zxy");
    if (order == "zxy") m.rotation_order = RotationOrder::ZXY;
    else if (order == "zyx") m.rotation_order = RotationOrder::ZYX;
    else throw ConfigError("rotation_order must be zxy or zyx");

    if (m.intrinsics.fx <= 0 || m.intrinsics.fy <= 0)
        throw ConfigError("focal lengths must be positive");
    if (!(m.intrinsics.cx > 0 && m.intrinsics.cx < m.intrinsics.i_w) ||
        !(m.intrinsics.cy > 0 && m.intrinsics.cy < m.intrinsics.i_h))
        throw ConfigError("principal point must lie inside the sensor");
    if (std::abs(m.r_c_v.determinant() - 1.0) > 1e-9 ||
        (m.r_c_v.transpose() * m.r_c_v - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9)
        throw ConfigError("r_c_v must be a proper rotation");
    if (!(m.t_vc.z_m > 0)) throw ConfigError("t_vc.z must be positive (camera above ground)");
    return m;
}

void save_camera_model(const CameraModel& model, const std::string& path) {
    nlohmann::json j;
    j["fx"] = model.intrinsics.fx;
    j["fy"] = model.intrinsics.fy;
    j["cx"] = model.intrinsics.cx;
    j["cy"] = model.intrinsics.cy;
    j["i_w"] = model.intrinsics.i_w;
    j["i_h"] = model.intrinsics.i_h;
    j["yaw_deg"] = model.angles.yaw_deg;
    j["pitch_deg"] = model.angles.pitch_deg;
    j["roll_deg"] = model.angles.roll_deg;
    std::vector<double> rows;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rows.push_back(model.r_c_v(r, c));
    j["r_c_v"] = rows;
    j["t_vc"] = {model.t_vc.x_m, model.t_vc.y_m, model.t_vc.z_m};
    j["rotation_order"] = model.rotation_order == RotationOrder::ZXY ? "zxy" : "zyx";

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write camera model: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace crackdet
