#pragma once

#include <Eigen/Core>

namespace crackdet {

/// WGS84 geodetic fix.
struct GeoPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double alt_m = 0.0;
    bool operator==(const GeoPoint&) const = default;
};

/// Position in a local east-north-up tangent plane.
struct EnuVector {
    double east_m = 0.0;
    double north_m = 0.0;
    double up_m = 0.0;
};

/// Position in the vehicle body frame F_V (x forward, y left, z up,
/// origin at the RTK antenna, ground plane z = 0).
struct VehicleVector {
    double x_m = 0.0;
    double y_m = 0.0;
    double z_m = 0.0;

    Eigen::Vector3d vec() const { return {x_m, y_m, z_m}; }
    static VehicleVector from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

inline VehicleVector operator-(const VehicleVector& a, const VehicleVector& b) {
    return {a.x_m - b.x_m, a.y_m - b.y_m, a.z_m - b.z_m};
}
inline VehicleVector operator+(const VehicleVector& a, const VehicleVector& b) {
    return {a.x_m + b.x_m, a.y_m + b.y_m, a.z_m + b.z_m};
}

/// Geodetic -> ECEF -> ENU, full WGS84 ellipsoid chain.
/// Throws std::domain_error on out-of-range latitude/longitude.
EnuVector geodetic_to_enu(const GeoPoint& target, const GeoPoint& reference);

/// Rotate a local ENU displacement into the vehicle body frame given the
/// vehicle heading (degrees clockwise from true north).
VehicleVector enu_to_vehicle(const EnuVector& enu, double heading_deg);

}  // namespace crackdet
