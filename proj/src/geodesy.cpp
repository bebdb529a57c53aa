#include "crackdet/geodesy.hpp"

#include <cmath>
#include <stdexcept>

namespace crackdet {

namespace {

constexpr double kSemiMajorM = 6378137.0;
constexpr double kFlattening = 1.0 / 298.257223563;
constexpr double kEcc2 = kFlattening * (2.0 - kFlattening);

constexpr double deg2rad(double d) { return d * M_PI / 180.0; }

Eigen::Vector3d geodetic_to_ecef(const GeoPoint& p) {
    const double lat = deg2rad(p.lat_deg);
    const double lon = deg2rad(p.lon_deg);
    const double slat = std::sin(lat), clat = std::cos(lat);
    const double n = kSemiMajorM / std::sqrt(1.0 - kEcc2 * slat * slat);
    return {(n + p.alt_m) * clat * std::cos(lon),
            (n + p.alt_m) * clat * std::sin(lon),
            (n * (1.0 - kEcc2) + p.alt_m) * slat};
}

void check_fix(const GeoPoint& p, const char* name) {
    if (!(p.lat_deg >= -90.0 && p.lat_deg <= 90.0))
        throw std::domain_error(std::string(name) + ": latitude out of [-90, 90]");
    if (!(p.lon_deg >= -180.0 && p.lon_deg <= 180.0))
        throw std::domain_error(std::string(name) + ": longitude out of [-180, 180]");
}

}  // namespace

EnuVector geodetic_to_enu(const GeoPoint& target, const GeoPoint& reference) {
    check_fix(target, "target");
    check_fix(reference, "reference");

    const Eigen::Vector3d d = geodetic_to_ecef(target) - geodetic_to_ecef(reference);
    const double lat = deg2rad(reference.lat_deg);
    const double lon = deg2rad(reference.lon_deg);
    const double slat = std::sin(lat), clat = std::cos(lat);
    const double slon = std::sin(lon), clon = std::cos(lon);

    return {-slon * d.x() + clon * d.y(),
            -slat * clon * d.x() - slat * slon * d.y() + clat * d.z(),
            clat * clon * d.x() + clat * slon * d.y() + slat * d.z()};
}

VehicleVector enu_to_vehicle(const EnuVector& enu, double heading_deg) {
    // Heading is clockwise from north; forward in ENU is (sin h, cos h, 0).
    const double h = deg2rad(heading_deg);
    const double sh = std::sin(h), ch = std::cos(h);
    return {sh * enu.east_m + ch * enu.north_m,
            -ch * enu.east_m + sh * enu.north_m,
            enu.up_m};
}

}  // namespace crackdet
