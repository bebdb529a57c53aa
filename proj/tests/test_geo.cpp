#include <cmath>
#include <random>

#include "doctest.h"

#include "crackdet/camera.hpp"
#include "crackdet/errors.hpp"
#include "crackdet/geodesy.hpp"
#include "support/synthetic.hpp"

using namespace crackdet;

TEST_CASE("geodetic_to_enu identity") {
    const GeoPoint p{45.0, 7.0, 120.0};
    const EnuVector e = geodetic_to_enu(p, p);
    CHECK(e.east_m == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.north_m == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.up_m == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("geodetic_to_enu equator longitude step, frozen oracle") {
    // Values frozen from a 40-digit WGS84 ECEF evaluation.
    const EnuVector e = geodetic_to_enu({0.0, 0.001, 0.0}, {0.0, 0.0, 0.0});
    CHECK(e.east_m == doctest::Approx(111.31949078762193).epsilon(1e-10));
    CHECK(e.north_m == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(e.up_m == doctest::Approx(-9.7144581796840921e-4).epsilon(1e-6));
}

TEST_CASE("geodetic_to_enu mid-latitude offset, frozen oracle") {
    const EnuVector e = geodetic_to_enu({45.0005, 7.001, 12.0}, {45.0, 7.0, 10.0});
    CHECK(e.east_m == doctest::Approx(78.846297424176672).epsilon(1e-10));
    CHECK(e.north_m == doctest::Approx(55.566482403718610).epsilon(1e-10));
    CHECK(e.up_m == doctest::Approx(1.9992710130603557).epsilon(1e-9));
}

TEST_CASE("geodetic_to_enu pure altitude offset") {
    const EnuVector e = geodetic_to_enu({0.0, 0.0, 5.0}, {0.0, 0.0, 0.0});
    CHECK(e.east_m == doctest::Approx(0.0));
    CHECK(e.north_m == doctest::Approx(0.0));
    CHECK(e.up_m == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("geodetic_to_enu rejects invalid fixes") {
    CHECK_THROWS_AS(geodetic_to_enu({91.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(geodetic_to_enu({0.0, 0.0, 0.0}, {0.0, 181.0, 0.0}), std::domain_error);
}

TEST_CASE("geodetic_to_enu antisymmetry at small separations") {
    // The tangent planes at a and b differ by ~|d|/R radians, so exact
    // antisymmetry only holds at meter scale (error ~ |d|^2 / 2R).
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dlat(-1e-5, 1e-5), dlon(-1e-5, 1e-5),
        alt(-0.5, 0.5);
    for (int i = 0; i < 200; ++i) {
        const GeoPoint a{45.0 + dlat(rng), 7.0 + dlon(rng), alt(rng)};
        const GeoPoint b{45.0 + dlat(rng), 7.0 + dlon(rng), alt(rng)};
        const EnuVector ab = geodetic_to_enu(a, b);
        const EnuVector ba = geodetic_to_enu(b, a);
        CHECK(std::abs(ab.east_m + ba.east_m) < 1e-6);
        CHECK(std::abs(ab.north_m + ba.north_m) < 1e-6);
        CHECK(std::abs(ab.up_m + ba.up_m) < 1e-6);
    }
}

TEST_CASE("rotation_zyx zero angles is identity") {
    const Eigen::Matrix3d r = rotation_zyx({0, 0, 0});
    CHECK((r - Eigen::Matrix3d::Identity()).norm() < 1e-15);
}

TEST_CASE("rotation_zyx pure yaw is an elementary z rotation") {
    const Eigen::Matrix3d r = rotation_zyx({90, 0, 0});
    const Eigen::Vector3d v = r * Eigen::Vector3d(1, 0, 0);
    CHECK(v.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v.y() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.z() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rotation_zyx (10,20,30) matches the frozen high-precision product") {
    Eigen::Matrix3d expected;
    expected << 0.823172944645500856, -0.163175911166534826, 0.543838142482325634,
                0.318795777597167884, 0.925416578398323353, -0.204874128702862136,
               -0.469846310392954192, 0.342020143325668733, 0.813797681349373693;
    const Eigen::Matrix3d r = rotation_zyx({10, 20, 30});
    CHECK((r - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("rotation_zyx stays orthonormal over random angles") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(-180.0, 180.0);
    for (int i = 0; i < 1000; ++i) {
        const Eigen::Matrix3d r = rotation_zyx({ang(rng), ang(rng), ang(rng)});
        CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("vehicle_to_camera axis relabeling and yaw composition") {
    CameraModel m = testsupport::test_camera();
    const VehicleVector p{10.0, 0.0, -1.5};

    const CameraVector c0 = vehicle_to_camera(p, m);
    CHECK(c0.x_m == doctest::Approx(0.0));
    CHECK(c0.y_m == doctest::Approx(1.5));
    CHECK(c0.z_m == doctest::Approx(10.0));

    m.angles.yaw_deg = 90.0;
    const CameraVector c1 = vehicle_to_camera(p, m);
    CHECK(c1.x_m == doctest::Approx(-1.5));
    CHECK(c1.y_m == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c1.z_m == doctest::Approx(10.0));
}

TEST_CASE("vehicle_to_camera preserves the Euclidean norm") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(-50.0, 50.0), ang(-180.0, 180.0);
    CameraModel m = testsupport::test_camera();
    for (int i = 0; i < 500; ++i) {
        m.angles = {ang(rng), ang(rng), ang(rng)};
        const VehicleVector p{coord(rng), coord(rng), coord(rng)};
        const CameraVector c = vehicle_to_camera(p, m);
        CHECK(c.vec().norm() == doctest::Approx(p.vec().norm()).epsilon(1e-12));
    }
}

TEST_CASE("project_pinhole basics") {
    const CameraIntrinsics k{1000, 1000, 1032, 772, 2064, 1544};
    const PixelPoint on_axis = project_pinhole({0, 0, 10}, k);
    CHECK(on_axis.u == doctest::Approx(1032.0));
    CHECK(on_axis.v == doctest::Approx(772.0));

    const PixelPoint off = project_pinhole({1, 0.5, 10}, k);
    CHECK(off.u == doctest::Approx(1132.0));
    CHECK(off.v == doctest::Approx(822.0));

    CHECK_THROWS_AS(project_pinhole({1, 0.5, -10}, k), BehindCameraError);
}

TEST_CASE("back_project_ground direct arithmetic") {
    CameraModel m = testsupport::test_camera();
    m.intrinsics = {1000, 1000, 500, 500, 1000, 1000};
    // pixel maps to normalized camera ray (0, 0.25, 1) -> ground at (6, 0, 0)
    const VehicleVector g = back_project_ground({500, 750}, m);
    CHECK(g.x_m == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(g.y_m == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.z_m == 0.0);
}

TEST_CASE("back_project_ground rejects horizon rays") {
    CameraModel m = testsupport::test_camera();
    m.intrinsics = {1000, 1000, 500, 500, 1000, 1000};
    CHECK_THROWS_AS(back_project_ground({500, 500}, m), NoGroundIntersectionError);  // horizontal
    CHECK_THROWS_AS(back_project_ground({500, 200}, m), NoGroundIntersectionError);  // skyward
}

TEST_CASE("projection / ground back-projection round trip") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> ang(-15.0, 15.0);
    std::uniform_real_distribution<double> fwd(1.0, 100.0), lat(-30.0, 30.0);

    CameraModel m = testsupport::test_camera();
    int tested = 0;
    while (tested < 2000) {
        m.angles = {ang(rng), ang(rng), ang(rng)};
        const VehicleVector g{fwd(rng), lat(rng), 0.0};
        const CameraVector pc = vehicle_to_camera(g - m.t_vc, m);
        if (pc.z_m < 1.0 || pc.z_m > 100.0) continue;
        const PixelPoint px = project_pinhole(pc, m.intrinsics);
        if (px.u < 0 || px.u >= m.intrinsics.i_w || px.v < 0 || px.v >= m.intrinsics.i_h)
            continue;
        const VehicleVector back = back_project_ground(px, m);
        CHECK((back.vec() - g.vec()).norm() < 1e-6);
        ++tested;
    }
}
