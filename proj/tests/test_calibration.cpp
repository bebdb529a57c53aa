#include <cmath>
#include <random>

#include "doctest.h"

#include "crackdet/calibration.hpp"
#include "crackdet/errors.hpp"
#include "support/synthetic.hpp"

using namespace crackdet;
using namespace testsupport;

namespace {

CropWindow window_at(int u_min, int v_min, int l = 512) {
    CropWindow w;
    w.u_min = u_min;
    w.v_min = v_min;
    w.u_max = u_min + l;
    w.v_max = v_min + l;
    w.b_w = w.b_h = l;
    return w;
}

}  // namespace

TEST_CASE("oog containment, disjoint and half overlap") {
    const CropWindow crop = window_at(0, 0);
    CHECK(oog(crop, {256, 256, 100, 100}) == doctest::Approx(1.0));
    CHECK(oog(crop, {1000, 1000, 100, 100}) == doctest::Approx(0.0));
    // gt box centered on the right edge: left half inside
    CHECK(oog(crop, {512, 256, 100, 100}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(oog(crop, {256, 256, 0, 100}), std::domain_error);
}

TEST_CASE("oog is monotone as the gt box slides away") {
    const CropWindow crop = window_at(100, 100);
    double prev = 2.0;
    for (double shift = 0.0; shift <= 700.0; shift += 25.0) {
        const double v = oog(crop, {356 + shift, 356, 120, 120});
        CHECK(v <= prev + 1e-12);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("boundary_pixel coincident centers degenerates to the corner") {
    const BoundaryPixel b = boundary_pixel({1000, 800}, {1000, 800}, 512, 1e-9);
    CHECK(b.x_star == doctest::Approx(1256.0).epsilon(1e-9));
    CHECK(b.y_star == doctest::Approx(1056.0).epsilon(1e-9));
    CHECK(b.d_crop == doctest::Approx(256.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(b.offset == doctest::Approx(256.0 - 256.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("boundary_pixel gt on the right-edge midpoint") {
    const BoundaryPixel b = boundary_pixel({1000, 800}, {1256, 800}, 512, 1e-9);
    CHECK(b.x_star == doctest::Approx(1256.0));
    CHECK(b.y_star == doctest::Approx(800.0).epsilon(1e-9));
    CHECK(b.d_crop == doctest::Approx(256.0));
    CHECK(b.offset == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(b.d_gt == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("boundary_pixel gt halfway to the right edge") {
    const BoundaryPixel b = boundary_pixel({1000, 800}, {1128, 800}, 512, 1e-9);
    CHECK(b.x_star == doctest::Approx(1256.0));
    CHECK(b.d_gt == doctest::Approx(128.0).epsilon(1e-9));
}

TEST_CASE("aot fixture values") {
    const CropWindow crop = window_at(744, 544);  // center (1000, 800)
    const double r = 512.0 * std::sqrt(2.0) / 2.0;

    CHECK(aot(crop, {1000, 800, 80, 80}) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(aot(crop, {1256, 800, 80, 80}) == doctest::Approx(0.0).scale(1).epsilon(1e-9));
    CHECK(aot(crop, {1128, 800, 80, 80}) == doctest::Approx(128.0 / r).epsilon(1e-9));

    CropWindow rect = crop;
    rect.b_h = 256;
    CHECK_THROWS_AS(aot(rect, {1000, 800, 80, 80}), ConfigError);
}

TEST_CASE("aot is maximized when the gt center hits the crop center") {
    const CropWindow crop = window_at(744, 544);
    const double peak = aot(crop, {1000, 800, 80, 80});
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> off(-255.0, 255.0);
    for (int i = 0; i < 2000; ++i) {
        const double du = off(rng), dv = off(rng);
        if (du == 0.0 && dv == 0.0) continue;
        CHECK(aot(crop, {1000 + du, 800 + dv, 80, 80}) < peak + 1e-12);
    }
}

TEST_CASE("calibration objective at truth with perfectly aligned gt boxes") {
    // gt boxes rendered at the crop-window centers under the true angles:
    // every sample scores OoG 1 and AoT 1/sqrt(2) exactly.
    const CameraModel m = test_camera();
    std::mt19937_64 rng(41);
    auto samples = make_calibration_scene(m, {0, 0, 0}, rng, 4);
    for (CalibrationSample& s : samples) {
        FrameRecord fr;
        fr.vehicle_fix = s.vehicle_fix;
        fr.heading_deg = s.heading_deg;
        const auto px = project_pinhole(
            vehicle_to_camera(crack_relative_to_lens(fr, s.target_fix, m), m), m.intrinsics);
        const CropWindow w = compute_crop_window(px, 512, 512, 2064, 1544);
        s.gt_box.center_u = w.center_u();
        s.gt_box.center_v = w.center_v();
    }
    const double obj = calibration_objective(samples, m, {0, 0, 0}, 512);
    CHECK(obj == doctest::Approx(4.0 * (1.0 + 1.0 / std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("calibration objective is permutation invariant") {
    const CameraModel m = test_camera();
    std::mt19937_64 rng(43);
    auto samples = make_calibration_scene(m, {2, -1, 0}, rng, 5);
    const double a = calibration_objective(samples, m, {1, 0, 0}, 512);
    std::reverse(samples.begin(), samples.end());
    CHECK(calibration_objective(samples, m, {1, 0, 0}, 512) == doctest::Approx(a).epsilon(1e-15));
}

TEST_CASE("calibrate_extrinsics recovers known angles at 1 degree") {
    const CameraModel m = test_camera();
    std::mt19937_64 rng(47);
    const ExtrinsicAngles truth{2.0, -1.0, 0.0};
    const auto samples = make_calibration_scene(m, truth, rng, 5);
    const CalibrationResult r = calibrate_extrinsics(samples, m, {10.0, 1.0});
    CHECK(std::abs(r.angles.yaw_deg - truth.yaw_deg) <= 1.0);
    CHECK(std::abs(r.angles.pitch_deg - truth.pitch_deg) <= 1.0);
    CHECK(std::abs(r.angles.roll_deg - truth.roll_deg) <= 1.0);
    CHECK(r.per_sample.size() == 5);
    // returned angles lie on the 1-degree search grid
    CHECK(r.angles.yaw_deg == doctest::Approx(std::round(r.angles.yaw_deg)));
    CHECK(r.angles.pitch_deg == doctest::Approx(std::round(r.angles.pitch_deg)));
    CHECK(r.angles.roll_deg == doctest::Approx(std::round(r.angles.roll_deg)));
}

TEST_CASE("objective at the true angles dominates a small exhaustive sweep") {
    const CameraModel m = test_camera();
    std::mt19937_64 rng(53);
    const ExtrinsicAngles truth{1.0, -2.0, 2.0};
    const auto samples = make_calibration_scene(m, truth, rng, 5);
    const double at_truth = calibration_objective(samples, m, truth, 512);
    for (int y = -4; y <= 4; y += 2)
        for (int p = -4; p <= 4; p += 2)
            for (int r = -4; r <= 4; r += 2) {
                const ExtrinsicAngles a{truth.yaw_deg + y, truth.pitch_deg + p,
                                        truth.roll_deg + r};
                CHECK(calibration_objective(samples, m, a, 512) <= at_truth + 1e-9);
            }
}

TEST_CASE("calibrate_extrinsics error paths") {
    const CameraModel m = test_camera();
    CHECK_THROWS_AS(calibrate_extrinsics({}, m, {10.0, 1.0}), std::domain_error);

    // gt boxes absurdly far from anything projectable: infeasible everywhere
    std::mt19937_64 rng(59);
    auto samples = make_calibration_scene(m, {0, 0, 0}, rng, 2);
    for (auto& s : samples) {
        s.gt_box.center_u = -5000.0;
        s.gt_box.center_v = -5000.0;
    }
    CHECK_THROWS_AS(calibrate_extrinsics(samples, m, {3.0, 1.0}), CalibrationFailedError);
}
