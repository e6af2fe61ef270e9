#include <doctest.h>

#include <cmath>

#include "arraymem/detection_mode.hpp"
#include "arraymem/error.hpp"

using namespace arraymem;

namespace {

constexpr double kPi = std::numbers::pi;

double focus_closed_form(double w0, double e0) {
    const double a = kPi * kPi * w0 * w0;  // k0^2 w0^2 / 4
    return e0 * (1.0 - std::exp(-a)) / (2.0 * a);
}

} // namespace

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(DetectionMode(0.0), InvalidArgument);
    CHECK_THROWS_AS(DetectionMode(-1.0), InvalidArgument);
    CHECK_THROWS_AS(DetectionMode(1.0, 1.0, true, 1e-3), InvalidArgument);
    CHECK_THROWS_AS(DetectionMode(1.0, 1.0, true, 0.0), InvalidArgument);
}

TEST_CASE("focus value") {
    for (double w0 : {0.5, 1.0, 2.0, 3.5}) {
        DetectionMode m(w0, 1.7);
        const double expected = focus_closed_form(w0, 1.7);
        CHECK(m.focus_value() == doctest::Approx(expected).epsilon(1e-14));
        const CVec3 e = detection_field(m, Vec3::Zero());
        CHECK(std::abs(e.x() - expected) <= 1e-9 * expected);
    }
}

TEST_CASE("longitudinal field vanishes on axis, transverse y is zero") {
    DetectionMode m(1.2);
    for (double z : {-3.0, 0.0, 0.7, 4.0}) {
        const CVec3 e = detection_field(m, Vec3(0, 0, z));
        CHECK(std::abs(e.z()) == 0.0);
        CHECK(std::abs(e.y()) == 0.0);
    }
    const CVec3 off = detection_field(m, Vec3(0.4, 0.3, 0.2));
    CHECK(std::abs(off.y()) == 0.0);
    CHECK(std::abs(off.z()) > 0.0);
}

TEST_CASE("large waist approaches the paraxial Gaussian") {
    DetectionMode m(20.0);
    const double e0 = m.focus_value();
    for (double rho = 0.0; rho <= 20.0; rho += 2.5) {
        const cdouble ex = detection_field(m, Vec3(rho, 0, 0)).x();
        const double gauss = e0 * std::exp(-rho * rho / 400.0);
        CHECK(std::abs(ex - gauss) <= 1e-4 * gauss);
    }
}

TEST_CASE("focal plane field is real") {
    DetectionMode m(1.5);
    for (double x = -2.0; x <= 2.0; x += 0.5) {
        const CVec3 e = detection_field(m, Vec3(x, 0.6 * x, 0.0));
        CHECK(std::abs(e.x().imag()) <= 1e-10 * std::abs(e.x()) + 1e-300);
    }
}

TEST_CASE("norm scales quadratically with amplitude") {
    DetectionMode a(1.5, 1.0), b(1.5, 2.0);
    CHECK(b.norm() == doctest::Approx(4.0 * a.norm()).epsilon(1e-12));
    CHECK(a.norm() > 0.0);
    // Copies share the cached value.
    DetectionMode c = a;
    CHECK(c.norm() == a.norm());
}

TEST_CASE("norm is plane independent and matches real space") {
    DetectionMode m(3.0);
    const double k_space = mode_norm(m);
    CHECK(std::abs(mode_norm_real_space(m, 0.0) - k_space) <= 1e-8 * k_space);
    CHECK(std::abs(mode_norm_real_space(m, 5.0) - k_space) <= 1e-8 * k_space);
}

TEST_CASE("paraxial limit of the flux") {
    // Gaussian beam power pi w0^2 E0^2 / 2 for large waists.
    DetectionMode m(10.0);
    const double e0 = m.focus_value();
    CHECK(mode_norm(m) == doctest::Approx(kPi * 100.0 * e0 * e0 / 2.0).epsilon(1e-3));
}

TEST_CASE("mode samples") {
    DetectionMode m(2.0);
    auto single = sample_mode(m, build_square_array(1, 0.6), Model::TwoLevel);
    REQUIRE(single.values.size() == 1);
    CHECK(std::abs(single.values[0] - focus_closed_form(2.0, 1.0)) <= 1e-9 * focus_closed_form(2.0, 1.0));
    CHECK(single.norm == m.norm());
    CHECK(single.two_sided);

    auto quad = sample_mode(m, build_square_array(2, 0.6), Model::TwoLevel);
    for (int j = 1; j < 4; ++j) CHECK(std::abs(quad.values[j] - quad.values[0]) <= 1e-12 * std::abs(quad.values[0]));

    auto iso = sample_mode(m, build_square_array(3, 0.6), Model::Isotropic);
    REQUIRE(iso.values.size() == 27);
    CHECK(iso.atoms() == 9);
    auto tl = sample_mode(m, build_square_array(3, 0.6), Model::TwoLevel);
    for (int j = 0; j < 9; ++j) {
        CHECK(iso.values[3 * j + 1] == cdouble(0.0));
        CHECK(iso.values[3 * j] == tl.values[j]);
        CHECK(std::abs(tl.values[j].imag()) <= 1e-10 * std::abs(tl.values[j]));
    }
}

TEST_CASE("sampling is deterministic") {
    DetectionMode m(1.3);
    const Vec3 r(0.31, -0.77, 0.0);
    const CVec3 a = detection_field(m, r);
    const CVec3 b = detection_field(m, r);
    CHECK(a == b);
}

TEST_CASE("projection of a dipole onto the mode") {
    DetectionMode m(2.0);
    auto x = validate_projection(m, Vec3::Zero(), Vec3::UnitX(), 5.0);
    CHECK(x.relative_discrepancy < 1e-4);
    CHECK(std::abs(x.closed_form) > 0.0);

    auto y = validate_projection(m, Vec3::Zero(), Vec3::UnitY(), 5.0);
    CHECK(std::abs(y.closed_form) == 0.0);
    CHECK(y.absolute_discrepancy < 1e-6 * std::abs(x.closed_form));

    auto far = validate_projection(m, Vec3(10.0, 0, 0), Vec3::UnitX(), 5.0);
    CHECK(std::abs(far.numeric) < 1e-3 * std::abs(x.numeric));
    CHECK(far.absolute_discrepancy < 1e-4 * std::abs(x.closed_form));

    CHECK_THROWS_AS(validate_projection(m, Vec3::Zero(), Vec3::UnitX(), -1.0), InvalidArgument);
}
