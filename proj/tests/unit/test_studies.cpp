#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "arraymem/error.hpp"
#include "arraymem/parallel.hpp"
#include "arraymem/studies.hpp"

using namespace arraymem;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = a + (b - a) * k / (n - 1);
    return out;
}

} // namespace

TEST_CASE("model terms") {
    CHECK(clipping_term(10, 0.6, 1e-3) == 0.0);
    CHECK(clipping_term(10, 0.6, 3.0) == doctest::Approx(1.0 - std::pow(std::erf(6.0 / (std::sqrt(2.0) * 3.0)), 2)));
    CHECK(error_model(2e-3, 10, 0.6, 2.0) == doctest::Approx(2e-3 / 16.0 + clipping_term(10, 0.6, 2.0)));
    CHECK(scaling_estimate(10) == doctest::Approx(std::pow(std::log(100.0), 2) / 4e4));
}

TEST_CASE("power-law fit") {
    std::vector<double> x{1, 2, 4, 8}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -2.5));
    auto fit = fit_power_law(x, y);
    CHECK(fit.value == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.residual_norm < 1e-12);
    CHECK(fit.points == 4);
    CHECK_THROWS_AS(fit_power_law({1.0}, {1.0}), FitWindowError);
    CHECK_THROWS_AS(fit_power_law({1.0, 2.0}, {1.0, -1.0}), InvalidArgument);
}

TEST_CASE("error-model fit recovers synthetic data") {
    WaistScan scan;
    scan.n = 20;
    scan.d = 0.6;
    for (double w : linspace(1.5, 4.0, 21)) {
        const double eps = error_model(2.4e-3, 20, 0.6, w);
        scan.points.push_back({w, 1.0 - eps, eps, clipping_term(20, 0.6, w)});
    }
    auto fit = fit_error_model(scan);
    CHECK(std::abs(fit.value - 2.4e-3) < 1e-6 * 2.4e-3);
    CHECK(fit.window_lo == 1.5);
    CHECK(fit.window_hi < 4.0);
    for (const auto& p : scan.points)
        if (p.w0 >= fit.window_lo && p.w0 <= fit.window_hi) CHECK(p.clipping < 0.1 * p.epsilon);
    CHECK(fit_waist_slope(scan).value < -3.5);

    WaistScan clipped = scan;
    for (auto& p : clipped.points) p.epsilon = p.clipping;
    CHECK_THROWS_AS(fit_error_model(clipped), FitWindowError);
}

TEST_CASE("single atom error grows with the waist") {
    auto scan = scan_waist(1, 0.6, linspace(1.0, 4.0, 13));
    for (std::size_t k = 1; k < scan.points.size(); ++k) CHECK(scan.points[k].epsilon > scan.points[k - 1].epsilon);
}

TEST_CASE("waist scan of a 6x6 array") {
    auto scan = scan_waist(6, 0.6, linspace(0.6, 2.4, 19));
    CHECK(scan.unimodal());
    for (const auto& p : scan.points) {
        CHECK(p.epsilon >= 0.0);
        CHECK(p.epsilon <= 1.0);
        CHECK(p.eta + p.epsilon == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(scan_waist(6, 0.6, {1.0, 0.9}), InvalidArgument);
    CHECK_THROWS_AS(scan_waist(6, 0.6, {-1.0}), InvalidArgument);
    CHECK_THROWS_AS(scan_waist(6, 0.6, {}), InvalidArgument);

    auto j = summary_json(scan);
    CHECK(j["unimodal"] == true);
    CHECK(j.contains("best"));
}

TEST_CASE("fit residual drops when the crossover is excluded") {
    auto scan = scan_waist(10, 0.6, linspace(1.2, 3.0, 19));
    auto loose = fit_error_model(scan, 0.8);
    auto strict = fit_error_model(scan, 0.1);
    CHECK(loose.points > strict.points);
    CHECK(strict.residual_norm < loose.residual_norm);
}

TEST_CASE("optimal waist") {
    RetrievalProblem four(build_square_array(4, 0.6));
    auto opt = optimal_waist(four);
    CHECK(opt.epsilon < 0.01);
    CHECK_FALSE(opt.fallback);
    CHECK(opt.w0 / (4 * 0.6) > 0.0);
    CHECK(opt.w0 / (4 * 0.6) < 1.0);
    CHECK(std::abs(opt.spin_wave.norm() - 1.0) < 1e-12);
    // Neighbouring waists are no better.
    CHECK(four.error(opt.w0 * 1.01) >= opt.epsilon);
    CHECK(four.error(opt.w0 * 0.99) >= opt.epsilon);

    RetrievalProblem single(build_square_array(1, 0.6));
    CHECK_THROWS_AS(optimal_waist(single), InvalidArgument);
}

TEST_CASE("hole study basics") {
    auto study = hole_study(6, 0.6, 1.0, {0, 1, 3}, 4, 99, {2, 1e-10});
    REQUIRE(study.samples.size() == 12);
    for (int s = 0; s < 4; ++s) {
        CHECK(study.samples[s].holes == 0);
        CHECK(study.samples[s].relative_loss == 0.0);
        CHECK(study.samples[s].intensity_fraction == 0.0);
    }
    for (const auto& s : study.samples) CHECK(s.eta <= study.eta_perfect + 1e-10);
    CHECK(study.violations == 0);
    CHECK(study.alpha.value > 0.0);

    auto again = hole_study(6, 0.6, 1.0, {0, 1, 3}, 4, 99, {1, 1e-10});
    std::ostringstream a, b;
    write_csv(a, study, "seed=99");
    write_csv(b, again, "seed=99");
    CHECK(a.str() == b.str());

    CHECK_THROWS_AS(hole_study(6, 0.6, 1.0, {8}, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(hole_study(6, 0.6, 1.0, {1}, 0, 1), InvalidArgument);
}

TEST_CASE("a central hole costs more than a corner hole") {
    const int n = 10;
    const DetectionMode mode(1.5);
    auto perfect = build_square_array(n, 0.6);
    const double eta = RetrievalProblem(perfect).evaluate(mode).solution.eta_max;
    const double corner = RetrievalProblem(remove_holes(perfect, {0})).evaluate(mode).solution.eta_max;
    const double centre = RetrievalProblem(remove_holes(perfect, {4 * n + 4})).evaluate(mode).solution.eta_max;
    CHECK(eta - centre > eta - corner);
    CHECK(corner <= eta);
}

TEST_CASE("position disorder study") {
    const std::vector<double> sigmas{0.0, 0.006, 0.03};
    auto study = position_disorder_study({4}, 0.6, sigmas, 8, 5, {0.85});
    REQUIRE(study.points.size() == 3);
    CHECK(study.points[0].loss == 0.0);
    CHECK(study.points[1].loss > 0.0);
    CHECK(study.points[2].loss > study.points[1].loss);
    CHECK(study.w0[0] == 0.85);

    auto again = position_disorder_study({4}, 0.6, sigmas, 8, 5, {0.85}, {3, 1e-10});
    std::ostringstream a, b;
    write_csv(a, study);
    write_csv(b, again);
    CHECK(a.str() == b.str());

    CHECK_THROWS_AS(position_disorder_study({4}, 0.6, {0.02, 0.01}, 4, 1, {0.85}), InvalidArgument);
    CHECK_THROWS_AS(position_disorder_study({4, 5}, 0.6, {0.01}, 4, 1, {0.85}), InvalidArgument);
}

TEST_CASE("disorder standard error shrinks with the sample count") {
    const std::vector<double> sigmas{0.03};
    auto small = position_disorder_study({6}, 0.6, sigmas, 25, 11, {1.1});
    auto large = position_disorder_study({6}, 0.6, sigmas, 100, 11, {1.1});
    const double ratio = small.points[0].standard_error / large.points[0].standard_error;
    CHECK(ratio > 1.3);
    CHECK(ratio < 3.0);
}

TEST_CASE("isotropic comparison on small arrays") {
    auto cmp = isotropic_comparison({3, 4}, 0.6);
    REQUIRE(cmp.rows.size() == 2);
    for (const auto& r : cmp.rows) {
        CHECK(r.epsilon_isotropic > r.epsilon_two_level);
        CHECK(r.relative_increase == doctest::Approx((r.epsilon_isotropic - r.epsilon_two_level) / r.epsilon_two_level));
    }
    CHECK(cmp.exponent_two_level.points == 2);
    std::ostringstream out;
    write_csv(out, cmp);
    CHECK(out.str().rfind("N,w0_two_level", 0) == 0);
    auto j = summary_json(cmp);
    CHECK(j["rows"].size() == 2);
}

TEST_CASE("parallel map keeps order and forwards errors") {
    auto squares = parallel_map<int>(50, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (int i = 0; i < 50; ++i) CHECK(squares[i] == i * i);
    CHECK_THROWS_AS(parallel_map<int>(10, 3,
                                      [](std::size_t i) -> int {
                                          if (i == 7) throw std::runtime_error("boom");
                                          return 0;
                                      }),
                    std::runtime_error);
    CHECK(parallel_map<int>(0, 2, [](std::size_t) { return 1; }).empty());
}
