#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "arraymem/dynamics.hpp"
#include "arraymem/error.hpp"

using namespace arraymem;

namespace {

Eigen::VectorXcd random_unit(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXcd s(n);
    for (int j = 0; j < n; ++j) s[j] = cdouble(g(rng), g(rng));
    return s / s.norm();
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    double sum = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) sum += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
    return sum;
}

double max_difference(const AmplitudeTrajectory& a, const AmplitudeTrajectory& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        worst = std::max(worst, (a.e[k] - b.e[k]).cwiseAbs().maxCoeff());
        worst = std::max(worst, (a.s[k] - b.s[k]).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace

TEST_CASE("schedules") {
    auto pi = ControlSchedule::pi_pulse();
    CHECK(pi.kind() == ControlSchedule::Kind::PiPulse);
    CHECK(pi.segments().empty());
    auto pw = ControlSchedule::piecewise({{1.0, 0.5, 0.0}, {2.5, 1.0, 0.1}});
    CHECK(pw.duration() == 3.5);
    CHECK_THROWS_AS(ControlSchedule::piecewise({}), InvalidArgument);
    CHECK_THROWS_AS(ControlSchedule::piecewise({{0.0, 1.0, 0.0}}), InvalidArgument);
    CHECK_THROWS_AS(ControlSchedule::piecewise({{-1.0, 1.0, 0.0}}), InvalidArgument);
}

TEST_CASE("single atom decays at the natural rate") {
    auto m = interaction_matrix(build_square_array(1, 0.6), Model::TwoLevel);
    Eigen::VectorXcd s0 = Eigen::VectorXcd::Ones(1);
    auto traj = evolve(m, s0, ControlSchedule::pi_pulse(), 5.0, 50);
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        CHECK(traj.e[k].squaredNorm() == doctest::Approx(std::exp(-traj.times[k])).epsilon(1e-13));
    auto ode = evolve_ode(m, s0, ControlSchedule::pi_pulse(), traj.times, {1e-12, 1e-12});
    CHECK(max_difference(traj, ode) < 1e-9);
}

TEST_CASE("no control keeps the spin wave frozen") {
    auto m = interaction_matrix(build_square_array(3, 0.6), Model::TwoLevel);
    auto s0 = random_unit(9, 1);
    auto traj = evolve(m, s0, ControlSchedule::piecewise({{4.0, 0.0, 0.0}}), 6.0, 30);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        CHECK((traj.s[k] - s0).cwiseAbs().maxCoeff() == 0.0);
        CHECK(traj.e[k].cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("spectral propagation matches direct integration") {
    for (int n : {3, 4}) {
        auto m = interaction_matrix(build_square_array(n, 0.6), Model::TwoLevel);
        auto s0 = random_unit(n * n, 10 + n);
        const auto times = uniform_grid(20.0, 100);
        auto spectral = evolve_spectral(eigendecompose(m), s0, times);
        auto ode = evolve_ode(m, s0, ControlSchedule::pi_pulse(), times, {1e-12, 1e-12});
        CHECK(max_difference(spectral, ode) < 1e-8);
        CHECK(spectral.max_population_increase() <= 1e-9);
    }
}

TEST_CASE("isotropic propagation") {
    auto m = interaction_matrix(build_square_array(2, 0.5), Model::Isotropic);
    auto s0 = random_unit(4, 3);
    const auto times = uniform_grid(8.0, 40);
    auto spectral = evolve_spectral(eigendecompose(m), s0, times);
    auto ode = evolve_ode(m, s0, ControlSchedule::pi_pulse(), times, {1e-12, 1e-12});
    CHECK(spectral.e[0].size() == 12);
    CHECK(max_difference(spectral, ode) < 1e-8);
}

TEST_CASE("long windows recover the K-matrix efficiency") {
    for (int n : {3, 4}) {
        auto g = build_square_array(n, 0.6);
        auto dec = eigendecompose(interaction_matrix(g, Model::TwoLevel));
        auto samples = sample_mode(DetectionMode(0.9), g, Model::TwoLevel);
        auto k = k_matrix(dec, samples);
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            auto s0 = random_unit(n * n, seed);
            CHECK(std::abs(eta_finite_time(dec, samples, s0, 1e3) - efficiency_of_spin_wave(k, s0)) < 1e-9);
        }
        auto best = max_efficiency(k);
        CHECK(std::abs(eta_finite_time(dec, samples, best.spin_wave, 1e3) - best.eta_max) < 1e-9);
    }
}

TEST_CASE("detected photons grow with the window") {
    auto g = remove_holes(build_square_array(5, 0.6), {12});
    auto dec = eigendecompose(interaction_matrix(g, Model::TwoLevel));
    auto samples = sample_mode(DetectionMode(1.2), g, Model::TwoLevel);
    auto s0 = random_unit(g.size(), 4);
    std::vector<double> windows;
    for (double t = 0.05; t < 60.0; t *= 1.3) windows.push_back(t);
    auto curve = finite_time_curve(dec, samples, s0, windows);
    for (std::size_t k = 1; k < curve.eta.size(); ++k) CHECK(curve.eta[k] >= curve.eta[k - 1] - 1e-15);
    CHECK(curve.eta.back() <= curve.eta_infinite + 1e-12);
    CHECK_THROWS_AS(eta_finite_time(dec, samples, s0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(eta_finite_time(dec, samples, 2.0 * s0, 1.0), InvalidArgument);
}

TEST_CASE("closed-form window integral matches quadrature of the flux") {
    auto g = build_square_array(3, 0.6);
    auto m = interaction_matrix(g, Model::TwoLevel);
    auto dec = eigendecompose(m);
    auto samples = sample_mode(DetectionMode(1.0), g, Model::TwoLevel);
    auto s0 = random_unit(9, 8);
    const double window = 10.0;
    auto traj = evolve_spectral(dec, s0, uniform_grid(window, 10000));
    const double quad = trapezoid(traj.times, detected_flux(traj, samples));
    CHECK(std::abs(quad - eta_finite_time(dec, samples, s0, window)) < 1e-6);

    // Population lost equals photons emitted into all modes; the detector sees a part.
    const double emitted = trapezoid(traj.times, total_emission(traj, m));
    const double lost = traj.population(0) - traj.population(traj.times.size() - 1);
    CHECK(std::abs(emitted - lost) < 1e-6);
    CHECK(quad <= lost + 1e-8);
}

TEST_CASE("retrieval efficiency does not depend on the control profile") {
    auto g = build_square_array(2, 0.6);
    auto m = interaction_matrix(g, Model::TwoLevel);
    auto samples = sample_mode(DetectionMode(0.7), g, Model::TwoLevel);
    auto k = k_matrix(eigendecompose(m), samples);
    auto s0 = max_efficiency(k).spin_wave;
    auto schedule = ControlSchedule::piecewise({{3.0, 0.6, 0.0}, {50.0, 2.0, 0.3}});
    auto traj = evolve(m, s0, schedule, 60.0, 60000);
    CHECK(traj.max_population_increase() <= 1e-9);
    CHECK(traj.population(traj.times.size() - 1) < 1e-6);
    const double eta = trapezoid(traj.times, detected_flux(traj, samples));
    CHECK(eta == doctest::Approx(efficiency_of_spin_wave(k, s0)).epsilon(1e-5));
}

TEST_CASE("CSV exports") {
    auto g = build_square_array(2, 0.6);
    auto m = interaction_matrix(g, Model::TwoLevel);
    auto dec = eigendecompose(m);
    auto samples = sample_mode(DetectionMode(0.8), g, Model::TwoLevel);
    Eigen::VectorXcd s0 = Eigen::VectorXcd::Constant(4, 0.5);
    std::ostringstream a, b;
    write_trajectory_csv(a, evolve_spectral(dec, s0, uniform_grid(1.0, 4)), samples, "N=2");
    const auto text = a.str();
    CHECK(text.rfind("# N=2\nt,population_e,population_s,detected_flux\n0,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);

    auto curve = finite_time_curve(dec, samples, s0, {1.0, 10.0});
    write_finite_time_csv(b, curve);
    CHECK(b.str().rfind("T_d,eta_Td,relative_loss\n1,", 0) == 0);
}
