#include "arraymem/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "arraymem/error.hpp"
#include "arraymem/io.hpp"

namespace arraymem {

namespace {

using State = std::vector<cdouble>;

void require_unit(const Eigen::VectorXcd& s0) {
    if (std::abs(s0.squaredNorm() - 1.0) > 1e-10) throw InvalidArgument("initial spin wave must have unit norm");
}

void require_grid(const std::vector<double>& times) {
    if (times.empty()) throw InvalidArgument("empty time grid");
    if (times.front() < 0.0) throw InvalidArgument("time grid must start at t >= 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw InvalidArgument("time grid must be strictly increasing");
}

// Pair weight of the window integral of exp(i (lambda - conj(lambda')) t).
cdouble window_weight(cdouble diff, double window) {
    const cdouble i(0.0, 1.0);
    if (std::isinf(window)) return i / diff;
    const cdouble z = i * diff * window;
    const double half = std::sin(0.5 * z.imag());
    const cdouble expm1(std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * half * half,
                        std::exp(z.real()) * std::sin(z.imag()));
    return -i * expm1 / diff;
}

struct PairSums {
    Eigen::VectorXcd weights;  // c_a = A_a (v_a^T e0)
    const Eigen::VectorXcd* lambda;

    double eta(double window) const {
        const Eigen::Index n = weights.size();
        cdouble total = 0.0;
        for (Eigen::Index a = 0; a < n; ++a) {
            if (weights[a] == 0.0) continue;
            for (Eigen::Index ap = 0; ap < n; ++ap) {
                const cdouble diff = (*lambda)[a] - std::conj((*lambda)[ap]);
                if (std::abs(diff) < 1e-14)
                    throw SingularPair("vanishing window-integral denominator for modes " + std::to_string(a) +
                                           " and " + std::to_string(ap),
                                       static_cast<int>(a), static_cast<int>(ap));
                total += std::conj(weights[ap]) * weights[a] * window_weight(diff, window);
            }
        }
        return total.real();
    }
};

PairSums pair_sums(const SpectralDecomposition& dec, const ModeSamples& samples, const Eigen::VectorXcd& s0) {
    if (dec.model != samples.model) throw InvalidArgument("decomposition and samples use different models");
    if (samples.values.size() != dec.size()) throw InvalidArgument("mode samples do not match the geometry");
    require_unit(s0);
    const Eigen::VectorXcd e0 = excite(s0, dec.model);
    if (e0.size() != dec.size()) throw InvalidArgument("spin wave length does not match atom count");
    const Eigen::VectorXcd amplitude = dec.eigenvectors.transpose() * samples.values.conjugate();
    const Eigen::VectorXcd overlap = dec.eigenvectors.transpose() * e0;
    return {amplitude.cwiseProduct(overlap), &dec.eigenvalues};
}

} // namespace

ControlSchedule ControlSchedule::pi_pulse() { return {}; }

ControlSchedule ControlSchedule::piecewise(std::vector<ControlSegment> segments) {
    if (segments.empty()) throw InvalidArgument("piecewise control needs at least one segment");
    for (const auto& seg : segments)
        if (!(seg.duration > 0.0) || !std::isfinite(seg.duration))
            throw InvalidArgument("control segment durations must be positive");
    ControlSchedule out;
    out.kind_ = Kind::Piecewise;
    out.segments_ = std::move(segments);
    return out;
}

double ControlSchedule::duration() const noexcept {
    double total = 0.0;
    for (const auto& seg : segments_) total += seg.duration;
    return total;
}

double AmplitudeTrajectory::max_population_increase() const {
    double worst = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) worst = std::max(worst, population(k) - population(k - 1));
    return worst;
}

Eigen::VectorXcd excite(const Eigen::VectorXcd& spin_wave, Model model) {
    const int stride = rows_per_atom(model);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(stride * spin_wave.size());
    for (Eigen::Index j = 0; j < spin_wave.size(); ++j) e[stride * j] = spin_wave[j];
    return e;
}

std::vector<double> uniform_grid(double t_end, int intervals) {
    if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
    if (intervals < 1) throw InvalidArgument("time grid needs at least one interval");
    std::vector<double> times(static_cast<std::size_t>(intervals) + 1);
    for (int k = 0; k <= intervals; ++k) times[k] = t_end * k / intervals;
    times.back() = t_end;
    return times;
}

AmplitudeTrajectory evolve_spectral(const SpectralDecomposition& dec, const Eigen::VectorXcd& s0,
                                    const std::vector<double>& times) {
    require_unit(s0);
    require_grid(times);
    const Eigen::VectorXcd e0 = excite(s0, dec.model);
    if (e0.size() != dec.size()) throw InvalidArgument("spin wave length does not match atom count");
    const Eigen::VectorXcd coeff = dec.eigenvectors.transpose() * e0;
    const cdouble i(0.0, 1.0);
    AmplitudeTrajectory traj;
    traj.times = times;
    for (double t : times) {
        const Eigen::VectorXcd phase = (i * t * dec.eigenvalues).array().exp();
        traj.e.push_back(dec.eigenvectors * coeff.cwiseProduct(phase));
        traj.s.push_back(Eigen::VectorXcd::Zero(s0.size()));
    }
    return traj;
}

AmplitudeTrajectory evolve_ode(const InteractionMatrix& m, const Eigen::VectorXcd& s0,
                               const ControlSchedule& schedule, const std::vector<double>& times,
                               const OdeOptions& options) {
    require_unit(s0);
    require_grid(times);
    const int rows = m.size();
    const int atoms = m.atoms();
    const int stride = rows_per_atom(m.model);
    if (s0.size() != atoms) throw InvalidArgument("spin wave length does not match atom count");
    if (!(options.abs_tol > 0.0) || !(options.rel_tol > 0.0)) throw InvalidArgument("ODE tolerances must be positive");

    // Control intervals [knot_k, knot_k+1) with their (Omega, Delta).
    std::vector<double> knots{0.0};
    std::vector<ControlSegment> controls;
    State x(static_cast<std::size_t>(rows + atoms), 0.0);
    if (schedule.kind() == ControlSchedule::Kind::PiPulse) {
        const Eigen::VectorXcd e0 = excite(s0, m.model);
        std::copy(e0.data(), e0.data() + rows, x.begin());
    } else {
        std::copy(s0.data(), s0.data() + atoms, x.begin() + rows);
        for (const auto& seg : schedule.segments()) {
            knots.push_back(knots.back() + seg.duration);
            controls.push_back(seg);
        }
    }
    if (times.back() > knots.back()) {
        knots.push_back(times.back());
        controls.push_back({times.back() - knots[knots.size() - 2], 0.0, 0.0});
    }

    AmplitudeTrajectory traj;
    std::size_t next = 0;
    auto record = [&](const State& state, double t) {
        while (next < times.size() && times[next] == t) {
            traj.times.push_back(t);
            traj.e.push_back(Eigen::Map<const Eigen::VectorXcd>(state.data(), rows));
            traj.s.push_back(Eigen::Map<const Eigen::VectorXcd>(state.data() + rows, atoms));
            ++next;
        }
    };
    record(x, 0.0);

    namespace odeint = boost::numeric::odeint;
    const cdouble i(0.0, 1.0);
    for (std::size_t k = 0; k < controls.size() && next < times.size(); ++k) {
        const double a = knots[k], b = knots[k + 1];
        const cdouble rabi = controls[k].rabi;
        const double detuning = controls[k].detuning;
        auto rhs = [&](const State& y, State& dy, double) {
            Eigen::Map<const Eigen::VectorXcd> e(y.data(), rows), s(y.data() + rows, atoms);
            Eigen::Map<Eigen::VectorXcd> de(dy.data(), rows), ds(dy.data() + rows, atoms);
            de.noalias() = i * (m.entries * e);
            de += (i * detuning) * e;
            for (int j = 0; j < atoms; ++j) {
                de[stride * j] -= i * rabi * s[j];
                ds[j] = -i * std::conj(rabi) * e[stride * j];
            }
        };
        std::vector<double> grid{a};
        for (std::size_t t = next; t < times.size() && times[t] <= b; ++t)
            if (times[t] > a) grid.push_back(times[t]);
        if (grid.back() < b) grid.push_back(b);
        if (grid.size() < 2) continue;

        State end = x;
        try {
            auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol,
                                                     odeint::runge_kutta_dopri5<State>());
            odeint::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), std::min(1e-2, b - a),
                                    [&](const State& state, double t) {
                                        record(state, t);
                                        if (t == b) end = state;
                                    });
        } catch (const std::exception& err) {
            throw NumericalError(std::string("ODE integration failed: ") + err.what(), a);
        }
        x = end;
    }
    if (next != times.size()) throw NumericalError("ODE integration stopped before the end of the grid", traj.times.back());
    return traj;
}

AmplitudeTrajectory evolve(const InteractionMatrix& m, const Eigen::VectorXcd& s0, const ControlSchedule& schedule,
                           double t_end, int samples, const OdeOptions& options) {
    const auto times = uniform_grid(t_end, samples);
    if (schedule.kind() == ControlSchedule::Kind::PiPulse) return evolve_spectral(eigendecompose(m), s0, times);
    return evolve_ode(m, s0, schedule, times, options);
}

std::vector<double> detected_flux(const AmplitudeTrajectory& traj, const ModeSamples& samples) {
    const double pref = efficiency_prefactor(samples);
    std::vector<double> out;
    out.reserve(traj.e.size());
    for (const auto& e : traj.e) {
        if (e.size() != samples.values.size()) throw InvalidArgument("trajectory does not match mode samples");
        out.push_back(pref * std::norm(samples.values.dot(e)));
    }
    return out;
}

std::vector<double> total_emission(const AmplitudeTrajectory& traj, const InteractionMatrix& m) {
    const Eigen::MatrixXd gamma = m.entries.imag();
    std::vector<double> out;
    out.reserve(traj.e.size());
    for (const auto& e : traj.e) out.push_back(2.0 * (e.adjoint() * gamma.cast<cdouble>() * e)(0).real());
    return out;
}

double eta_finite_time(const SpectralDecomposition& dec, const ModeSamples& samples, const Eigen::VectorXcd& s0,
                       double window) {
    if (!(window > 0.0)) throw InvalidArgument("detection window must be positive");
    return efficiency_prefactor(samples) * pair_sums(dec, samples, s0).eta(window);
}

FiniteTimeCurve finite_time_curve(const SpectralDecomposition& dec, const ModeSamples& samples,
                                  const Eigen::VectorXcd& s0, const std::vector<double>& windows) {
    const auto sums = pair_sums(dec, samples, s0);
    const double pref = efficiency_prefactor(samples);
    FiniteTimeCurve curve;
    curve.windows = windows;
    for (double w : windows) {
        if (!(w > 0.0)) throw InvalidArgument("detection window must be positive");
        curve.eta.push_back(pref * sums.eta(w));
    }
    curve.eta_infinite = pref * sums.eta(std::numeric_limits<double>::infinity());
    return curve;
}

void write_trajectory_csv(std::ostream& out, const AmplitudeTrajectory& traj, const ModeSamples& samples,
                          const std::string& comment) {
    const auto flux = detected_flux(traj, samples);
    CsvWriter csv(out, {"t", "population_e", "population_s", "detected_flux"});
    if (!comment.empty()) csv.comment(comment);
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        csv.row({traj.times[k], traj.e[k].squaredNorm(), traj.s[k].squaredNorm(), flux[k]});
}

void write_finite_time_csv(std::ostream& out, const FiniteTimeCurve& curve, const std::string& comment) {
    CsvWriter csv(out, {"T_d", "eta_Td", "relative_loss"});
    if (!comment.empty()) csv.comment(comment);
    for (std::size_t k = 0; k < curve.windows.size(); ++k)
        csv.row({curve.windows[k], curve.eta[k], 1.0 - curve.eta[k] / curve.eta_infinite});
}

} // namespace arraymem
