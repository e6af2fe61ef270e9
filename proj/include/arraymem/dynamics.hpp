#pragma once

#include <iosfwd>
#include <vector>

#include "arraymem/detection_mode.hpp"
#include "arraymem/retrieval.hpp"
#include "arraymem/spectral.hpp"

namespace arraymem {

/// Constant control over one time interval (1/Gamma0 units).
struct ControlSegment {
    double duration = 0.0;
    cdouble rabi = 0.0;     ///< Omega_c
    double detuning = 0.0;  ///< Delta
};

/// Either an instantaneous pi pulse at t = 0 (all of s moved to e) or a
/// piecewise-constant control starting from the spin wave. After the last
/// segment the control is off.
class ControlSchedule {
public:
    enum class Kind { PiPulse, Piecewise };

    static ControlSchedule pi_pulse();
    static ControlSchedule piecewise(std::vector<ControlSegment> segments);

    Kind kind() const noexcept { return kind_; }
    const std::vector<ControlSegment>& segments() const noexcept { return segments_; }
    double duration() const noexcept;

private:
    Kind kind_ = Kind::PiPulse;
    std::vector<ControlSegment> segments_;
};

/// Amplitudes on a time grid. e has one entry per interaction-matrix row,
/// s one per atom.
struct AmplitudeTrajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> e;
    std::vector<Eigen::VectorXcd> s;

    double population(std::size_t k) const { return e[k].squaredNorm() + s[k].squaredNorm(); }
    /// Largest increase of the total population between consecutive samples.
    double max_population_increase() const;
};

/// Places a spin wave over atoms on the x rows of the excited manifold.
Eigen::VectorXcd excite(const Eigen::VectorXcd& spin_wave, Model model);

/// e(t) = sum v (v^T e0) exp(i lambda t) with e0 = excite(s0); s = 0.
AmplitudeTrajectory evolve_spectral(const SpectralDecomposition& dec, const Eigen::VectorXcd& s0,
                                    const std::vector<double>& times);

struct OdeOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
};

/// Direct integration of
///   de/dt = i Delta e - i Omega P s + i M e,   ds/dt = -i Omega P^T e
/// (P maps atoms onto x rows) with adaptive Dormand-Prince. For a pi pulse the
/// initial state is e = excite(s0), s = 0 and the control is off.
AmplitudeTrajectory evolve_ode(const InteractionMatrix& m, const Eigen::VectorXcd& s0,
                               const ControlSchedule& schedule, const std::vector<double>& times,
                               const OdeOptions& options = {});

/// `samples` + 1 uniform points over [0, t_end]; pi pulses are propagated in
/// closed form, piecewise schedules with evolve_ode.
AmplitudeTrajectory evolve(const InteractionMatrix& m, const Eigen::VectorXcd& s0, const ControlSchedule& schedule,
                           double t_end, int samples = 200, const OdeOptions& options = {});

std::vector<double> uniform_grid(double t_end, int intervals);

/// prefactor * |sum_m conj(E_m) e_m(t)|^2 at every trajectory sample.
std::vector<double> detected_flux(const AmplitudeTrajectory& traj, const ModeSamples& samples);

/// 2 e^H Im(M) e: photon emission rate into all modes.
std::vector<double> total_emission(const AmplitudeTrajectory& traj, const InteractionMatrix& m);

/// Photons detected in [0, window] after a pi pulse, from closed-form mode-pair
/// integrals. Same singular-pair guard as k_matrix.
double eta_finite_time(const SpectralDecomposition& dec, const ModeSamples& samples, const Eigen::VectorXcd& s0,
                       double window);

/// eta_finite_time over several windows, with the infinite-window limit.
struct FiniteTimeCurve {
    std::vector<double> windows;
    std::vector<double> eta;
    double eta_infinite = 0.0;
};
FiniteTimeCurve finite_time_curve(const SpectralDecomposition& dec, const ModeSamples& samples,
                                  const Eigen::VectorXcd& s0, const std::vector<double>& windows);

/// Columns t, population_e, population_s, detected_flux.
void write_trajectory_csv(std::ostream& out, const AmplitudeTrajectory& traj, const ModeSamples& samples,
                          const std::string& comment = {});
/// Columns T_d, eta_Td, relative_loss (1 - eta_Td / eta).
void write_finite_time_csv(std::ostream& out, const FiniteTimeCurve& curve, const std::string& comment = {});

} // namespace arraymem
