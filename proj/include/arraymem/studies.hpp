#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arraymem/retrieval.hpp"

namespace arraymem {

/// 1 - erf^2(N d / (sqrt(2) w0)): light of the focal spot that misses the array.
double clipping_term(int n, double d, double w0);

/// C / w0^4 + clipping_term.
double error_model(double c, int n, double d, double w0);

/// Reference value (ln N_a)^2 / (4 N_a^2) for the optimal error.
double scaling_estimate(int n);

struct FitResult {
    std::string model;
    double value = 0.0;           ///< fitted parameter (C, slope or alpha)
    double standard_error = 0.0;
    double intercept = 0.0;       ///< log-space intercept for power laws, 0 otherwise
    double window_lo = 0.0;       ///< axis range of the points that entered the fit
    double window_hi = 0.0;
    std::size_t points = 0;
    double residual_norm = 0.0;   ///< RMS residual in the fitted space
};

/// Least-squares slope of log y against log x.
FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct WaistPoint {
    double w0 = 0.0;
    double eta = 0.0;
    double epsilon = 0.0;
    double clipping = 0.0;
};

struct WaistScan {
    int n = 0;
    double d = 0.0;
    Model model = Model::TwoLevel;
    std::vector<WaistPoint> points;
    int local_minima = 0;  ///< local minima of epsilon over the scan
    bool unimodal() const noexcept { return local_minima == 1; }
};

struct StudyOptions {
    int workers = 0;            ///< 0 = hardware concurrency
    double tolerance = 1e-10;   ///< detection-mode quadrature tolerance
};

/// Minimum error on the perfect array for every waist (sorted, positive).
WaistScan scan_waist(const RetrievalProblem& problem, const std::vector<double>& w0_list,
                     const StudyOptions& options = {});
WaistScan scan_waist(int n, double d, const std::vector<double>& w0_list, Model model = Model::TwoLevel,
                     const StudyOptions& options = {});

/// C with the exponent fixed at 4, least squares in log space on
/// epsilon - clipping over points whose clipping term is below
/// clip_fraction * epsilon. Throws FitWindowError when no point qualifies.
FitResult fit_error_model(const WaistScan& scan, double clip_fraction = 0.1);

/// Log-log slope of epsilon against w0 over the same window.
FitResult fit_waist_slope(const WaistScan& scan, double clip_fraction = 0.1);

struct OptimalWaist {
    double w0 = 0.0;
    double epsilon = 0.0;
    double eta = 0.0;
    Eigen::VectorXcd spin_wave;
    double seed_w0 = 0.0;   ///< analytic minimizer of error_model
    int evaluations = 0;
    bool fallback = false;  ///< bracket was not unimodal; grid scan used
};

/// Golden-section search of epsilon(w0) to tolerance, seeded by the error model.
OptimalWaist optimal_waist(const RetrievalProblem& problem, double tolerance = 1e-3,
                           const StudyOptions& options = {}, double model_c = 2.4e-3);

struct HoleSample {
    int holes = 0;
    int sample = 0;
    std::uint64_t seed = 0;
    double intensity_fraction = 0.0;  ///< sum_holes |E_j|^2 / sum_all |E_l|^2
    double eta = 0.0;                 ///< re-optimized efficiency with holes
    double relative_loss = 0.0;       ///< 1 - eta / eta_perfect
};

struct HoleStudy {
    int n = 0;
    double d = 0.0;
    double w0 = 0.0;
    std::uint64_t seed = 0;
    double eta_perfect = 0.0;
    std::vector<HoleSample> samples;
    FitResult alpha;          ///< relative_loss ~ alpha * intensity_fraction, intercept 0
    int violations = 0;       ///< samples with eta > eta_perfect + 1e-10
    double worst_excess = 0.0;
    int jitter_retries = 0;
};

HoleStudy hole_study(int n, double d, double w0, const std::vector<int>& hole_counts, int samples_per_count,
                     std::uint64_t seed, const StudyOptions& options = {});

struct DisorderPoint {
    int n = 0;
    double sigma = 0.0;
    int samples = 0;
    double eta_mean = 0.0;
    double loss = 0.0;            ///< eta_perfect - eta_mean
    double standard_error = 0.0;  ///< of the loss
};

struct DisorderStudy {
    double d = 0.0;
    std::uint64_t seed = 0;
    std::vector<int> sizes;
    std::vector<double> w0;           ///< per size, waist of the perfect-array optimum
    std::vector<double> eta_perfect;  ///< per size
    std::vector<DisorderPoint> points;
    std::vector<FitResult> slopes;    ///< per size: log loss vs log sigma
    int jitter_retries = 0;
};

/// Fixed perfect-lattice optimal spin wave and waist, evaluated on disordered
/// copies. Sample k uses the displacement pattern z_k (shared by every sigma)
/// and pairs +sigma z_k with -sigma z_k; samples_per_sigma counts configurations.
/// w0_list gives the waist per size; an empty list means the optimal waist.
DisorderStudy position_disorder_study(const std::vector<int>& sizes, double d, const std::vector<double>& sigmas,
                                      int samples_per_sigma, std::uint64_t seed,
                                      const std::vector<double>& w0_list = {}, const StudyOptions& options = {});

struct IsotropicRow {
    int n = 0;
    double w0_two_level = 0.0;
    double epsilon_two_level = 0.0;
    double w0_isotropic = 0.0;
    double epsilon_isotropic = 0.0;
    double relative_increase = 0.0;  ///< (eps_iso - eps_tl) / eps_tl
    double waist_ratio = 0.0;        ///< w0_iso / w0_tl
};

struct IsotropicComparison {
    double d = 0.0;
    Contraction contraction = Contraction::Full;
    std::vector<IsotropicRow> rows;
    FitResult exponent_two_level;  ///< log eps_opt vs log N_a (needs >= 2 sizes)
    FitResult exponent_isotropic;
};

IsotropicComparison isotropic_comparison(const std::vector<int>& sizes, double d,
                                         Contraction contraction = Contraction::Full,
                                         const StudyOptions& options = {});

/// Builds the problem, retrying once with a 1e-8 d position jitter when the
/// spectrum is near-defective. `retried` reports whether the jitter was used.
RetrievalProblem make_problem(const Geometry& geometry, Model model, std::uint64_t jitter_seed, bool& retried,
                              Contraction contraction = Contraction::Full);

void write_csv(std::ostream& out, const WaistScan& scan, const std::string& comment = {});
void write_csv(std::ostream& out, const HoleStudy& study, const std::string& comment = {});
void write_csv(std::ostream& out, const DisorderStudy& study, const std::string& comment = {});
void write_csv(std::ostream& out, const IsotropicComparison& cmp, const std::string& comment = {});

void to_json(nlohmann::json& j, const FitResult& fit);
nlohmann::json summary_json(const WaistScan& scan);
nlohmann::json summary_json(const OptimalWaist& opt);
nlohmann::json summary_json(const HoleStudy& study);
nlohmann::json summary_json(const DisorderStudy& study);
nlohmann::json summary_json(const IsotropicComparison& cmp);

} // namespace arraymem
