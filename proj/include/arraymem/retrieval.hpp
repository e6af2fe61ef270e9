#pragma once

#include <nlohmann/json_fwd.hpp>

#include "arraymem/detection_mode.hpp"
#include "arraymem/spectral.hpp"

namespace arraymem {

/// How the detection amplitude of a collective mode is formed in the
/// isotropic model: all three dipole components against the sampled field
/// vector, or only the x components against E^x. Identical for two-level.
enum class Contraction { Full, XOnly };

/// Hermitian efficiency matrix over atoms: eta = prefactor * s^H K s for an
/// initial spin wave s (unit norm).
struct EfficiencyMatrix {
    Eigen::MatrixXcd K;
    double prefactor = 0.0;  ///< (2 if two-sided) * S / (4 F_det)
    double hermiticity = 0.0;  ///< max |K - K^H| / max |K|
};

/// Builds K from the decomposition and mode samples:
///   K = conj(B) H B^T,  B = V_x diag(A),  A_a = sum_m v_{a,m} conj(E_m),
///   H_{a'a} = i / (lambda_a - conj(lambda_a')),
/// where V_x holds the eigenvector rows of the storage orientation (x for the
/// isotropic model). Throws SingularPair when a denominator falls below 1e-14.
EfficiencyMatrix k_matrix(const SpectralDecomposition& dec, const ModeSamples& samples,
                          Contraction contraction = Contraction::Full);

/// Same as k_matrix but for photons collected in [0, window] after a pi pulse:
/// H_{a'a} = i (1 - exp(i (lambda_a - conj(lambda_a')) window)) / (lambda_a - conj(lambda_a')).
EfficiencyMatrix k_matrix_window(const SpectralDecomposition& dec, const ModeSamples& samples, double window,
                                 Contraction contraction = Contraction::Full);

struct RetrievalSolution {
    double eta_max = 0.0;
    Eigen::VectorXcd spin_wave;  ///< unit norm, largest component real positive
    double top_eigenvalue = 0.0;
    double relative_gap = 0.0;   ///< (k1 - k2) / k1
    bool degenerate = false;     ///< top eigenvalue repeated within 1e-12
};

/// (2 if two-sided) * S / (4 F_det).
double efficiency_prefactor(const ModeSamples& samples);

/// Top Hermitian eigenpair of K. Throws NumericalError if eta exceeds 1 + 1e-9.
RetrievalSolution max_efficiency(const EfficiencyMatrix& k);

/// prefactor * s^H K s. Throws InvalidArgument unless |s| = 1 within 1e-10.
double efficiency_of_spin_wave(const EfficiencyMatrix& k, const Eigen::VectorXcd& s);

/// {eta_max, epsilon, spin_wave: [[re, im], ...], w0, two_sided, geometry, diagnostics}.
nlohmann::json solution_json(const RetrievalSolution& sol, const EfficiencyMatrix& k, const ModeSamples& samples,
                             const Geometry& geometry);

/// A geometry with its interaction-matrix eigensystem, reused across waists.
class RetrievalProblem {
public:
    RetrievalProblem(Geometry geometry, Model model = Model::TwoLevel, Contraction contraction = Contraction::Full,
                     const SpectralOptions& options = {});

    struct Evaluation {
        ModeSamples samples;
        EfficiencyMatrix k;
        RetrievalSolution solution;
    };

    Evaluation evaluate(const DetectionMode& mode) const;
    /// 1 - eta_max for the given waist (two-sided mode).
    double error(double w0, double tolerance = 1e-10) const;

    const Geometry& geometry() const noexcept { return geometry_; }
    const SpectralDecomposition& decomposition() const noexcept { return decomposition_; }
    Model model() const noexcept { return model_; }
    Contraction contraction() const noexcept { return contraction_; }

private:
    Geometry geometry_;
    Model model_;
    Contraction contraction_;
    SpectralDecomposition decomposition_;
};

} // namespace arraymem
