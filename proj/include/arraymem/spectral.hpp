#pragma once

#include <string>

#include "arraymem/greens.hpp"

namespace arraymem {

/// Eigensystem of a complex-symmetric interaction matrix with eigenvectors
/// normalized under the non-conjugated bilinear form, v_a^T v_b = delta_ab.
/// Then M = sum lambda v v^T and sum v v^T = I.
struct SpectralDecomposition {
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd eigenvectors;  ///< column a is v_a
    Model model = Model::TwoLevel;

    double bilinear_condition = 0.0;     ///< max |V^T V - I|
    double completeness_residual = 0.0;  ///< max |V V^T - I|
    double min_decay = 0.0;              ///< min Im lambda
    double trace_residual = 0.0;         ///< |sum lambda - i n/2| / (n/2)
    int degenerate_clusters = 0;         ///< eigenvalue clusters of size > 1

    int size() const noexcept { return static_cast<int>(eigenvalues.size()); }
};

struct SpectralOptions {
    double cluster_tolerance = 1e-10;   ///< relative to max |lambda|
    double defect_tolerance = 1e-8;     ///< |v^T v| floor for unit 2-norm v
    double identity_tolerance = 1e-8;   ///< bilinear orthogonality / completeness
    double decay_tolerance = 1e-10;     ///< Im lambda floor
};

/// Dense eigendecomposition followed by bilinear normalization. Each v is
/// fixed up to sign by v^T v = 1; the sign makes the largest-magnitude
/// component have non-negative real part.
///
/// Throws DefectiveSpectrum (offending indices attached) when an eigenvector
/// is nearly self-orthogonal, or when the orthogonality/completeness
/// residuals exceed the tolerance. Throws NumericalError when the eigensolver
/// fails or a decay rate is negative beyond tolerance.
SpectralDecomposition eigendecompose(const InteractionMatrix& m, const SpectralOptions& options = {});

/// sum_a lambda_a v_a v_a^T.
Eigen::MatrixXcd reconstruct(const SpectralDecomposition& dec);

std::string describe(const SpectralDecomposition& dec);

} // namespace arraymem
