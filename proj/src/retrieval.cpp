#include "arraymem/retrieval.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "arraymem/error.hpp"
#include "arraymem/io.hpp"
#include "lapack.hpp"

namespace arraymem {

namespace {

constexpr double kPairFloor = 1e-14;

// exp(z) - 1 without cancellation for small |z|.
cdouble expm1(cdouble z) {
    const double half = std::sin(0.5 * z.imag());
    return {std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * half * half, std::exp(z.real()) * std::sin(z.imag())};
}

// Pair kernel H_{a'a} = i w(lambda_a - conj(lambda_a')) / (lambda_a - conj(lambda_a')).
template <typename Weight>
Eigen::MatrixXcd pair_kernel(const Eigen::VectorXcd& lambda, Weight&& weight) {
    const int n = static_cast<int>(lambda.size());
    Eigen::MatrixXcd h(n, n);
    const cdouble i(0.0, 1.0);
    for (int a = 0; a < n; ++a)
        for (int ap = 0; ap < n; ++ap) {
            const cdouble diff = lambda[a] - std::conj(lambda[ap]);
            if (std::abs(diff) < kPairFloor)
                throw SingularPair("vanishing K denominator for modes " + std::to_string(a) + " and " +
                                       std::to_string(ap),
                                   a, ap);
            h(ap, a) = i * weight(diff) / diff;
        }
    return h;
}

template <typename Weight>
EfficiencyMatrix assemble(const SpectralDecomposition& dec, const ModeSamples& samples, Contraction contraction,
                          Weight&& weight) {
    if (dec.model != samples.model) throw InvalidArgument("decomposition and samples use different models");
    if (samples.values.size() != dec.size()) throw InvalidArgument("mode samples do not match the geometry");
    if (!(samples.norm > 0.0)) throw InvalidArgument("mode norm must be positive");
    const int stride = rows_per_atom(dec.model);
    const int atoms = dec.size() / stride;
    const Eigen::MatrixXcd& v = dec.eigenvectors;

    // Rows of the storage orientation (x) and the detection amplitudes A.
    Eigen::MatrixXcd rows(atoms, dec.size());
    for (int j = 0; j < atoms; ++j) rows.row(j) = v.row(stride * j);
    Eigen::VectorXcd amplitude;
    if (contraction == Contraction::Full || dec.model == Model::TwoLevel) {
        amplitude = v.transpose() * samples.values.conjugate();
    } else {
        Eigen::VectorXcd ex(atoms);
        for (int j = 0; j < atoms; ++j) ex[j] = samples.values[stride * j];
        amplitude = rows.transpose() * ex.conjugate();
    }
    const Eigen::MatrixXcd b = rows * amplitude.asDiagonal();
    const Eigen::MatrixXcd h = pair_kernel(dec.eigenvalues, weight);

    EfficiencyMatrix out;
    out.K = b.conjugate() * h * b.transpose();
    const double scale = out.K.cwiseAbs().maxCoeff();
    out.hermiticity = scale > 0.0 ? (out.K - out.K.adjoint()).cwiseAbs().maxCoeff() / scale : 0.0;
    out.prefactor = efficiency_prefactor(samples);
    return out;
}

} // namespace

double efficiency_prefactor(const ModeSamples& samples) {
    return (samples.two_sided ? 2.0 : 1.0) * kCrossSection / (4.0 * samples.norm);
}

EfficiencyMatrix k_matrix(const SpectralDecomposition& dec, const ModeSamples& samples, Contraction contraction) {
    return assemble(dec, samples, contraction, [](cdouble) { return cdouble(1.0); });
}

EfficiencyMatrix k_matrix_window(const SpectralDecomposition& dec, const ModeSamples& samples, double window,
                                 Contraction contraction) {
    if (!(window > 0.0)) throw InvalidArgument("detection window must be positive");
    const cdouble i(0.0, 1.0);
    return assemble(dec, samples, contraction, [&](cdouble diff) { return -expm1(i * diff * window); });
}

RetrievalSolution max_efficiency(const EfficiencyMatrix& k) {
    const int n = static_cast<int>(k.K.rows());
    if (n == 0) throw InvalidArgument("empty efficiency matrix");
    const Eigen::MatrixXcd hermitian = 0.5 * (k.K + k.K.adjoint());
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
    const int count = std::min(2, n);
    const int info = lapack::hermitian_top(hermitian, count, values, vectors);
    if (info != 0 || values.size() != count) throw NumericalError("zheevr failed with info " + std::to_string(info));

    RetrievalSolution out;
    out.top_eigenvalue = values[count - 1];
    Eigen::VectorXcd s = vectors.col(count - 1);
    Eigen::Index lead = 0;
    s.cwiseAbs().maxCoeff(&lead);
    s *= std::conj(s[lead]) / std::abs(s[lead]);
    s[lead] = std::abs(s[lead]);
    out.spin_wave = s / s.norm();
    if (count == 2) {
        const double gap = values[1] - values[0];
        out.relative_gap = values[1] != 0.0 ? gap / std::abs(values[1]) : 0.0;
        out.degenerate = gap <= 1e-12 * std::abs(values[1]);
    }
    out.eta_max = k.prefactor * (out.spin_wave.adjoint() * hermitian * out.spin_wave)(0).real();
    if (out.eta_max > 1.0 + 1e-9)
        throw NumericalError("retrieval efficiency exceeds one", out.eta_max);
    return out;
}

double efficiency_of_spin_wave(const EfficiencyMatrix& k, const Eigen::VectorXcd& s) {
    if (s.size() != k.K.rows()) throw InvalidArgument("spin wave length does not match atom count");
    if (std::abs(s.squaredNorm() - 1.0) > 1e-10) throw InvalidArgument("spin wave must have unit norm");
    return k.prefactor * (s.adjoint() * k.K * s)(0).real();
}

nlohmann::json solution_json(const RetrievalSolution& sol, const EfficiencyMatrix& k, const ModeSamples& samples,
                             const Geometry& geometry) {
    nlohmann::json j;
    j["eta_max"] = sol.eta_max;
    j["epsilon"] = 1.0 - sol.eta_max;
    j["w0"] = samples.w0;
    j["two_sided"] = samples.two_sided;
    j["model"] = std::string(to_string(samples.model));
    j["spin_wave"] = complex_to_json(sol.spin_wave);
    j["geometry"] = geometry;
    j["diagnostics"] = {{"top_eigenvalue", sol.top_eigenvalue},
                        {"relative_gap", sol.relative_gap},
                        {"degenerate", sol.degenerate},
                        {"prefactor", k.prefactor},
                        {"hermiticity", k.hermiticity},
                        {"mode_norm", samples.norm}};
    return j;
}

RetrievalProblem::RetrievalProblem(Geometry geometry, Model model, Contraction contraction,
                                   const SpectralOptions& options)
    : geometry_(std::move(geometry)), model_(model), contraction_(contraction),
      decomposition_(eigendecompose(interaction_matrix(geometry_, model), options)) {}

RetrievalProblem::Evaluation RetrievalProblem::evaluate(const DetectionMode& mode) const {
    Evaluation ev;
    ev.samples = sample_mode(mode, geometry_, model_);
    ev.k = k_matrix(decomposition_, ev.samples, contraction_);
    ev.solution = max_efficiency(ev.k);
    return ev;
}

double RetrievalProblem::error(double w0, double tolerance) const {
    return 1.0 - evaluate(DetectionMode(w0, 1.0, true, tolerance)).solution.eta_max;
}

} // namespace arraymem
