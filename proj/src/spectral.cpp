#include "arraymem/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "arraymem/error.hpp"
#include "lapack.hpp"

namespace arraymem {

namespace {

cdouble bilinear(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a.transpose() * b)(0); }

// Groups indices whose eigenvalues lie within `tol` of each other (transitively).
std::vector<std::vector<int>> clusters(const Eigen::VectorXcd& values, double tol) {
    const int n = static_cast<int>(values.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a].real() < values[b].real(); });
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n && values[order[q]].real() - values[order[p]].real() <= tol; ++q)
            if (std::abs(values[order[p]] - values[order[q]]) <= tol) parent[root(order[p])] = root(order[q]);
    std::vector<std::vector<int>> groups(n);
    for (int i = 0; i < n; ++i) groups[root(i)].push_back(i);
    std::erase_if(groups, [](const auto& g) { return g.empty(); });
    return groups;
}

// Bilinear Gram-Schmidt with pivoting on |u^T u| inside one eigenspace.
// Returns false when the subspace carries no bilinear-orthonormal basis.
bool orthonormalize(std::vector<Eigen::VectorXcd>& basis, double floor) {
    std::vector<Eigen::VectorXcd> pending = std::move(basis);
    basis.clear();
    for (auto& u : pending) u.normalize();
    while (!pending.empty()) {
        std::size_t best = 0;
        double best_mag = -1.0;
        for (std::size_t k = 0; k < pending.size(); ++k) {
            const double mag = std::abs(bilinear(pending[k], pending[k]));
            if (mag > best_mag) {
                best_mag = mag;
                best = k;
            }
        }
        if (best_mag < floor) {
            // Every remaining vector is self-orthogonal; rotate the pair with
            // the largest mutual product into (u + w, u - w).
            std::size_t p = 0, q = 0;
            double pair_mag = -1.0;
            for (std::size_t a = 0; a < pending.size(); ++a)
                for (std::size_t b = a + 1; b < pending.size(); ++b) {
                    const double mag = std::abs(bilinear(pending[a], pending[b]));
                    if (mag > pair_mag) {
                        pair_mag = mag;
                        p = a;
                        q = b;
                    }
                }
            if (pair_mag < floor) return false;
            Eigen::VectorXcd plus = (pending[p] + pending[q]).normalized();
            Eigen::VectorXcd minus = (pending[p] - pending[q]).normalized();
            pending[p] = std::move(plus);
            pending[q] = std::move(minus);
            continue;
        }
        Eigen::VectorXcd v = pending[best] / std::sqrt(bilinear(pending[best], pending[best]));
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
        for (auto& u : pending) {
            u -= bilinear(v, u) * v;
            const double len = u.norm();
            if (len < floor) return false;
            u /= len;
        }
        basis.push_back(std::move(v));
    }
    return true;
}

void fix_sign(Eigen::Ref<Eigen::VectorXcd> v) {
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    const cdouble lead = v[k];
    if (lead.real() < 0.0 || (lead.real() == 0.0 && lead.imag() < 0.0)) v = -v;
}

} // namespace

SpectralDecomposition eigendecompose(const InteractionMatrix& m, const SpectralOptions& options) {
    const int n = m.size();
    if (n == 0) throw InvalidArgument("empty interaction matrix");
    if (!m.entries.allFinite()) throw InvalidArgument("interaction matrix has non-finite entries");
    const double scale = m.entries.cwiseAbs().maxCoeff();
    if ((m.entries - m.entries.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
        throw InvalidArgument("interaction matrix is not symmetric");

    SpectralDecomposition dec;
    dec.model = m.model;
    Eigen::MatrixXcd raw;
    const int info = lapack::general_eigen(m.entries, dec.eigenvalues, raw);
    if (info != 0) throw NumericalError("zgeev failed with info " + std::to_string(info));

    dec.eigenvectors.resize(n, n);
    const double lambda_scale = dec.eigenvalues.cwiseAbs().maxCoeff();
    std::vector<int> defective;
    for (const auto& group : clusters(dec.eigenvalues, options.cluster_tolerance * lambda_scale)) {
        std::vector<Eigen::VectorXcd> basis;
        for (int idx : group) basis.emplace_back(raw.col(idx));
        if (group.size() > 1) ++dec.degenerate_clusters;
        if (!orthonormalize(basis, options.defect_tolerance)) {
            defective.insert(defective.end(), group.begin(), group.end());
            continue;
        }
        for (std::size_t k = 0; k < group.size(); ++k) dec.eigenvectors.col(group[k]) = basis[k];
    }
    if (!defective.empty()) {
        std::sort(defective.begin(), defective.end());
        throw DefectiveSpectrum("near-defective spectrum: eigenvector(s) self-orthogonal under v^T v", defective);
    }
    for (int a = 0; a < n; ++a) fix_sign(dec.eigenvectors.col(a));

    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    dec.bilinear_condition = (dec.eigenvectors.transpose() * dec.eigenvectors - id).cwiseAbs().maxCoeff();
    dec.completeness_residual = (dec.eigenvectors * dec.eigenvectors.transpose() - id).cwiseAbs().maxCoeff();
    dec.min_decay = dec.eigenvalues.imag().minCoeff();
    const cdouble expected_trace(0.0, 0.5 * n);
    dec.trace_residual = std::abs(dec.eigenvalues.sum() - expected_trace) / (0.5 * n);

    if (dec.bilinear_condition > options.identity_tolerance || dec.completeness_residual > options.identity_tolerance) {
        std::vector<int> worst;
        const Eigen::MatrixXcd gram = dec.eigenvectors.transpose() * dec.eigenvectors - id;
        for (int a = 0; a < n; ++a)
            if (gram.col(a).cwiseAbs().maxCoeff() > options.identity_tolerance) worst.push_back(a);
        throw DefectiveSpectrum("bilinear identities violated: " + describe(dec), worst);
    }
    if (dec.min_decay < -options.decay_tolerance)
        throw NumericalError("negative collective decay rate: " + describe(dec), dec.min_decay);
    return dec;
}

Eigen::MatrixXcd reconstruct(const SpectralDecomposition& dec) {
    return dec.eigenvectors * dec.eigenvalues.asDiagonal() * dec.eigenvectors.transpose();
}

std::string describe(const SpectralDecomposition& dec) {
    std::ostringstream os;
    os << "size=" << dec.size() << " bilinear_condition=" << dec.bilinear_condition
       << " completeness_residual=" << dec.completeness_residual << " min_decay=" << dec.min_decay
       << " trace_residual=" << dec.trace_residual;
    return os.str();
}

} // namespace arraymem
