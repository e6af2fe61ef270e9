#pragma once

#include <iosfwd>
#include <string>

#include "arraymem/geometry.hpp"
#include "arraymem/types.hpp"

namespace arraymem {

using GreensTensor = Eigen::Matrix3cd;

/// Free-space dyadic Green's tensor at wavenumber 2 pi (lengths in wavelengths).
/// Throws SingularPoint when r == r'.
GreensTensor greens_tensor(const Vec3& r, const Vec3& r_prime);

/// Photon-mediated coupling matrix M, dimensionless, in units of the single-atom
/// decay rate. Two-level: M_jl = (3 pi / k0) d_j^* G d_l. Isotropic: 3x3 blocks
/// (3 pi / k0) G, row index 3 j + alpha. Diagonal is i/2 (blocks (i/2) I).
struct InteractionMatrix {
    Eigen::MatrixXcd entries;
    Model model = Model::TwoLevel;

    int size() const noexcept { return static_cast<int>(entries.rows()); }
    int atoms() const noexcept { return size() / rows_per_atom(model); }
};

InteractionMatrix interaction_matrix(const Geometry& g, Model model);

/// Binary dump: magic "AMIM", u32 version (1), u32 model (0 two-level, 1 isotropic),
/// u64 size, then size*size complex doubles (re, im) row-major, little-endian.
void write_interaction_matrix(std::ostream& out, const InteractionMatrix& m);
InteractionMatrix read_interaction_matrix(std::istream& in);

} // namespace arraymem
