#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arraymem/types.hpp"

namespace arraymem {

/// Atom configuration derived from an N x N square lattice in the z = 0 plane.
///
/// Positions are in resonant wavelengths. Sites are indexed row-major,
/// site = ix * N + iy, before holes are removed; `site_of_atom` maps each
/// remaining atom back to its lattice site. Values are immutable once built.
class Geometry {
public:
    Geometry() = default;

    const std::vector<Vec3>& positions() const noexcept { return positions_; }
    const std::vector<Vec3>& dipoles() const noexcept { return dipoles_; }
    double lattice_constant() const noexcept { return lattice_constant_; }
    int linear_size() const noexcept { return linear_size_; }
    /// Removed lattice sites, sorted ascending.
    const std::vector<int>& holes() const noexcept { return holes_; }
    /// Lattice site of atom i.
    const std::vector<int>& site_of_atom() const noexcept { return site_of_atom_; }
    /// Atom index of lattice site s, or -1 for a hole.
    int atom_of_site(int site) const;
    double sigma() const noexcept { return sigma_; }
    std::optional<std::uint64_t> disorder_seed() const noexcept { return seed_; }

    int size() const noexcept { return static_cast<int>(positions_.size()); }
    int site_count() const noexcept { return linear_size_ * linear_size_; }

    /// Smallest pairwise distance (infinity for a single atom).
    double min_separation() const;

    /// Throws InvalidArgument when a documented invariant is violated.
    void validate() const;

    /// Replace every dipole orientation (normalized); used for non-default polarizations.
    Geometry with_dipoles(const Vec3& orientation) const;

    friend Geometry build_square_array(int n, double d);
    friend Geometry remove_holes(const Geometry& g, const std::vector<int>& holes);
    friend Geometry apply_position_disorder(const Geometry& g, double sigma, std::uint64_t seed);
    friend Geometry apply_displacements(const Geometry& g, const std::vector<Vec3>& displacements);
    friend Geometry geometry_from_points(std::vector<Vec3> positions, std::vector<Vec3> dipoles);
    friend Geometry geometry_from_json(const nlohmann::json& j);

private:
    std::vector<Vec3> positions_;
    std::vector<Vec3> dipoles_;
    double lattice_constant_ = 0.0;
    int linear_size_ = 0;
    std::vector<int> holes_;
    std::vector<int> site_of_atom_;
    double sigma_ = 0.0;
    std::optional<std::uint64_t> seed_;
};

/// N^2 atoms centered on the origin, all dipoles along x.
Geometry build_square_array(int n, double d);

/// Deletes lattice sites (indices refer to lattice sites, not atoms).
Geometry remove_holes(const Geometry& g, const std::vector<int>& holes);

/// In-plane Gaussian displacement of every atom with standard deviation sigma.
/// Deterministic for a given seed (mt19937_64 + std::normal_distribution).
Geometry apply_position_disorder(const Geometry& g, double sigma, std::uint64_t seed);

/// Adds explicit in-plane displacements, one per atom. Keeps sigma/seed metadata.
Geometry apply_displacements(const Geometry& g, const std::vector<Vec3>& displacements);

/// Arbitrary point set, not tied to a lattice (linear_size 0).
Geometry geometry_from_points(std::vector<Vec3> positions, std::vector<Vec3> dipoles);

/// `count` distinct sites drawn uniformly without replacement, sorted.
std::vector<int> random_holes(int site_count, int count, std::uint64_t seed);

/// Standard-normal in-plane draws (z component zero), one per atom.
std::vector<Vec3> standard_normal_displacements(int count, std::uint64_t seed);

/// SplitMix64 step; derives independent per-sample seeds from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

void to_json(nlohmann::json& j, const Geometry& g);
/// Lattice metadata is authoritative; `positions`, when present, overrides
/// the regenerated coordinates and must match the atom count.
Geometry geometry_from_json(const nlohmann::json& j);

} // namespace arraymem
