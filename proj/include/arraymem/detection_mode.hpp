#pragma once

#include <memory>

#include "arraymem/geometry.hpp"
#include "arraymem/types.hpp"

namespace arraymem {

/// Exact Gaussian-like detection beam with no evanescent components.
///
/// The x-polarized angular spectrum is exp(-k^2 w0^2 / 4) on the propagating
/// disk k <= k0 and zero outside; E^y = 0 and E^z follows from transversality.
/// The beam propagates towards +z and is focused at the origin. A two-sided
/// mode is the symmetric superposition with its mirror image; only the
/// one-sided beam is ever evaluated, the factor 2 enters the efficiency
/// prefactor.
///
/// Copies share the lazily computed norm.
class DetectionMode {
public:
    explicit DetectionMode(double w0, double amplitude = 1.0, bool two_sided = true, double tolerance = 1e-10);

    double w0() const noexcept { return w0_; }
    double amplitude() const noexcept { return amplitude_; }
    bool two_sided() const noexcept { return two_sided_; }
    double tolerance() const noexcept { return tolerance_; }

    /// Closed-form E^x at the focus.
    double focus_value() const;

    /// Transverse-plane norm F_det, computed once per mode (thread safe).
    double norm() const;

private:
    struct NormCache;

    double w0_;
    double amplitude_;
    bool two_sided_;
    double tolerance_;
    std::shared_ptr<NormCache> cache_;
};

/// Cylindrical radial integrals at (rho, z), all scaled by the amplitude:
///   ex  = E^x
///   ez  = radial part of E^z, E^z = -i cos(phi) ez
///   hy0, hy2: H^y = hy0 - hy2 cos(2 phi), H^x = hy2 sin(2 phi)
/// H is expressed in field units (H = k_hat x E for each plane wave).
struct RadialField {
    cdouble ex;
    cdouble ez;
    cdouble hy0;
    cdouble hy2;
};

RadialField radial_field(const DetectionMode& m, double rho, double z);

/// (E^x, 0, E^z) of the one-sided beam at r.
CVec3 detection_field(const DetectionMode& m, const Vec3& r);

/// Transverse magnetic field (H^x, H^y, 0) of the one-sided beam at r, field units.
CVec3 detection_magnetic_field(const DetectionMode& m, const Vec3& r);

/// F_det = Int d^2r Re(E x H^*)_z over any transverse plane, evaluated in
/// wavevector space as a smooth 1D integral.
double mode_norm(const DetectionMode& m);

/// Real-space evaluation of the same flux over the plane z = plane_z, out to
/// radius_factor times the local beam radius. Cross-check of mode_norm.
double mode_norm_real_space(const DetectionMode& m, double plane_z, double radius_factor = 12.0);

/// Mode values at the atoms. Two-level: E_j = E_det(r_j) . d_j^* (one entry per
/// atom). Isotropic: the full field vector, entry 3 j + alpha.
struct ModeSamples {
    Eigen::VectorXcd values;
    Model model = Model::TwoLevel;
    double norm = 0.0;
    bool two_sided = true;
    double w0 = 0.0;

    int atoms() const noexcept { return static_cast<int>(values.size()) / rows_per_atom(model); }
};

ModeSamples sample_mode(const DetectionMode& m, const Geometry& g, Model model);

/// Overlap of a point dipole's emitted field with the detection beam.
struct ProjectionCheck {
    cdouble numeric;        ///< plane integral of the reciprocity overlap
    cdouble closed_form;    ///< (i / 2 k0) E_det^*(r_d) . d
    double absolute_discrepancy;
    double relative_discrepancy;
    double radius;          ///< integration radius reached
};

/// Integrates (1/2) Int (E_det^* x H_out + E_out x H_det^*)_z over the plane
/// z = plane_z for the field G(r, r_d) d of a unit dipole and compares with the
/// closed form. The plane must lie on the +z side of the dipole. The radius is
/// radius_factor local beam radii beyond the dipole's transverse offset.
ProjectionCheck validate_projection(const DetectionMode& m, const Vec3& dipole_position,
                                    const Vec3& dipole_orientation, double plane_z,
                                    double radius_factor = 12.0);

} // namespace arraymem
