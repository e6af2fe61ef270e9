#include "arraymem/detection_mode.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "arraymem/error.hpp"
#include "arraymem/greens.hpp"
#include "arraymem/quadrature.hpp"

namespace arraymem {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
// Beyond this exponent the spectral Gaussian is below 1e-34 of its peak.
constexpr double kMaxExponent = 78.0;

double spectral_exponent(const DetectionMode& m) {
    const double kw = kWaveNumber * m.w0();
    return 0.25 * kw * kw;
}

// Upper polar angle of the effective spectral support for exp(-scale * sin^2).
double support_angle(double scale) {
    const double s = std::sqrt(kMaxExponent / scale);
    return s >= 1.0 ? kHalfPi : std::asin(s);
}

double bessel_j2(double x, double j0, double j1) {
    if (x < 2.0) return std::cyl_bessel_j(2.0, x);
    return 2.0 * j1 / x - j0;
}

// Sums adaptive integrals over consecutive panels of [0, radius]. Returns the
// total and the magnitude of the outermost panel (truncation indicator).
template <typename T, typename F>
std::pair<T, double> radial_panels(F&& f, double radius, double width, double abs_tol, double rel_tol) {
    const int panels = std::max(1, static_cast<int>(std::ceil(radius / width)));
    const double step = radius / panels;
    T total{};
    double last = 0.0;
    for (int p = 0; p < panels; ++p) {
        auto r = quad::integrate<T>(f, p * step, (p + 1) * step, abs_tol / panels, rel_tol, 4000);
        total += r.value;
        last = std::abs(r.value);
    }
    return {total, last};
}

} // namespace

struct DetectionMode::NormCache {
    std::once_flag once;
    double value = 0.0;
};

DetectionMode::DetectionMode(double w0, double amplitude, bool two_sided, double tolerance)
    : w0_(w0), amplitude_(amplitude), two_sided_(two_sided), tolerance_(tolerance),
      cache_(std::make_shared<NormCache>()) {
    if (!(w0 > 0.0) || !std::isfinite(w0)) throw InvalidArgument("beam waist w0 must be positive");
    if (!(amplitude != 0.0) || !std::isfinite(amplitude)) throw InvalidArgument("mode amplitude must be non-zero");
    if (!(tolerance > 0.0 && tolerance <= 1e-6)) throw InvalidArgument("quadrature tolerance must lie in (0, 1e-6]");
}

double DetectionMode::focus_value() const {
    const double a = spectral_exponent(*this);
    return amplitude_ * (-std::expm1(-a)) / (2.0 * a);
}

double DetectionMode::norm() const {
    std::call_once(cache_->once, [this] {
        // b = sin(theta): Int_0^1 b g^2 (1 - b^2/2) / sqrt(1 - b^2) db.
        const double scale = 2.0 * spectral_exponent(*this);
        auto integrand = [scale](double theta) {
            const double s = std::sin(theta);
            return s * std::exp(-scale * s * s) * (1.0 - 0.5 * s * s);
        };
        const double reference = 0.5 / scale;
        auto r = quad::integrate<double>(integrand, 0.0, support_angle(scale), tolerance_ * reference, tolerance_);
        cache_->value = 2.0 * kPi * amplitude_ * amplitude_ / (kWaveNumber * kWaveNumber) * r.value;
    });
    return cache_->value;
}

RadialField radial_field(const DetectionMode& m, double rho, double z) {
    const double a = spectral_exponent(m);
    const double krho = kWaveNumber * rho;
    const double kz = kWaveNumber * z;
    auto integrand = [a, krho, kz](double theta) {
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        const double gauss = std::exp(-a * s * s);
        const cdouble phase = std::polar(gauss, kz * c);
        const double x = s * krho;
        const double j0 = std::cyl_bessel_j(0.0, x);
        const double j1 = std::cyl_bessel_j(1.0, x);
        const double j2 = bessel_j2(x, j0, j1);
        Eigen::Vector4cd v;
        v << s * c * j0 * phase, s * s * j1 * phase, s * (1.0 - 0.5 * s * s) * j0 * phase, 0.5 * s * s * s * j2 * phase;
        return v;
    };
    const double scale = (-std::expm1(-a)) / (2.0 * a);
    auto r = quad::integrate<Eigen::Vector4cd>(integrand, 0.0, support_angle(a), m.tolerance() * scale, m.tolerance(),
                                               4000);
    const double amp = m.amplitude();
    return {amp * r.value[0], amp * r.value[1], amp * r.value[2], amp * r.value[3]};
}

CVec3 detection_field(const DetectionMode& m, const Vec3& r) {
    const double rho = std::hypot(r.x(), r.y());
    const RadialField f = radial_field(m, rho, r.z());
    const double cos_phi = rho > 0.0 ? r.x() / rho : 0.0;
    return CVec3(f.ex, 0.0, cdouble(0.0, -1.0) * cos_phi * f.ez);
}

CVec3 detection_magnetic_field(const DetectionMode& m, const Vec3& r) {
    const double rho = std::hypot(r.x(), r.y());
    const RadialField f = radial_field(m, rho, r.z());
    double cos2 = 1.0;
    double sin2 = 0.0;
    if (rho > 0.0) {
        const double c = r.x() / rho;
        const double s = r.y() / rho;
        cos2 = c * c - s * s;
        sin2 = 2.0 * s * c;
    }
    // H^z does not enter the z-directed flux and is left at zero.
    return CVec3(sin2 * f.hy2, f.hy0 - cos2 * f.hy2, 0.0);
}

double mode_norm(const DetectionMode& m) { return m.norm(); }

double mode_norm_real_space(const DetectionMode& m, double plane_z, double radius_factor) {
    const double rayleigh = kPi * m.w0() * m.w0();
    const double width = m.w0() * std::sqrt(1.0 + (plane_z / rayleigh) * (plane_z / rayleigh));
    auto integrand = [&](double rho) {
        const RadialField f = radial_field(m, rho, plane_z);
        return 2.0 * kPi * rho * (f.ex * std::conj(f.hy0)).real();
    };
    const double reference = m.norm();
    auto [total, last] = radial_panels<double>(integrand, radius_factor * width, 0.5 * width,
                                               m.tolerance() * reference, m.tolerance());
    if (last > 1e-8 * std::abs(total))
        throw NumericalError("real-space norm not converged at radius " + std::to_string(radius_factor * width), last);
    return total;
}

ModeSamples sample_mode(const DetectionMode& m, const Geometry& g, Model model) {
    ModeSamples out;
    out.model = model;
    out.two_sided = m.two_sided();
    out.w0 = m.w0();
    out.norm = m.norm();
    out.values.resize(static_cast<Eigen::Index>(g.size()) * rows_per_atom(model));
    // Symmetric lattice sites share (rho, z); evaluate each radial profile once.
    std::map<std::pair<double, double>, RadialField> cache;
    for (int a = 0; a < g.size(); ++a) {
        const Vec3& r = g.positions()[a];
        const double rho = std::hypot(r.x(), r.y());
        auto key = std::make_pair(rho, r.z());
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, radial_field(m, rho, r.z())).first;
        const double cos_phi = rho > 0.0 ? r.x() / rho : 0.0;
        const CVec3 e(it->second.ex, 0.0, cdouble(0.0, -1.0) * cos_phi * it->second.ez);
        if (model == Model::TwoLevel) {
            out.values[a] = (e.transpose() * g.dipoles()[a].cast<cdouble>())(0);
        } else {
            out.values.segment<3>(3 * a) = e;
        }
    }
    return out;
}

ProjectionCheck validate_projection(const DetectionMode& m, const Vec3& dipole_position,
                                    const Vec3& dipole_orientation, double plane_z, double radius_factor) {
    if (!(plane_z > dipole_position.z()))
        throw InvalidArgument("integration plane must lie on the +z side of the dipole");
    if (std::abs(dipole_orientation.norm() - 1.0) > 1e-12)
        throw InvalidArgument("dipole orientation must be a unit vector");
    const cdouble i(0.0, 1.0);
    const CVec3 dip = dipole_orientation.cast<cdouble>();
    const double rho_d = std::hypot(dipole_position.x(), dipole_position.y());

    auto ring = [&](double rho) -> cdouble {
        if (rho == 0.0) return 0.0;
        const RadialField f = radial_field(m, rho, plane_z);
        const double lateral = std::hypot(rho + rho_d, plane_z - dipole_position.z());
        const int bandwidth = static_cast<int>(std::ceil(kWaveNumber * rho * rho_d / lateral));
        const int nphi = 64 + 4 * bandwidth;
        cdouble sum = 0.0;
        for (int p = 0; p < nphi; ++p) {
            const double phi = 2.0 * kPi * p / nphi;
            const double c = std::cos(phi);
            const double s = std::sin(phi);
            const Vec3 r(rho * c, rho * s, plane_z);
            const CVec3 e_det(f.ex, 0.0, -i * c * f.ez);
            const CVec3 h_det(2.0 * s * c * f.hy2, f.hy0 - (c * c - s * s) * f.hy2, 0.0);

            const Vec3 sep = r - dipole_position;
            const double dist = sep.norm();
            const CVec3 e_out = greens_tensor(r, dipole_position) * dip;
            const cdouble scalar = std::exp(i * kWaveNumber * dist) / (4.0 * kPi * dist);
            const cdouble radial = scalar * (i * kWaveNumber - 1.0 / dist) / (i * kWaveNumber);
            const CVec3 h_out = radial * (sep / dist).cast<cdouble>().cross(dip);

            const cdouble first = std::conj(e_det.x()) * h_out.y() - std::conj(e_det.y()) * h_out.x();
            const cdouble second = e_out.x() * std::conj(h_det.y()) - e_out.y() * std::conj(h_det.x());
            sum += 0.5 * (first + second);
        }
        return rho * sum * (2.0 * kPi / nphi);
    };

    const CVec3 at_dipole = detection_field(m, dipole_position);
    ProjectionCheck out;
    out.closed_form = i / (2.0 * kWaveNumber) * (at_dipole.conjugate().transpose() * dip)(0);
    const double reference = std::abs(i / (2.0 * kWaveNumber) * m.focus_value());
    const double rayleigh = kPi * m.w0() * m.w0();
    const double width = m.w0() * std::hypot(1.0, plane_z / rayleigh);
    const double radius = radius_factor * width + rho_d;
    auto [total, last] = radial_panels<cdouble>(ring, radius, 0.5 * width, m.tolerance() * reference, m.tolerance());
    if (last > 1e-6 * std::max(std::abs(total), reference))
        throw NumericalError("projection integral truncated at radius " + std::to_string(radius), last);
    out.numeric = total;
    out.radius = radius;
    out.absolute_discrepancy = std::abs(out.numeric - out.closed_form);
    out.relative_discrepancy = out.absolute_discrepancy / std::abs(out.closed_form);
    return out;
}

} // namespace arraymem
