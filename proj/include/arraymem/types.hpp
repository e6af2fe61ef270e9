#pragma once

#include <complex>
#include <numbers>
#include <string_view>

#include <Eigen/Dense>

namespace arraymem {

using cdouble = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

// Lengths in resonant wavelengths, rates in single-atom decay rates.
inline constexpr double kWaveNumber = 2.0 * std::numbers::pi;

/// Resonant cross-section 3 lambda^2 / (2 pi) in wavelength units.
inline constexpr double kCrossSection = 3.0 / (2.0 * std::numbers::pi);

enum class Model { TwoLevel, Isotropic };

inline constexpr std::string_view to_string(Model m) {
    return m == Model::TwoLevel ? "two-level" : "isotropic";
}

Model model_from_string(std::string_view name);

/// Rows of the interaction matrix per atom.
inline constexpr int rows_per_atom(Model m) { return m == Model::TwoLevel ? 1 : 3; }

} // namespace arraymem
