#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "arraymem/error.hpp"

namespace arraymem::quad {

template <typename T>
struct Result {
    T value{};
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
double magnitude(const T& v) {
    if constexpr (requires { v.cwiseAbs().maxCoeff(); })
        return v.cwiseAbs().maxCoeff();
    else
        return std::abs(v);
}

struct Segment {
    double a, b;
    double error;
};

template <typename T>
struct Piece {
    Segment seg;
    T value;
};

template <typename T, typename F>
Piece<T> kronrod(F&& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(centre);
    T kron = fc * kKronrodWeights[7];
    T gauss = fc * kGaussWeights[3];
    for (int k = 0; k < 7; ++k) {
        const double dx = half * kNodes[k];
        const T sum = f(centre - dx) + f(centre + dx);
        kron += sum * kKronrodWeights[k];
        if (k % 2 == 1) gauss += sum * kGaussWeights[k / 2];
    }
    kron *= half;
    gauss *= half;
    return {{a, b, magnitude(kron - gauss)}, kron};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) quadrature on [a, b].
///
/// Bisects the segment with the largest error estimate until the summed
/// estimate falls below max(abs_tol, rel_tol * |I|). Subdivision order is
/// deterministic, so repeated calls are bitwise identical. Throws
/// NumericalError with the achieved estimate when `max_segments` is exhausted.
template <typename T, typename F>
Result<T> integrate(F&& f, double a, double b, double abs_tol, double rel_tol, int max_segments = 2000) {
    std::vector<detail::Piece<T>> pieces;
    pieces.reserve(64);
    pieces.push_back(detail::kronrod<T>(f, a, b));
    int evaluations = 15;
    auto by_error = [](const auto& x, const auto& y) { return x.seg.error < y.seg.error; };
    while (true) {
        T total = pieces.front().value;
        double error = pieces.front().seg.error;
        for (std::size_t k = 1; k < pieces.size(); ++k) {
            total += pieces[k].value;
            error += pieces[k].seg.error;
        }
        if (error <= std::max(abs_tol, rel_tol * detail::magnitude(total)))
            return {total, error, evaluations};
        if (static_cast<int>(pieces.size()) >= max_segments)
            throw NumericalError("adaptive quadrature did not converge", error);
        auto worst = std::max_element(pieces.begin(), pieces.end(), by_error);
        const double lo = worst->seg.a;
        const double hi = worst->seg.b;
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi))
            throw NumericalError("adaptive quadrature reached machine resolution", error);
        *worst = detail::kronrod<T>(f, lo, mid);
        pieces.push_back(detail::kronrod<T>(f, mid, hi));
        evaluations += 30;
    }
}

} // namespace arraymem::quad
