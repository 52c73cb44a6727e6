#pragma once

#include <complex>
#include <span>
#include <vector>

namespace daglms {

/// Polynomial in the delay operator: p[0] + p[1] q^-1 + ... + p[n] q^-n.
using Poly = std::vector<double>;

Poly poly_multiply(std::span<const double> a, std::span<const double> b);
Poly poly_add(std::span<const double> a, std::span<const double> b);
Poly poly_scale(std::span<const double> a, double k);

/// Evaluates p at a given value of z^-1.
std::complex<double> poly_eval(std::span<const double> p, std::complex<double> z_inv);

/// Value of p on the unit circle, z^-1 = e^{-i omega}.
std::complex<double> poly_on_circle(std::span<const double> p, double omega);

/// Roots in z of p(z^-1), i.e. the roots of p[0] z^n + p[1] z^(n-1) + ... + p[n].
/// Computed as eigenvalues of the companion matrix. Trailing zero coefficients
/// (roots at the origin in z^-1 form) are trimmed. p[0] must be nonzero.
std::vector<std::complex<double>> poly_roots(std::span<const double> p);

/// Largest root modulus, 0 for a constant polynomial.
double max_root_modulus(std::span<const double> p);

/// Default stability threshold on root modulus.
inline constexpr double kStabilityRadius = 1.0 - 1e-12;

/// All roots strictly inside the circle of radius `radius`.
bool is_stable(std::span<const double> p, double radius = kStabilityRadius);

} // namespace daglms
