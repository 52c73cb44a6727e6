#include "daglms/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "daglms/errors.hpp"

namespace daglms {

Poly poly_multiply(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

Poly poly_add(std::span<const double> a, std::span<const double> b)
{
    Poly out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

Poly poly_scale(std::span<const double> a, double k)
{
    Poly out(a.begin(), a.end());
    for (auto& v : out) v *= k;
    return out;
}

std::complex<double> poly_eval(std::span<const double> p, std::complex<double> z_inv)
{
    // Horner in z^-1.
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = p.size(); i-- > 0;)
        acc = acc * z_inv + p[i];
    return acc;
}

std::complex<double> poly_on_circle(std::span<const double> p, double omega)
{
    return poly_eval(p, std::polar(1.0, -omega));
}

std::vector<std::complex<double>> poly_roots(std::span<const double> p)
{
    if (p.empty() || p[0] == 0.0)
        throw DomainError("poly_roots: leading coefficient must be nonzero");

    std::size_t n = p.size() - 1;
    while (n > 0 && p[n] == 0.0) --n;
    if (n == 0) return {};

    // Companion of the monic z^n + (p1/p0) z^(n-1) + ... + pn/p0.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
        companion(0, static_cast<Eigen::Index>(j)) = -p[j + 1] / p[0];
    for (std::size_t i = 1; i < n; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const auto& ev = solver.eigenvalues();
    std::vector<std::complex<double>> roots(ev.data(), ev.data() + ev.size());
    return roots;
}

double max_root_modulus(std::span<const double> p)
{
    double m = 0.0;
    for (const auto& r : poly_roots(p)) m = std::max(m, std::abs(r));
    return m;
}

bool is_stable(std::span<const double> p, double radius)
{
    return max_root_modulus(p) < radius;
}

} // namespace daglms
