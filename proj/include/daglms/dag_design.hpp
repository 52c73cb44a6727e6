#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "daglms/adaptive_filter.hpp"

namespace daglms {

inline constexpr std::size_t kDefaultGridSize = 8192;
inline constexpr std::size_t kDefaultQuadratureNodes = 16384;

/// H_DAG(e^{-i omega}).
std::complex<double> evaluate(const DagCoefficients& dag, double omega);

/// H_PAA(e^{-i omega}) = H_DAG / (1 - e^{-i omega}); omega must be nonzero.
std::complex<double> evaluate_paa(const DagCoefficients& dag, double omega);

struct FrequencyResponse {
    std::vector<double> omega; ///< (0, pi], omega_k = pi k / grid_size
    std::vector<double> magnitude_db;
    std::vector<double> phase_deg;
    std::vector<double> real_part;
};

FrequencyResponse bode(const DagCoefficients& dag, std::size_t grid_size = kDefaultGridSize);

struct SprVerdict {
    bool is_spr = false;
    std::optional<bool> criterion_verdict; ///< closed form, ARIMA2-shaped DAGs only
    bool sweep_verdict = false;
    double min_real_part = 0.0;
    double argmin_omega = 0.0;
    bool roots_ok = false; ///< numerator and denominator strictly stable
};

/// Admissible open interval (lo, hi) for c1 given c2 and d1', or nullopt if
/// c2 or d1' rule out every c1. Includes the numerator-root condition.
std::optional<std::pair<double, double>> arima2_c1_bounds(double c2, double d1_prime);

/// Closed-form SPR test for (1 + c1 q^-1 + c2 q^-2) / (1 - d1' q^-1).
bool spr_criterion_arima2(double c1, double c2, double d1_prime);

/// Signed distance of c1 to the nearest closed-form bound (positive inside),
/// or nullopt when the row is empty.
std::optional<double> arima2_margin(double c1, double c2, double d1_prime);

/// Numeric oracle: roots strictly inside the unit circle and
/// min Re H_DAG > 0 over a uniform grid on [0, pi] with local refinement.
/// Works for any order; fills criterion_verdict for ARIMA2-shaped DAGs.
SprVerdict spr_sweep_oracle(const DagCoefficients& dag, std::size_t grid_size = kDefaultGridSize);

struct PaaVerdict {
    bool is_pr = false;
    bool denominator_stable = false;
    bool numerator_ok = false; ///< roots of C on or inside the circle
    double residue = 0.0;      ///< C(1) / D'(1), residue of the pole at z = 1
    double min_real_part = 0.0;
    double argmin_omega = 0.0;
};

/// Positive-realness of H_PAA = C / ((1 - q^-1) D') with its pole at z = 1:
/// D' stable, C marginally stable, Re H_PAA >= -tolerance on (0, pi], residue > 0.
PaaVerdict paa_pr_check(const DagCoefficients& dag, std::size_t grid_size = kDefaultGridSize,
                        double tolerance = 1e-9);

/// Trapezoid quadrature of the integral over [0, pi] of log|C/D'|.
/// Throws DomainError unless all roots are strictly inside the circle.
double log_gain_integral(const DagCoefficients& dag, std::size_t nodes = kDefaultQuadratureNodes);

/// (1 + sum c) / (1 - sum d'). Throws DomainError when the denominator is 0.
double steady_state_gain(const DagCoefficients& dag);

enum class ContourId { spr = 0, paa_pr = 1 };

struct ContourPoint {
    double c1;
    double c2;
    ContourId boundary;
};

/// Boundaries of the SPR region of H_DAG and the PR region of H_PAA in the
/// (c1, c2) plane for fixed d1'. For fixed omega both conditions are linear in
/// c1, so each c2 row is an interval; rows are sampled on `resolution` values
/// of c2 in [-1, 1] and each region is emitted as a closed polyline.
std::vector<ContourPoint> contour_trace(double d1_prime, std::size_t resolution,
                                        std::size_t grid_size = 2048);

} // namespace daglms
