#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "daglms/adaptive_filter.hpp"
#include "daglms/metric_series.hpp"

namespace daglms {

/// Linearized adaptation loop: integrator, DAG and a scalar gain g standing in
/// for F E_r. The output sensitivity is
///   S = (1 - q^-1) D' / ((1 - q^-1) D' + g C).
struct SensitivityModel {
    double g = 0.01;
    DagCoefficients dag;

    Poly sensitivity_numerator() const;
    Poly sensitivity_denominator() const;
};

/// Settling band on |w~(t)| for a unit initial error.
inline constexpr double kDefaultSettlingBand = 1e-3;

struct TransientReport {
    /// step_response[0] = w~(0) = 1; step_response[t + 1] is S driven by a unit step, sample t.
    std::vector<double> step_response;
    std::optional<std::size_t> settling_time; ///< undefined when unstable or not settled in the horizon
    double predicted_speedup = 0.0;           ///< identity-DAG settling time / this one, same g
    bool stable = false;
    double max_pole_modulus = 0.0;
};

/// First index after which |y| stays within `band` up to the end of y.
/// nullopt when the last sample is outside the band.
std::optional<std::size_t> settling_time(std::span<const double> y, double band);

/// Throws ConfigError unless g > 0.
TransientReport sensitivity_step_response(const SensitivityModel& model, std::size_t horizon,
                                          double band = kDefaultSettlingBand);

/// Averaged dynamics w~(t+1) = w~(t) - mu E H_DAG[w~](t+1), each step an
/// (I + mu E) linear solve because H_DAG has unit leading coefficient.
/// H_DAG starts from zero history; w~(0) is the initial condition only.
struct AveragedTrajectory {
    std::vector<double> norm;           ///< ||w~(t)||, t = 0..horizon
    std::vector<Eigen::VectorXd> state; ///< w~(t)
};

/// Throws ConfigError for non-square E or size mismatch, DomainError if the
/// implicit step matrix is singular.
AveragedTrajectory averaged_feedback_oracle(const DagCoefficients& dag, const Eigen::MatrixXd& e_r, double mu,
                                            const Eigen::VectorXd& w0, std::size_t horizon);

/// g = mu mean(r'r) / dim.
double linearized_gain(double mu, double mean_rr, std::size_t dim);

struct TransientComparison {
    std::vector<double> wtilde;           ///< sqrt(D^2(t) / D^2(0)) measured
    std::vector<double> predicted_wtilde; ///< sensitivity step response
    std::optional<std::size_t> measured_settling;
    std::optional<std::size_t> predicted_settling;
    double g = 0.0;
};

/// Overlays the linearized prediction with gain g on the measured
/// normalized parameter error of an experiment (which must carry D^2).
TransientComparison compare_transient_prediction(const DagCoefficients& dag, const MetricSeries& experiment, double g,
                                                 double band = 0.1);

} // namespace daglms
