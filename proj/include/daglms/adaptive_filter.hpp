#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "daglms/metric_series.hpp"
#include "daglms/polynomial.hpp"

namespace daglms {

/// Coefficients of the dynamic adaptation gain H_DAG = C(q^-1) / D'(q^-1).
///
///   C  = 1 + c_1 q^-1 + ... + c_nC q^-nC
///   D' = 1 - d'_1 q^-1 - ... - d'_nD' q^-nD'
///
/// The integrated denominator D = (1 - q^-1) D' = 1 - sum d_i q^-i has
/// d_i = d'_i - d'_{i-1} with d'_0 = -1 and d'_nD = 0, nD = nD' + 1.
struct DagCoefficients {
    std::vector<double> c;
    std::vector<double> d_prime;

    static DagCoefficients identity() { return {}; }
    /// (1 + c1 q^-1 + c2 q^-2) / (1 - d1p q^-1). Zero coefficients are kept
    /// so the state depths are the same for every point of the family.
    static DagCoefficients arima2(double c1, double c2, double d1_prime) { return {{c1, c2}, {d1_prime}}; }

    bool is_identity() const;

    /// d_1..d_nD.
    std::vector<double> integrated_denominator() const;
    /// C as a full polynomial in q^-1.
    Poly numerator() const;
    /// D' as a full polynomial in q^-1.
    Poly denominator() const;
};

struct StepSizeRule {
    enum class Kind { lms, nlms, plms };

    Kind kind = Kind::lms;
    double mu = 0.01;
    double delta = 1e-16; ///< NLMS regularizer

    static StepSizeRule lms(double mu) { return {Kind::lms, mu, 0.0}; }
    static StepSizeRule nlms(double mu, double delta = 1e-16) { return {Kind::nlms, mu, delta}; }
    static StepSizeRule plms(double mu) { return {Kind::plms, mu, 0.0}; }

    /// Throws ConfigError for negative or non-finite parameters.
    void validate() const;
};

const char* to_string(StepSizeRule::Kind kind);

/// Effective step size mu(t) for regressor energy rr = r'r.
double step_size(const StepSizeRule& rule, double rr);

enum class PriorMode {
    exact,       ///< w0 = sum d_i w(t-i) + sum c_j G(t-j)
    approximate, ///< w0 = w(t-1)
};

struct UpdateRecord {
    double e_prior = 0.0;
    double e_posterior = 0.0;
    double mu_t = 0.0;
    double y_prior = 0.0;
    double y_posterior = 0.0;
};

/// FIR adaptive predictor with a DAG-filtered VS-LMS update.
///
///   w(t) = sum_{i=1..nD} d_i w(t-i) + G(t) + sum_{j=1..nC} c_j G(t-j),
///   G(k) = mu(k) r(k) e°(k)
///
/// G is cached as computed (mu(k) is not re-evaluated later). The a-priori
/// prediction uses w0, the part of w(t) known before e°(t).
class AdaptiveFilter {
public:
    static constexpr double kDivergenceNorm = 1e8;

    AdaptiveFilter(std::size_t num_weights, StepSizeRule rule, DagCoefficients dag,
                   PriorMode mode = PriorMode::exact);

    /// y°(t) = w0' r(t).
    double predict_prior(std::span<const double> regressor) const;

    /// Predicts, forms e°(t) = desired - y°(t), and adapts.
    UpdateRecord update(std::span<const double> regressor, double desired);

    /// Adapts with an externally measured a-priori error (filtered-regressor
    /// schemes where the error is only observable after the plant).
    UpdateRecord adapt(std::span<const double> regressor, double e_prior);

    /// Sets w(t) and every stored past weight vector to `w`; clears the
    /// correction history.
    void set_weights(std::span<const double> w);

    std::span<const double> weights() const noexcept { return weight_hist_[head_w_]; }
    /// w0 of the next update; depends only on stored history.
    std::span<const double> prior_weights() const
    {
        compute_prior_weights();
        return w0_;
    }
    std::size_t size() const noexcept { return n_; }
    std::size_t samples() const noexcept { return samples_; }
    const StepSizeRule& rule() const noexcept { return rule_; }
    const DagCoefficients& dag() const noexcept { return dag_; }
    PriorMode prior_mode() const noexcept { return mode_; }

private:
    void compute_prior_weights() const;
    const std::vector<double>& past_weight(std::size_t lag) const;
    const std::vector<double>& past_correction(std::size_t lag) const;
    UpdateRecord apply(std::span<const double> regressor, double e_prior, double y_prior);

    std::size_t n_;
    StepSizeRule rule_;
    DagCoefficients dag_;
    PriorMode mode_;
    std::vector<double> d_;

    std::vector<std::vector<double>> weight_hist_;     // depth nD, lag 1 at head_w_
    std::vector<std::vector<double>> correction_hist_; // depth nC, lag 1 at head_g_
    std::size_t head_w_ = 0;
    std::size_t head_g_ = 0;

    mutable std::vector<double> w0_;
    mutable bool w0_valid_ = false;
    std::vector<double> scratch_;
    std::size_t samples_ = 0;
};

/// Tap-delay line of fixed length; view()[k] = x(t-k).
class TapLine {
public:
    explicit TapLine(std::size_t length);

    void push(double x);
    void clear();
    std::span<const double> view() const noexcept { return {buf_.data() + head_, len_}; }
    std::size_t size() const noexcept { return len_; }

private:
    std::size_t len_;
    std::size_t head_ = 0;
    std::vector<double> buf_; // mirrored halves keep the view contiguous
};

struct FilterRunOptions {
    std::size_t decorrelation_delay = 0;
    /// Leading samples that only fill the tap line; no update, no record.
    std::size_t warmup = 0;
    PriorMode prior_mode = PriorMode::exact;
    std::optional<std::vector<double>> reference_weights; ///< enables D^2
    std::optional<std::vector<double>> initial_weights;
    std::size_t mse_window = 100;
    std::vector<double>* final_weights = nullptr; ///< receives w at the end when set
};

/// Per-sample loop over a transversal predictor: the regressor is the tap
/// line of `input` delayed by `decorrelation_delay`, the target is `desired`.
/// Throws DivergenceError with the failing sample index.
MetricSeries run_filter(std::span<const double> input, std::span<const double> desired, const StepSizeRule& rule,
                        const DagCoefficients& dag, std::size_t filter_length, const FilterRunOptions& options = {});

/// Same loop with an explicit regressor per sample (rows of `regressors`).
MetricSeries run_regression(std::span<const std::vector<double>> regressors, std::span<const double> desired,
                            const StepSizeRule& rule, const DagCoefficients& dag, const FilterRunOptions& options = {});

} // namespace daglms
