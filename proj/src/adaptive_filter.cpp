#include "daglms/adaptive_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "daglms/errors.hpp"

namespace daglms {

bool DagCoefficients::is_identity() const
{
    return c.empty() && d_prime.empty();
}

std::vector<double> DagCoefficients::integrated_denominator() const
{
    const std::size_t nd = d_prime.size() + 1;
    std::vector<double> d(nd);
    for (std::size_t i = 1; i <= nd; ++i) {
        const double cur = i <= d_prime.size() ? d_prime[i - 1] : 0.0;
        const double prev = i == 1 ? -1.0 : d_prime[i - 2];
        d[i - 1] = cur - prev;
    }
    return d;
}

Poly DagCoefficients::numerator() const
{
    Poly p{1.0};
    p.insert(p.end(), c.begin(), c.end());
    return p;
}

Poly DagCoefficients::denominator() const
{
    Poly p{1.0};
    for (double v : d_prime) p.push_back(-v);
    return p;
}

void StepSizeRule::validate() const
{
    if (!std::isfinite(mu) || mu < 0.0) throw ConfigError("step size mu must be finite and >= 0");
    if (kind == Kind::nlms && (!std::isfinite(delta) || delta < 0.0))
        throw ConfigError("NLMS delta must be finite and >= 0");
}

const char* to_string(StepSizeRule::Kind kind)
{
    switch (kind) {
    case StepSizeRule::Kind::lms: return "lms";
    case StepSizeRule::Kind::nlms: return "nlms";
    case StepSizeRule::Kind::plms: return "plms";
    }
    return "?";
}

double step_size(const StepSizeRule& rule, double rr)
{
    switch (rule.kind) {
    case StepSizeRule::Kind::lms: return rule.mu;
    case StepSizeRule::Kind::nlms: {
        const double den = rule.delta + rr;
        return den > 0.0 ? rule.mu / den : 0.0;
    }
    case StepSizeRule::Kind::plms: return rule.mu / (1.0 + rule.mu * rr);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------

AdaptiveFilter::AdaptiveFilter(std::size_t num_weights, StepSizeRule rule, DagCoefficients dag, PriorMode mode)
    : n_(num_weights), rule_(rule), dag_(std::move(dag)), mode_(mode), d_(dag_.integrated_denominator()),
      weight_hist_(d_.size(), std::vector<double>(num_weights, 0.0)),
      correction_hist_(dag_.c.size(), std::vector<double>(num_weights, 0.0)), w0_(num_weights, 0.0),
      scratch_(num_weights, 0.0)
{
    if (num_weights == 0) throw ConfigError("filter length must be >= 1");
    rule_.validate();
    for (double v : dag_.c)
        if (!std::isfinite(v)) throw ConfigError("DAG numerator has a non-finite coefficient");
    for (double v : dag_.d_prime)
        if (!std::isfinite(v)) throw ConfigError("DAG denominator has a non-finite coefficient");
}

const std::vector<double>& AdaptiveFilter::past_weight(std::size_t lag) const
{
    return weight_hist_[(head_w_ + lag - 1) % weight_hist_.size()];
}

const std::vector<double>& AdaptiveFilter::past_correction(std::size_t lag) const
{
    return correction_hist_[(head_g_ + lag - 1) % correction_hist_.size()];
}

void AdaptiveFilter::compute_prior_weights() const
{
    if (w0_valid_) return;
    if (mode_ == PriorMode::approximate || dag_.is_identity()) {
        // Identity DAG: d = {1}, no corrections, so w0 = w(t-1) exactly.
        std::copy(past_weight(1).begin(), past_weight(1).end(), w0_.begin());
    } else {
        std::fill(w0_.begin(), w0_.end(), 0.0);
        for (std::size_t i = 1; i <= d_.size(); ++i) {
            const auto& w = past_weight(i);
            const double di = d_[i - 1];
            for (std::size_t k = 0; k < n_; ++k) w0_[k] += di * w[k];
        }
        for (std::size_t j = 1; j <= dag_.c.size(); ++j) {
            const auto& g = past_correction(j);
            const double cj = dag_.c[j - 1];
            for (std::size_t k = 0; k < n_; ++k) w0_[k] += cj * g[k];
        }
    }
    w0_valid_ = true;
}

double AdaptiveFilter::predict_prior(std::span<const double> regressor) const
{
    if (regressor.size() != n_) throw ConfigError("regressor length does not match filter length");
    compute_prior_weights();
    double y = 0.0;
    for (std::size_t k = 0; k < n_; ++k) y += w0_[k] * regressor[k];
    return y;
}

UpdateRecord AdaptiveFilter::update(std::span<const double> regressor, double desired)
{
    const double y = predict_prior(regressor);
    return apply(regressor, desired - y, y);
}

UpdateRecord AdaptiveFilter::adapt(std::span<const double> regressor, double e_prior)
{
    if (regressor.size() != n_) throw ConfigError("regressor length does not match filter length");
    compute_prior_weights();
    return apply(regressor, e_prior, std::numeric_limits<double>::quiet_NaN());
}

UpdateRecord AdaptiveFilter::apply(std::span<const double> regressor, double e_prior, double y_prior)
{
    double rr = 0.0;
    for (double v : regressor) rr += v * v;
    if (!std::isfinite(rr) || !std::isfinite(e_prior))
        throw DivergenceError("non-finite regressor or error at sample " + std::to_string(samples_), samples_,
                              std::numeric_limits<double>::quiet_NaN());

    UpdateRecord rec;
    rec.e_prior = e_prior;
    rec.y_prior = y_prior;
    rec.mu_t = step_size(rule_, rr);

    const double gain = rec.mu_t * e_prior;
    for (std::size_t k = 0; k < n_; ++k) scratch_[k] = gain * regressor[k];

    // New weights go into the slot of the oldest stored weight vector.
    head_w_ = (head_w_ + weight_hist_.size() - 1) % weight_hist_.size();
    auto& w_new = weight_hist_[head_w_];
    double norm2 = 0.0;
    double y_post = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
        w_new[k] = w0_[k] + scratch_[k];
        norm2 += w_new[k] * w_new[k];
        y_post += w_new[k] * regressor[k];
    }
    if (!correction_hist_.empty()) {
        head_g_ = (head_g_ + correction_hist_.size() - 1) % correction_hist_.size();
        std::copy(scratch_.begin(), scratch_.end(), correction_hist_[head_g_].begin());
    }
    w0_valid_ = false;

    if (rule_.kind == StepSizeRule::Kind::plms)
        rec.e_posterior = e_prior / (1.0 + rule_.mu * rr);
    else
        rec.e_posterior = e_prior * (1.0 - rec.mu_t * rr);
    rec.y_posterior = y_post;

    const double norm = std::sqrt(norm2);
    const std::size_t t = samples_++;
    if (!std::isfinite(norm) || norm > kDivergenceNorm)
        throw DivergenceError("weight norm " + std::to_string(norm) + " exceeds divergence limit at sample " +
                                  std::to_string(t),
                              t, norm);
    return rec;
}

void AdaptiveFilter::set_weights(std::span<const double> w)
{
    if (w.size() != n_) throw ConfigError("weight vector length does not match filter length");
    for (auto& h : weight_hist_) std::copy(w.begin(), w.end(), h.begin());
    for (auto& g : correction_hist_) std::fill(g.begin(), g.end(), 0.0);
    w0_valid_ = false;
}

// ---------------------------------------------------------------------------

TapLine::TapLine(std::size_t length) : len_(length), buf_(2 * length, 0.0)
{
    if (length == 0) throw ConfigError("tap line length must be >= 1");
}

void TapLine::push(double x)
{
    head_ = (head_ + len_ - 1) % len_;
    buf_[head_] = x;
    buf_[head_ + len_] = x;
}

void TapLine::clear()
{
    std::fill(buf_.begin(), buf_.end(), 0.0);
    head_ = 0;
}

// ---------------------------------------------------------------------------

namespace {

double distance_squared(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

void check_options(const FilterRunOptions& options, std::size_t n)
{
    if (options.reference_weights && options.reference_weights->size() != n)
        throw ConfigError("reference weight vector has length " + std::to_string(options.reference_weights->size()) +
                          ", expected " + std::to_string(n));
    if (options.initial_weights && options.initial_weights->size() != n)
        throw ConfigError("initial weight vector has length " + std::to_string(options.initial_weights->size()) +
                          ", expected " + std::to_string(n));
}

template <class RegressorAt>
MetricSeries run_loop(std::size_t num_samples, std::size_t n, std::span<const double> desired, const StepSizeRule& rule,
                      const DagCoefficients& dag, const FilterRunOptions& options, RegressorAt&& regressor_at)
{
    check_options(options, n);
    AdaptiveFilter filter(n, rule, dag, options.prior_mode);
    if (options.initial_weights) filter.set_weights(*options.initial_weights);

    MetricSeries out;
    out.resize(num_samples);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t t = 0; t < num_samples; ++t) {
        const std::span<const double> r = regressor_at(t);
        out.d_squared[t] = options.reference_weights ? distance_squared(*options.reference_weights, filter.weights()) : nan;
        const auto rec = filter.update(r, desired[t]);
        out.e_prior[t] = rec.e_prior;
        out.e_posterior[t] = rec.e_posterior;
        out.attenuation_db[t] = nan;
    }
    finalize_metrics(out, options.mse_window);
    if (options.final_weights) options.final_weights->assign(filter.weights().begin(), filter.weights().end());
    return out;
}

} // namespace

MetricSeries run_filter(std::span<const double> input, std::span<const double> desired, const StepSizeRule& rule,
                        const DagCoefficients& dag, std::size_t filter_length, const FilterRunOptions& options)
{
    if (input.size() != desired.size()) throw ConfigError("input and desired sequences differ in length");
    TapLine taps(filter_length);
    const std::size_t delay = options.decorrelation_delay;
    const std::size_t skip = std::min(options.warmup, input.size());
    for (std::size_t t = 0; t < skip; ++t) taps.push(t >= delay ? input[t - delay] : 0.0);
    return run_loop(input.size() - skip, filter_length, desired.subspan(skip), rule, dag, options,
                    [&](std::size_t k) {
                        const std::size_t t = k + skip;
                        taps.push(t >= delay ? input[t - delay] : 0.0);
                        return taps.view();
                    });
}

MetricSeries run_regression(std::span<const std::vector<double>> regressors, std::span<const double> desired,
                            const StepSizeRule& rule, const DagCoefficients& dag, const FilterRunOptions& options)
{
    if (regressors.size() != desired.size()) throw ConfigError("regressor and desired sequences differ in length");
    if (regressors.empty()) return {};
    const std::size_t n = regressors.front().size();
    for (const auto& r : regressors)
        if (r.size() != n) throw ConfigError("regressor rows differ in length");
    return run_loop(regressors.size(), n, desired, rule, dag, options,
                    [&](std::size_t t) { return std::span<const double>(regressors[t]); });
}

} // namespace daglms
