#include "daglms/metric_series.hpp"

#include <cmath>
#include <limits>

#include "daglms/errors.hpp"

namespace daglms {

void MetricSeries::resize(std::size_t n)
{
    e_prior.resize(n);
    e_posterior.resize(n);
    mse_db.resize(n);
    d_squared.resize(n);
    j_eps.resize(n);
    j_d.resize(n);
    attenuation_db.resize(n, std::numeric_limits<double>::quiet_NaN());
}

std::vector<double> windowed_mean_square(std::span<const double> x, std::size_t window)
{
    if (window == 0) throw ConfigError("MSE window must be >= 1");
    std::vector<double> out(x.size());
    // Recomputed sums of squares keep the result exact for all-zero input
    // (a running difference could leave -0 or tiny residue).
    for (std::size_t t = 0; t < x.size(); ++t) {
        const std::size_t begin = t + 1 >= window ? t + 1 - window : 0;
        double s = 0.0;
        for (std::size_t k = begin; k <= t; ++k) s += x[k] * x[k];
        out[t] = s / static_cast<double>(t + 1 - begin);
    }
    return out;
}

double to_db(double power)
{
    if (power <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(power);
}

double from_db(double db)
{
    if (std::isinf(db) && db < 0) return 0.0;
    return std::pow(10.0, db / 10.0);
}

void finalize_metrics(MetricSeries& series, std::size_t mse_window)
{
    const auto ms = windowed_mean_square(series.e_prior, mse_window);
    double je = 0.0;
    double jd = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        series.mse_db[t] = to_db(ms[t]);
        je += series.e_posterior[t] * series.e_posterior[t];
        jd += series.d_squared[t];
        series.j_eps[t] = je;
        series.j_d[t] = jd;
    }
}

std::optional<std::size_t> first_at_or_below(std::span<const double> x, double threshold)
{
    for (std::size_t t = 0; t < x.size(); ++t)
        if (x[t] <= threshold) return t;
    return std::nullopt;
}

double sum_mse(const MetricSeries& series, std::size_t n)
{
    double s = 0.0;
    for (std::size_t t = 0; t < n && t < series.size(); ++t) s += from_db(series.mse_db[t]);
    return s;
}

MetricSeries average_runs(std::span<const MetricSeries> runs, std::size_t mse_window)
{
    if (runs.empty()) return {};
    const std::size_t n = runs.front().size();
    for (const auto& r : runs)
        if (r.size() != n) throw ConfigError("cannot average runs of different lengths");

    MetricSeries out;
    out.resize(n);
    std::vector<double> ms(n, 0.0);
    std::vector<double> att_sum(n, 0.0);
    std::vector<std::size_t> att_count(n, 0);
    const double k = 1.0 / static_cast<double>(runs.size());
    for (const auto& r : runs) {
        const auto w = windowed_mean_square(r.e_prior, mse_window);
        for (std::size_t t = 0; t < n; ++t) {
            out.e_prior[t] += r.e_prior[t] * r.e_prior[t] * k;
            out.e_posterior[t] += r.e_posterior[t] * r.e_posterior[t] * k;
            out.d_squared[t] += r.d_squared[t] * k;
            ms[t] += w[t] * k;
            if (!std::isnan(r.attenuation_db[t])) {
                att_sum[t] += r.attenuation_db[t];
                ++att_count[t];
            }
        }
    }
    double je = 0.0;
    double jd = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        // j_eps is the mean of per-run sums, i.e. the running sum of ensemble mean squares.
        je += out.e_posterior[t];
        jd += out.d_squared[t];
        out.e_prior[t] = std::sqrt(out.e_prior[t]);
        out.e_posterior[t] = std::sqrt(out.e_posterior[t]);
        out.mse_db[t] = to_db(ms[t]);
        out.j_eps[t] = je;
        out.j_d[t] = jd;
        out.attenuation_db[t] =
            att_count[t] ? att_sum[t] / static_cast<double>(att_count[t]) : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

} // namespace daglms
