#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace daglms {

/// Time-indexed record of an adaptive run. All columns have the same length.
///
/// Unknown quantities are NaN (d_squared without a reference, attenuation
/// outside ANC). mse_db is -inf when the windowed mean square is exactly 0.
/// In Monte Carlo averages e_prior / e_posterior hold ensemble RMS values and
/// mse_db is computed from the ensemble-mean windowed MSE.
struct MetricSeries {
    std::vector<double> e_prior;
    std::vector<double> e_posterior;
    std::vector<double> mse_db;
    std::vector<double> d_squared;
    std::vector<double> j_eps;
    std::vector<double> j_d;
    std::vector<double> attenuation_db;

    std::size_t size() const noexcept { return e_prior.size(); }
    void resize(std::size_t n);
};

/// Trailing mean of x^2 over min(t+1, window) samples.
std::vector<double> windowed_mean_square(std::span<const double> x, std::size_t window);

double to_db(double power);
double from_db(double db);

/// Fills mse_db from e_prior and the running sums from e_posterior and d_squared.
void finalize_metrics(MetricSeries& series, std::size_t mse_window = 100);

/// First index with value <= threshold.
std::optional<std::size_t> first_at_or_below(std::span<const double> x, double threshold);

/// Sum of linear windowed MSE (from mse_db) over the first n samples.
double sum_mse(const MetricSeries& series, std::size_t n);

/// Ensemble average of equal-length runs (see MetricSeries for the rules).
MetricSeries average_runs(std::span<const MetricSeries> runs, std::size_t mse_window = 100);

} // namespace daglms
