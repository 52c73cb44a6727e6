#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "daglms/errors.hpp"
#include "daglms/experiments.hpp"
#include "monte_carlo.hpp"

namespace daglms {

namespace {

std::vector<double> ale_input(const ScenarioConfig& cfg, std::uint64_t seed)
{
    const auto& a = cfg.ale;
    const std::size_t n = cfg.horizon + cfg.filter_length + cfg.delay;

    MultisineSource tones;
    tones.frequencies_hz = a.sine_frequencies_hz;
    tones.amplitudes = {a.sine_amplitude};
    if (a.random_phases) {
        std::mt19937_64 rng(derive_seed(seed, 0));
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        for (std::size_t k = 0; k < tones.frequencies_hz.size(); ++k) tones.phases_rad.push_back(phase(rng));
    }
    auto x = generate(SignalSpec{tones, a.sample_rate, n, seed});

    std::vector<double> wide;
    if (a.wideband_file) {
        wide = generate(SignalSpec{FileSource{*a.wideband_file}, a.sample_rate, n, seed});
        double var = 0.0;
        for (double v : wide) var += v * v;
        var /= static_cast<double>(std::max<std::size_t>(n, 1));
        const double k = var > 0.0 ? a.wideband_std / std::sqrt(var) : 0.0;
        for (auto& v : wide) v *= k;
    } else {
        wide = generate(SignalSpec{ColoredNoiseSource{a.wideband_std, a.wideband_pole}, a.sample_rate, n,
                                   derive_seed(seed, 1)});
    }
    for (std::size_t t = 0; t < n; ++t) x[t] += wide[t];
    return x;
}

} // namespace

ScenarioResult run_ale(const ScenarioConfig& cfg)
{
    if (cfg.scenario != Scenario::ale) throw ConfigError("run_ale needs an ale config");
    cfg.validate();

    struct Run {
        MetricSeries series;
        std::vector<double> weights;
    };
    const auto runs = detail::run_indexed<Run>(cfg.monte_carlo_runs, cfg.parallel, [&](std::size_t r) {
        const auto x = ale_input(cfg, derive_seed(cfg.rng_seed, r));
        FilterRunOptions opt;
        opt.decorrelation_delay = cfg.delay;
        opt.prior_mode = cfg.prior_mode;
        opt.warmup = cfg.filter_length + cfg.delay;
        try {
            Run out;
            opt.final_weights = &out.weights;
            out.series = run_filter(x, x, cfg.algorithm, cfg.dag, cfg.filter_length, opt);
            return out;
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string(e.what()) + " (ale run " + std::to_string(r) + ")", e.sample(),
                                  e.weight_norm());
        }
    });

    std::vector<MetricSeries> series;
    series.reserve(runs.size());
    for (const auto& r : runs) series.push_back(r.series);

    ScenarioResult res;
    res.series = average_runs(series);
    res.final_weights = runs.front().weights;
    const auto conv = first_at_or_below(res.series.mse_db, cfg.ale.mse_threshold_db);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    res.summary = {
        {"convergence_time", conv ? static_cast<double>(*conv) : nan},
        {"sum_mse", sum_mse(res.series, cfg.ale.mse_sum_samples)},
        {"terminal_mse_db", res.series.size() ? res.series.mse_db.back() : nan},
        {"runs", static_cast<double>(cfg.monte_carlo_runs)},
    };
    return res;
}

} // namespace daglms
