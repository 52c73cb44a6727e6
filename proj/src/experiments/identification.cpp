#include <cmath>
#include <limits>
#include <numeric>

#include "daglms/errors.hpp"
#include "daglms/experiments.hpp"
#include "monte_carlo.hpp"

namespace daglms {

std::vector<std::vector<double>> equation_error_regressors(const PlantModel& plant, std::span<const double> u,
                                                           std::span<const double> y)
{
    if (u.size() != y.size()) throw ConfigError("input and output sequences differ in length");
    const std::size_t na = plant.denominator.size();
    const std::size_t nb = plant.numerator.size();
    std::vector<std::vector<double>> rows(u.size(), std::vector<double>(na + nb, 0.0));
    for (std::size_t t = 0; t < u.size(); ++t) {
        auto& r = rows[t];
        for (std::size_t i = 1; i <= na; ++i) r[i - 1] = t >= i ? y[t - i] : 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            const std::size_t lag = plant.delay + j;
            r[na + j] = t >= lag ? u[t - lag] : 0.0;
        }
    }
    return rows;
}

std::vector<double> equation_error_parameters(const PlantModel& plant)
{
    std::vector<double> w;
    for (double a : plant.denominator) w.push_back(-a);
    w.insert(w.end(), plant.numerator.begin(), plant.numerator.end());
    return w;
}

namespace {

struct Problem {
    std::vector<std::vector<double>> regressors;
    std::vector<double> desired;
    std::vector<double> reference;
};

double population_std(std::span<const double> x)
{
    if (x.empty()) return 0.0;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double v = 0.0;
    for (double s : x) v += (s - mean) * (s - mean);
    return std::sqrt(v / static_cast<double>(x.size()));
}

// Builds the regression problem; output noise (when snr is set) uses `seed`.
Problem build_problem(const ScenarioConfig& cfg, std::uint64_t seed)
{
    const auto& id = cfg.ident;
    const auto plant = PlantModel::make(id.plant.numerator, id.plant.denominator, id.plant.delay);
    PrbsGenerator prbs(id.prbs_register_length, PrbsGenerator::kAllOnes, id.prbs_amplitude);
    const auto u = prbs.take(cfg.horizon);
    auto y = simulate_plant(plant, u);

    if (cfg.noise_snr_db) {
        const double sd = population_std(y) / std::pow(10.0, *cfg.noise_snr_db / 20.0);
        const auto noise = generate(SignalSpec{GaussianNoiseSource{sd}, 1.0, y.size(), seed});
        for (std::size_t t = 0; t < y.size(); ++t) y[t] += noise[t];
    }

    Problem p;
    if (cfg.scenario == Scenario::ident_fir) {
        const std::size_t n = cfg.filter_length;
        p.regressors.assign(u.size(), std::vector<double>(n, 0.0));
        for (std::size_t t = 0; t < u.size(); ++t)
            for (std::size_t k = 0; k < n && k <= t; ++k) p.regressors[t][k] = u[t - k];
        p.reference = plant.impulse_response(n);
    } else {
        p.regressors = equation_error_regressors(plant, u, y);
        p.reference = equation_error_parameters(plant);
    }
    p.desired = std::move(y);
    return p;
}

std::optional<std::size_t> time_below_fraction(const MetricSeries& s, double fraction)
{
    if (s.size() == 0) return std::nullopt;
    return first_at_or_below(s.d_squared, fraction * s.d_squared.front());
}

double or_nan(const std::optional<std::size_t>& v)
{
    return v ? static_cast<double>(*v) : std::numeric_limits<double>::quiet_NaN();
}

} // namespace

ScenarioResult run_identification(const ScenarioConfig& cfg)
{
    if (cfg.scenario != Scenario::ident_iir && cfg.scenario != Scenario::ident_fir)
        throw ConfigError("run_identification needs an ident_iir or ident_fir config");
    cfg.validate();

    const auto p = build_problem(cfg, derive_seed(cfg.rng_seed, 0));
    FilterRunOptions opt;
    opt.prior_mode = cfg.prior_mode;
    opt.reference_weights = p.reference;

    ScenarioResult res;
    opt.final_weights = &res.final_weights;
    res.series = run_regression(p.regressors, p.desired, cfg.algorithm, cfg.dag, opt);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto& s = res.series;
    const bool any = s.size() > 0;
    res.summary = {
        {"j_d", any ? s.j_d.back() : nan},
        {"j_eps", any ? s.j_eps.back() : nan},
        {"initial_d_squared", any ? s.d_squared.front() : nan},
        {"terminal_d_squared", any ? s.d_squared.back() : nan},
        {"terminal_abs_e_posterior", any ? std::abs(s.e_posterior.back()) : nan},
        {"time_to_tenth_d_squared", or_nan(time_below_fraction(s, 0.1))},
    };
    return res;
}

ScenarioResult run_identification_stochastic(const ScenarioConfig& cfg)
{
    if (cfg.scenario != Scenario::ident_stochastic)
        throw ConfigError("run_identification_stochastic needs an ident_stochastic config");
    cfg.validate();

    const auto w = equation_error_parameters(cfg.ident.plant);
    const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    if (norm == 0.0) throw ConfigError("plant parameters are all zero; cannot place the initial estimate");
    // Offset along -w so that ||w - w0||^2 equals the requested D^2(0).
    std::vector<double> w0(w.size());
    const double k = std::sqrt(cfg.ident.initial_distance_sq) / norm;
    for (std::size_t i = 0; i < w.size(); ++i) w0[i] = w[i] - k * w[i];

    struct Run {
        MetricSeries series;
        std::vector<double> weights;
    };
    ScenarioConfig base = cfg;
    base.scenario = Scenario::ident_iir;
    const auto runs = detail::run_indexed<Run>(cfg.monte_carlo_runs, cfg.parallel, [&](std::size_t r) {
        const auto p = build_problem(base, derive_seed(cfg.rng_seed, r));
        FilterRunOptions opt;
        opt.prior_mode = cfg.prior_mode;
        opt.reference_weights = p.reference;
        opt.initial_weights = w0;
        Run out;
        opt.final_weights = &out.weights;
        out.series = run_regression(p.regressors, p.desired, cfg.algorithm, cfg.dag, opt);
        return out;
    });

    std::vector<MetricSeries> series;
    for (const auto& r : runs) series.push_back(r.series);
    ScenarioResult res;
    res.series = average_runs(series);
    res.final_weights = runs.front().weights;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto& s = res.series;
    const auto at = [&](double frac) {
        if (s.size() == 0) return nan;
        const auto idx = static_cast<std::size_t>(frac * static_cast<double>(s.size()));
        return s.d_squared[std::min(idx, s.size() - 1)];
    };
    res.summary = {
        {"initial_d_squared", s.size() ? s.d_squared.front() : nan},
        {"d_squared_25pct", at(0.25)},
        {"d_squared_50pct", at(0.50)},
        {"d_squared_75pct", at(0.75)},
        {"terminal_d_squared", s.size() ? s.d_squared.back() : nan},
        {"j_d", s.size() ? s.j_d.back() : nan},
        {"runs", static_cast<double>(cfg.monte_carlo_runs)},
    };
    return res;
}

} // namespace daglms
