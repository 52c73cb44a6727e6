#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "daglms/errors.hpp"
#include "daglms/experiments.hpp"
#include "monte_carlo.hpp"

namespace daglms {

std::vector<double> windowed_attenuation_db(std::span<const double> reference, std::span<const double> residual,
                                            std::size_t window)
{
    if (reference.size() != residual.size()) throw ConfigError("attenuation inputs differ in length");
    if (window < 2) throw ConfigError("attenuation window must be >= 2 samples");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> out(reference.size(), nan);
    double s1 = 0.0, q1 = 0.0, s2 = 0.0, q2 = 0.0;
    const auto w = static_cast<double>(window);
    for (std::size_t t = 0; t < reference.size(); ++t) {
        s1 += reference[t];
        q1 += reference[t] * reference[t];
        s2 += residual[t];
        q2 += residual[t] * residual[t];
        if (t >= window) {
            const std::size_t o = t - window;
            s1 -= reference[o];
            q1 -= reference[o] * reference[o];
            s2 -= residual[o];
            q2 -= residual[o] * residual[o];
        }
        if (t + 1 < window) continue;
        const double v1 = q1 / w - (s1 / w) * (s1 / w);
        const double v2 = q2 / w - (s2 / w) * (s2 / w);
        if (v1 > 0.0 && v2 > 0.0) out[t] = 10.0 * std::log10(v1 / v2);
    }
    return out;
}

std::optional<std::size_t> time_to_fraction_of_terminal(std::span<const double> att, double fraction)
{
    double terminal = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = att.size(); k-- > 0;)
        if (std::isfinite(att[k])) {
            terminal = att[k];
            break;
        }
    if (!std::isfinite(terminal)) return std::nullopt;
    for (std::size_t t = 0; t < att.size(); ++t)
        if (std::isfinite(att[t]) && att[t] >= fraction * terminal) return t;
    return std::nullopt;
}

namespace {

std::vector<double> anc_disturbance(const AncSettings& a, std::size_t n, std::uint64_t seed)
{
    SumSource sum;
    sum.parts.push_back(SignalSpec{BandlimitedNoiseSource{a.band_std, a.band_lo_hz, a.band_hi_hz, a.band_taps}});
    if (!a.tone_frequencies_hz.empty() && a.tone_amplitude != 0.0)
        sum.parts.push_back(SignalSpec{MultisineSource{a.tone_frequencies_hz, {a.tone_amplitude}, {}}});
    if (a.band_std == 0.0) {
        // The band-pass design still validates edges; a silent disturbance skips it.
        if (sum.parts.size() == 1) return std::vector<double>(n, 0.0);
        sum.parts.erase(sum.parts.begin());
    }
    return generate(SignalSpec{sum, a.sample_rate, n, seed});
}

// A path q^-(d+1) B*/A driven by u(t-1): the model with delay d fed the
// previous input yields the current output before u(t) is known.
PlantModel one_step_ahead(const PathModel& p)
{
    return PlantModel{p.numerator, p.denominator, p.delay};
}

struct AncRun {
    MetricSeries series;
    std::vector<double> weights;
};

AncRun simulate(const ScenarioConfig& cfg, std::uint64_t seed)
{
    const auto& a = cfg.anc;
    const std::size_t n = cfg.horizon;
    const auto s = anc_disturbance(a, n, seed);
    // Residual without control as the sensor sees it.
    auto reference = simulate_plant(a.primary.plant(), s);
    if (a.sensor_noise_std > 0.0) {
        const auto noise =
            generate(SignalSpec{GaussianNoiseSource{a.sensor_noise_std}, a.sample_rate, n, derive_seed(seed, 7)});
        for (std::size_t t = 0; t < n; ++t) reference[t] += noise[t];
    }

    PlantSimulator m_path(one_step_ahead(a.reverse));
    PlantSimulator g_path(one_step_ahead(a.secondary));
    PlantSimulator g_model(a.secondary.plant()); // L = G^ for the regressor

    // v(t) = B_M u^(t) - A_M y^(t), B_M = q^-(d_M+1) B*_M.
    const auto& bm = a.reverse.numerator;
    const Poly am = a.reverse.plant().denominator_poly();
    const std::size_t u_lags = a.reverse.delay + bm.size();
    std::vector<double> u_hist(u_lags + 1, 0.0); // u^(t-1), u^(t-2), ...
    std::vector<double> y_hist(am.size(), 0.0);  // y^(t), y^(t-1), ...

    AdaptiveFilter q(cfg.filter_length, cfg.algorithm, cfg.dag, cfg.prior_mode);
    TapLine v_taps(cfg.filter_length);
    TapLine vf_taps(cfg.filter_length);

    AncRun run;
    run.series.resize(n);
    std::vector<double> residual(n);
    double u_prev = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double y_hat = s[t] + m_path.step(u_prev);
        std::copy_backward(y_hist.begin(), y_hist.end() - 1, y_hist.end());
        y_hist[0] = y_hat;
        std::copy_backward(u_hist.begin(), u_hist.end() - 1, u_hist.end());
        u_hist[0] = u_prev;

        double v = 0.0;
        for (std::size_t j = 0; j < bm.size(); ++j) v += bm[j] * u_hist[a.reverse.delay + j];
        for (std::size_t i = 0; i < am.size(); ++i) v -= am[i] * y_hist[i];
        v_taps.push(v);

        const auto w0 = q.prior_weights();
        const auto vv = v_taps.view();
        double u = 0.0;
        for (std::size_t k = 0; k < vv.size(); ++k) u += w0[k] * vv[k];

        const double nu = reference[t] + g_path.step(u_prev);
        vf_taps.push(g_model.step(v));

        UpdateRecord rec;
        try {
            rec = q.adapt(vf_taps.view(), -nu);
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string(e.what()) + " (anc)", t, e.weight_norm());
        }
        run.series.e_prior[t] = rec.e_prior;
        run.series.e_posterior[t] = rec.e_posterior;
        run.series.d_squared[t] = std::numeric_limits<double>::quiet_NaN();
        residual[t] = nu;
        u_prev = u;
    }
    const auto window = static_cast<std::size_t>(std::llround(a.window_seconds * a.sample_rate));
    // Without a disturbance there is nothing to attenuate; keep the NaN sentinel.
    const bool silent = std::all_of(s.begin(), s.end(), [](double x) { return x == 0.0; });
    if (!silent) run.series.attenuation_db = windowed_attenuation_db(reference, residual, window);
    finalize_metrics(run.series);
    run.weights.assign(q.weights().begin(), q.weights().end());
    return run;
}

} // namespace

ScenarioResult run_anc_synthetic(const ScenarioConfig& cfg)
{
    if (cfg.scenario != Scenario::anc_synthetic) throw ConfigError("run_anc_synthetic needs an anc_synthetic config");
    cfg.validate();

    const auto runs = detail::run_indexed<AncRun>(cfg.monte_carlo_runs, cfg.parallel, [&](std::size_t r) {
        return simulate(cfg, derive_seed(cfg.rng_seed, r));
    });
    std::vector<MetricSeries> series;
    for (const auto& r : runs) series.push_back(r.series);

    ScenarioResult res;
    res.series = runs.size() == 1 ? runs.front().series : average_runs(series);
    res.final_weights = runs.front().weights;

    const auto& att = res.series.attenuation_db;
    double terminal = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = att.size(); k-- > 0;)
        if (std::isfinite(att[k])) {
            terminal = att[k];
            break;
        }
    const auto t90 = time_to_fraction_of_terminal(att, 0.9);
    res.summary = {
        {"terminal_attenuation_db", terminal},
        {"time_to_90pct_attenuation", t90 ? static_cast<double>(*t90) : std::numeric_limits<double>::quiet_NaN()},
        {"runs", static_cast<double>(cfg.monte_carlo_runs)},
    };
    return res;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg)
{
    switch (cfg.scenario) {
    case Scenario::ale: return run_ale(cfg);
    case Scenario::ident_iir:
    case Scenario::ident_fir: return run_identification(cfg);
    case Scenario::ident_stochastic: return run_identification_stochastic(cfg);
    case Scenario::anc_synthetic: return run_anc_synthetic(cfg);
    }
    throw ConfigError("unknown scenario");
}

} // namespace daglms
