#include <cmath>
#include <fstream>
#include <set>

#include "daglms/errors.hpp"
#include "daglms/experiments.hpp"
#include "daglms/polynomial.hpp"

namespace daglms {

using nlohmann::json;

const char* to_string(Scenario s)
{
    switch (s) {
    case Scenario::ale: return "ale";
    case Scenario::ident_iir: return "ident_iir";
    case Scenario::ident_fir: return "ident_fir";
    case Scenario::ident_stochastic: return "ident_stochastic";
    case Scenario::anc_synthetic: return "anc_synthetic";
    }
    return "?";
}

Scenario scenario_from_string(const std::string& name)
{
    for (auto s : {Scenario::ale, Scenario::ident_iir, Scenario::ident_fir, Scenario::ident_stochastic,
                   Scenario::anc_synthetic})
        if (name == to_string(s)) return s;
    throw ConfigError("unknown scenario '" + name + "'");
}

PlantModel PathModel::plant() const
{
    return PlantModel{numerator, denominator, delay + 1};
}

namespace {

// Two resonant sections, numerator scaled to the requested DC gain.
PathModel resonant_path(double fs, double f1, double r1, double f2, double r2, std::vector<double> bstar,
                        std::size_t delay, double dc_gain)
{
    constexpr double two_pi = 6.283185307179586;
    const auto section = [&](double f, double r) {
        return Poly{1.0, -2.0 * r * std::cos(two_pi * f / fs), r * r};
    };
    const Poly a = poly_multiply(section(f1, r1), section(f2, r2));
    double asum = 0.0;
    for (double v : a) asum += v;
    double bsum = 0.0;
    for (double v : bstar) bsum += v;
    for (auto& v : bstar) v *= dc_gain * asum / bsum;
    return PathModel{std::move(bstar), Poly(a.begin() + 1, a.end()), delay};
}

} // namespace

AncSettings AncSettings::defaults()
{
    AncSettings s;
    s.secondary = resonant_path(s.sample_rate, 150.0, 0.9, 400.0, 0.85, {1.0, 0.6}, 2, 1.0);
    s.reverse = resonant_path(s.sample_rate, 120.0, 0.88, 350.0, 0.8, {1.0, 0.5}, 2, 0.3);
    s.primary = resonant_path(s.sample_rate, 130.0, 0.9, 500.0, 0.85, {1.0, 0.4}, 3, 1.0);
    return s;
}

ScenarioConfig default_config(Scenario s)
{
    ScenarioConfig c;
    c.scenario = s;
    switch (s) {
    case Scenario::ale:
        c.algorithm = StepSizeRule::nlms(0.02);
        c.filter_length = 100;
        c.delay = 100;
        c.horizon = 6000;
        c.monte_carlo_runs = 50;
        break;
    case Scenario::ident_iir:
        c.algorithm = StepSizeRule::plms(0.02);
        c.filter_length = 4;
        c.delay = 0;
        c.horizon = 255;
        break;
    case Scenario::ident_fir:
        c.algorithm = StepSizeRule::plms(0.02);
        c.filter_length = 30;
        c.delay = 0;
        c.horizon = 255;
        break;
    case Scenario::ident_stochastic:
        c.algorithm = StepSizeRule::plms(0.01);
        c.filter_length = 4;
        c.delay = 0;
        c.horizon = 512;
        c.noise_snr_db = 33.0;
        c.monte_carlo_runs = 100;
        c.ident.prbs_register_length = 11;
        break;
    case Scenario::anc_synthetic:
        c.algorithm = StepSizeRule::nlms(0.002);
        c.filter_length = 60;
        c.delay = 0;
        c.horizon = 150000;
        break;
    }
    return c;
}

void ScenarioConfig::validate() const
{
    algorithm.validate();
    if (filter_length < 1) throw ConfigError("filter_length must be >= 1");
    if (monte_carlo_runs < 1) throw ConfigError("monte_carlo_runs must be >= 1");
    if (parallel < 1) throw ConfigError("parallel must be >= 1");
    for (double v : dag.c)
        if (!std::isfinite(v)) throw ConfigError("dag.c has a non-finite coefficient");
    for (double v : dag.d_prime)
        if (!std::isfinite(v)) throw ConfigError("dag.d_prime has a non-finite coefficient");
    if (noise_snr_db && !std::isfinite(*noise_snr_db)) throw ConfigError("noise_snr_db must be finite");

    switch (scenario) {
    case Scenario::ale:
        if (!(ale.sample_rate > 0.0)) throw ConfigError("ale.sample_rate must be > 0");
        for (double f : ale.sine_frequencies_hz)
            if (!(f >= 0.0 && f < ale.sample_rate / 2))
                throw ConfigError("ale.sine_frequencies_hz must lie below sample_rate/2");
        if (!(ale.sine_amplitude >= 0.0) || !(ale.wideband_std >= 0.0))
            throw ConfigError("ale amplitudes must be >= 0");
        break;
    case Scenario::ident_iir:
    case Scenario::ident_stochastic: {
        const std::size_t n = ident.plant.denominator.size() + ident.plant.numerator.size();
        if (filter_length != n)
            throw ConfigError("filter_length must equal the plant parameter count (" + std::to_string(n) + ")");
        if (scenario == Scenario::ident_stochastic && !noise_snr_db)
            throw ConfigError("ident_stochastic requires noise_snr_db");
        if (scenario == Scenario::ident_stochastic && !(ident.initial_distance_sq >= 0.0))
            throw ConfigError("ident.initial_distance_sq must be >= 0");
    }
        [[fallthrough]];
    case Scenario::ident_fir:
        PrbsGenerator::feedback_taps(ident.prbs_register_length);
        (void)PlantModel::make(ident.plant.numerator, ident.plant.denominator, ident.plant.delay);
        break;
    case Scenario::anc_synthetic:
        if (!(anc.sample_rate > 0.0)) throw ConfigError("anc.sample_rate must be > 0");
        if (!(anc.window_seconds > 0.0)) throw ConfigError("anc.window_seconds must be > 0");
        if (!(anc.sensor_noise_std >= 0.0)) throw ConfigError("anc.sensor_noise_std must be >= 0");
        for (const auto* p : {&anc.secondary, &anc.reverse, &anc.primary})
            (void)PlantModel::make(p->numerator, p->denominator, p->delay + 1);
        if (!is_stable(anc.reverse.plant().denominator_poly()))
            throw ConfigError("reverse path A_M must have all roots inside the unit circle");
        for (double f : anc.tone_frequencies_hz)
            if (!(f >= 0.0 && f < anc.sample_rate / 2))
                throw ConfigError("anc.tone_frequencies_hz must lie below sample_rate/2");
        break;
    }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

void read_size(const json& j, const char* key, std::size_t& out, const std::string& where)
{
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ConfigError(where + "." + key + " must be a nonnegative integer");
    out = v.get<std::size_t>();
}

StepSizeRule read_rule(const json& j, StepSizeRule rule)
{
    check_keys(j, {"rule", "mu", "delta"}, "algorithm");
    std::string name = to_string(rule.kind);
    read(j, "rule", name, "algorithm");
    if (name == "lms")
        rule.kind = StepSizeRule::Kind::lms;
    else if (name == "nlms")
        rule.kind = StepSizeRule::Kind::nlms;
    else if (name == "plms")
        rule.kind = StepSizeRule::Kind::plms;
    else
        throw ConfigError("algorithm.rule must be one of lms, nlms, plms (got '" + name + "')");
    if (rule.kind == StepSizeRule::Kind::nlms && rule.delta == 0.0) rule.delta = 1e-16;
    read(j, "mu", rule.mu, "algorithm");
    read(j, "delta", rule.delta, "algorithm");
    return rule;
}

json rule_json(const StepSizeRule& r)
{
    json j{{"rule", to_string(r.kind)}, {"mu", r.mu}};
    if (r.kind == StepSizeRule::Kind::nlms) j["delta"] = r.delta;
    return j;
}

PlantModel read_plant(const json& j, PlantModel p, const std::string& where)
{
    check_keys(j, {"numerator", "denominator", "delay"}, where);
    read(j, "numerator", p.numerator, where);
    read(j, "denominator", p.denominator, where);
    read_size(j, "delay", p.delay, where);
    return p;
}

PathModel read_path(const json& j, PathModel p, const std::string& where)
{
    check_keys(j, {"numerator", "denominator", "delay"}, where);
    read(j, "numerator", p.numerator, where);
    read(j, "denominator", p.denominator, where);
    read_size(j, "delay", p.delay, where);
    return p;
}

template <class P>
json path_json(const P& p)
{
    return json{{"numerator", p.numerator}, {"denominator", p.denominator}, {"delay", p.delay}};
}

} // namespace

ScenarioConfig config_from_json(const json& j)
{
    check_keys(j,
               {"scenario", "algorithm", "dag", "filter_length", "delay", "horizon", "noise_snr_db",
                "monte_carlo_runs", "rng_seed", "prior_mode", "parallel", "ale", "ident", "anc"},
               "config");
    if (!j.contains("scenario") || !j.at("scenario").is_string()) throw ConfigError("config.scenario is required");
    ScenarioConfig c = default_config(scenario_from_string(j.at("scenario").get<std::string>()));

    if (j.contains("algorithm")) c.algorithm = read_rule(j.at("algorithm"), c.algorithm);
    if (j.contains("dag")) {
        check_keys(j.at("dag"), {"c", "d_prime"}, "dag");
        read(j.at("dag"), "c", c.dag.c, "dag");
        read(j.at("dag"), "d_prime", c.dag.d_prime, "dag");
    }
    read_size(j, "filter_length", c.filter_length, "config");
    read_size(j, "delay", c.delay, "config");
    read_size(j, "horizon", c.horizon, "config");
    if (j.contains("noise_snr_db")) {
        if (j.at("noise_snr_db").is_null())
            c.noise_snr_db.reset();
        else
            c.noise_snr_db = j.at("noise_snr_db").is_number() ? j.at("noise_snr_db").get<double>()
                                                               : throw ConfigError("noise_snr_db must be a number");
    }
    read_size(j, "monte_carlo_runs", c.monte_carlo_runs, "config");
    if (j.contains("rng_seed")) {
        const auto& v = j.at("rng_seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ConfigError("rng_seed must be a nonnegative integer");
        c.rng_seed = v.get<std::uint64_t>();
    }
    if (j.contains("prior_mode")) {
        const auto m = j.at("prior_mode").is_string() ? j.at("prior_mode").get<std::string>() : std::string();
        if (m == "exact")
            c.prior_mode = PriorMode::exact;
        else if (m == "approximate")
            c.prior_mode = PriorMode::approximate;
        else
            throw ConfigError("prior_mode must be 'exact' or 'approximate'");
    }
    read_size(j, "parallel", c.parallel, "config");

    if (j.contains("ale")) {
        const auto& a = j.at("ale");
        check_keys(a,
                   {"sample_rate", "sine_frequencies_hz", "sine_amplitude", "random_phases", "wideband_std",
                    "wideband_pole", "wideband_file", "mse_threshold_db", "mse_sum_samples"},
                   "ale");
        read(a, "sample_rate", c.ale.sample_rate, "ale");
        read(a, "sine_frequencies_hz", c.ale.sine_frequencies_hz, "ale");
        read(a, "sine_amplitude", c.ale.sine_amplitude, "ale");
        read(a, "random_phases", c.ale.random_phases, "ale");
        read(a, "wideband_std", c.ale.wideband_std, "ale");
        read(a, "wideband_pole", c.ale.wideband_pole, "ale");
        if (a.contains("wideband_file")) {
            if (a.at("wideband_file").is_null())
                c.ale.wideband_file.reset();
            else if (a.at("wideband_file").is_string())
                c.ale.wideband_file = a.at("wideband_file").get<std::string>();
            else
                throw ConfigError("ale.wideband_file must be a string or null");
        }
        read(a, "mse_threshold_db", c.ale.mse_threshold_db, "ale");
        read_size(a, "mse_sum_samples", c.ale.mse_sum_samples, "ale");
    }
    if (j.contains("ident")) {
        const auto& s = j.at("ident");
        check_keys(s, {"prbs_register_length", "prbs_amplitude", "plant", "initial_distance_sq"}, "ident");
        read(s, "prbs_register_length", c.ident.prbs_register_length, "ident");
        read(s, "prbs_amplitude", c.ident.prbs_amplitude, "ident");
        if (s.contains("plant")) c.ident.plant = read_plant(s.at("plant"), c.ident.plant, "ident.plant");
        read(s, "initial_distance_sq", c.ident.initial_distance_sq, "ident");
        if (c.scenario == Scenario::ident_iir || c.scenario == Scenario::ident_stochastic)
            if (!j.contains("filter_length"))
                c.filter_length = c.ident.plant.denominator.size() + c.ident.plant.numerator.size();
    }
    if (j.contains("anc")) {
        const auto& s = j.at("anc");
        check_keys(s,
                   {"sample_rate", "secondary", "reverse", "primary", "band_lo_hz", "band_hi_hz", "band_std",
                    "band_taps", "tone_frequencies_hz", "tone_amplitude", "window_seconds", "sensor_noise_std"},
                   "anc");
        read(s, "sample_rate", c.anc.sample_rate, "anc");
        if (s.contains("secondary")) c.anc.secondary = read_path(s.at("secondary"), c.anc.secondary, "anc.secondary");
        if (s.contains("reverse")) c.anc.reverse = read_path(s.at("reverse"), c.anc.reverse, "anc.reverse");
        if (s.contains("primary")) c.anc.primary = read_path(s.at("primary"), c.anc.primary, "anc.primary");
        read(s, "band_lo_hz", c.anc.band_lo_hz, "anc");
        read(s, "band_hi_hz", c.anc.band_hi_hz, "anc");
        read(s, "band_std", c.anc.band_std, "anc");
        read_size(s, "band_taps", c.anc.band_taps, "anc");
        read(s, "tone_frequencies_hz", c.anc.tone_frequencies_hz, "anc");
        read(s, "tone_amplitude", c.anc.tone_amplitude, "anc");
        read(s, "window_seconds", c.anc.window_seconds, "anc");
        read(s, "sensor_noise_std", c.anc.sensor_noise_std, "anc");
    }
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const ScenarioConfig& c)
{
    json j;
    j["scenario"] = to_string(c.scenario);
    j["algorithm"] = rule_json(c.algorithm);
    j["dag"] = json{{"c", c.dag.c}, {"d_prime", c.dag.d_prime}};
    j["filter_length"] = c.filter_length;
    j["delay"] = c.delay;
    j["horizon"] = c.horizon;
    j["noise_snr_db"] = c.noise_snr_db ? json(*c.noise_snr_db) : json(nullptr);
    j["monte_carlo_runs"] = c.monte_carlo_runs;
    j["rng_seed"] = c.rng_seed;
    j["prior_mode"] = c.prior_mode == PriorMode::exact ? "exact" : "approximate";
    j["parallel"] = c.parallel;
    switch (c.scenario) {
    case Scenario::ale:
        j["ale"] = json{{"sample_rate", c.ale.sample_rate},
                        {"sine_frequencies_hz", c.ale.sine_frequencies_hz},
                        {"sine_amplitude", c.ale.sine_amplitude},
                        {"random_phases", c.ale.random_phases},
                        {"wideband_std", c.ale.wideband_std},
                        {"wideband_pole", c.ale.wideband_pole},
                        {"wideband_file", c.ale.wideband_file ? json(c.ale.wideband_file->string()) : json(nullptr)},
                        {"mse_threshold_db", c.ale.mse_threshold_db},
                        {"mse_sum_samples", c.ale.mse_sum_samples}};
        break;
    case Scenario::ident_iir:
    case Scenario::ident_fir:
    case Scenario::ident_stochastic:
        j["ident"] = json{{"prbs_register_length", c.ident.prbs_register_length},
                          {"prbs_amplitude", c.ident.prbs_amplitude},
                          {"plant", path_json(c.ident.plant)},
                          {"initial_distance_sq", c.ident.initial_distance_sq}};
        break;
    case Scenario::anc_synthetic:
        j["anc"] = json{{"sample_rate", c.anc.sample_rate},
                        {"secondary", path_json(c.anc.secondary)},
                        {"reverse", path_json(c.anc.reverse)},
                        {"primary", path_json(c.anc.primary)},
                        {"band_lo_hz", c.anc.band_lo_hz},
                        {"band_hi_hz", c.anc.band_hi_hz},
                        {"band_std", c.anc.band_std},
                        {"band_taps", c.anc.band_taps},
                        {"tone_frequencies_hz", c.anc.tone_frequencies_hz},
                        {"tone_amplitude", c.anc.tone_amplitude},
                        {"window_seconds", c.anc.window_seconds},
                        {"sensor_noise_std", c.anc.sensor_noise_std}};
        break;
    }
    return j;
}

std::optional<double> ScenarioResult::get(const std::string& key) const
{
    for (const auto& [k, v] : summary)
        if (k == key) return v;
    return std::nullopt;
}

} // namespace daglms
