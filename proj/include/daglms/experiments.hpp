#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "daglms/adaptive_filter.hpp"
#include "daglms/metric_series.hpp"
#include "daglms/signal.hpp"

namespace daglms {

enum class Scenario { ale, ident_iir, ident_fir, ident_stochastic, anc_synthetic };

const char* to_string(Scenario s);
/// Throws ConfigError for unknown names.
Scenario scenario_from_string(const std::string& name);

struct AleSettings {
    double sample_rate = 8000.0;
    std::vector<double> sine_frequencies_hz{80.0, 125.0, 230.0, 400.0};
    double sine_amplitude = 0.45;
    bool random_phases = true;
    double wideband_std = 0.003;
    double wideband_pole = 0.9;
    std::optional<std::filesystem::path> wideband_file; ///< replaces the synthetic wideband source
    double mse_threshold_db = -40.0;
    std::size_t mse_sum_samples = 3200;
};

struct IdentSettings {
    int prbs_register_length = 8;
    double prbs_amplitude = 1.0;
    PlantModel plant = PlantModel{{1.0, 0.5}, {-1.5, 0.7}, 2};
    double initial_distance_sq = 4.0; ///< stochastic scenario only
};

struct PathModel {
    std::vector<double> numerator; ///< B*, so the path is q^-(delay+1) B* / A
    std::vector<double> denominator;
    std::size_t delay = 0;

    PlantModel plant() const;
};

struct AncSettings {
    double sample_rate = 2500.0;
    PathModel secondary; ///< G
    PathModel reverse;   ///< M
    PathModel primary;   ///< D
    double band_lo_hz = 70.0;
    double band_hi_hz = 170.0;
    double band_std = 0.5;
    std::size_t band_taps = 257;
    std::vector<double> tone_frequencies_hz{100.0, 140.0};
    double tone_amplitude = 0.3;
    double window_seconds = 3.0;
    double sensor_noise_std = 0.01; ///< white noise on the residual measurement

    static AncSettings defaults();
};

struct ScenarioConfig {
    Scenario scenario = Scenario::ale;
    StepSizeRule algorithm = StepSizeRule::nlms(0.02);
    DagCoefficients dag;
    std::size_t filter_length = 100;
    std::size_t delay = 100;
    std::size_t horizon = 6000;
    std::optional<double> noise_snr_db;
    std::size_t monte_carlo_runs = 1;
    std::uint64_t rng_seed = 1;
    PriorMode prior_mode = PriorMode::exact;
    std::size_t parallel = 1; ///< worker threads; results do not depend on it

    AleSettings ale;
    IdentSettings ident;
    AncSettings anc = AncSettings::defaults();

    /// Throws ConfigError on violated invariants.
    void validate() const;
};

/// Defaults for each scenario (filter length, horizon, rule and so on).
ScenarioConfig default_config(Scenario s);

/// Parses a config document. Missing keys keep the scenario defaults; unknown
/// keys and type mismatches are ConfigErrors.
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ScenarioConfig& c);

struct ScenarioResult {
    MetricSeries series;
    /// Scalar indicators in a fixed order (NaN when undefined).
    std::vector<std::pair<std::string, double>> summary;
    std::vector<double> final_weights; ///< from run 0

    std::optional<double> get(const std::string& key) const;
};

ScenarioResult run_ale(const ScenarioConfig& config);
ScenarioResult run_identification(const ScenarioConfig& config);
ScenarioResult run_identification_stochastic(const ScenarioConfig& config);
ScenarioResult run_anc_synthetic(const ScenarioConfig& config);
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Rows [y(t-1)..y(t-nA), u(t-d)..u(t-d-m)] of the equation-error predictor.
std::vector<std::vector<double>> equation_error_regressors(const PlantModel& plant, std::span<const double> u,
                                                           std::span<const double> y);
/// [-a_1..-a_nA, b_0..b_m], the true parameters for equation_error_regressors.
std::vector<double> equation_error_parameters(const PlantModel& plant);

/// Variance ratio (dB) of `reference` over `residual` on a trailing window;
/// NaN until the window fills or when either variance is zero.
std::vector<double> windowed_attenuation_db(std::span<const double> reference, std::span<const double> residual,
                                            std::size_t window);

/// First t with attenuation >= fraction * terminal (terminal = last finite value).
std::optional<std::size_t> time_to_fraction_of_terminal(std::span<const double> attenuation_db, double fraction);

/// CSV with a header row: t, e_prior, e_posterior, mse_db, d_squared, j_eps, j_d, attenuation_db.
/// Written to a temporary file and renamed into place.
void export_metrics(const MetricSeries& series, const std::filesystem::path& path);

/// Writes `content` to path atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// "%.17g"; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

} // namespace daglms
