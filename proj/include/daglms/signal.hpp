#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace daglms {

// ---------------------------------------------------------------------------
// Seeds

/// Deterministic child seed for stream `index` of `seed` (splitmix64 mix).
/// Monte Carlo runs use derive_seed(rng_seed, run_index) so every run's
/// stream depends only on those two numbers.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// PRBS

/// Maximal-length shift register sequence generator.
///
/// Fibonacci form: the output is the last stage; the new first stage is the
/// XOR of the tapped stages. Feedback taps follow the classic identification
/// table (e.g. N=8 uses stages 2, 3, 4 and 8). Register lengths 2..11 are
/// supported; the period is 2^N - 1.
class PrbsGenerator {
public:
    static constexpr int kMinRegisterLength = 2;
    static constexpr int kMaxRegisterLength = 11;

    /// `seed` is the initial register content, bit i = stage i+1, masked to
    /// the register length. An all-zero register is absorbing and rejected
    /// with ConfigError.
    explicit PrbsGenerator(int register_length, std::uint32_t seed = kAllOnes, double amplitude = 1.0);

    static constexpr std::uint32_t kAllOnes = 0xFFFFFFFFu;

    double next();
    std::vector<double> take(std::size_t n);

    int register_length() const noexcept { return length_; }
    std::size_t period() const noexcept { return (std::size_t{1} << length_) - 1; }
    std::uint32_t state() const noexcept { return state_; }
    double amplitude() const noexcept { return amplitude_; }

    /// Tapped stages (1-based) for a register length; throws ConfigError when unsupported.
    static std::vector<int> feedback_taps(int register_length);

private:
    int length_;
    std::uint32_t state_;
    std::uint32_t tap_mask_;
    double amplitude_;
};

// ---------------------------------------------------------------------------
// Plants

/// Rational transfer operator q^-d B(q^-1) / A(q^-1).
///
///   y(t) = -sum_{i>=1} a_i y(t-i) + sum_{j>=0} b_j u(t-d-j)
///
/// `numerator` holds b_0..b_m and `denominator` holds a_1..a_n (monic leading
/// one implied). Example: (q^-2 + 0.5 q^-3) / (1 - 1.5 q^-1 + 0.7 q^-2) is
/// numerator {1, 0.5}, denominator {-1.5, 0.7}, delay 2.
struct PlantModel {
    std::vector<double> numerator;
    std::vector<double> denominator;
    std::size_t delay = 0;

    /// Validates and returns the model. Throws ConfigError for an empty
    /// numerator or, when `require_stable`, for poles on/outside the unit circle.
    static PlantModel make(std::vector<double> numerator, std::vector<double> denominator,
                           std::size_t delay, bool require_stable = true);

    static PlantModel identity() { return PlantModel{{1.0}, {}, 0}; }

    /// max(n_A, deg B + d).
    std::size_t order() const;
    bool is_stable() const;

    /// 1 + a_1 q^-1 + ... as a full polynomial.
    std::vector<double> denominator_poly() const;
    /// q^-d B(q^-1) as a full polynomial.
    std::vector<double> numerator_poly() const;

    /// First n samples of the impulse response.
    std::vector<double> impulse_response(std::size_t n) const;
};

/// Streaming form of a PlantModel with zero initial conditions.
class PlantSimulator {
public:
    explicit PlantSimulator(PlantModel model);

    double step(double u);
    void reset();
    const PlantModel& model() const noexcept { return model_; }

private:
    PlantModel model_;
    std::vector<double> u_hist_; // u(t), u(t-1), ... newest first
    std::vector<double> y_hist_; // y(t-1), y(t-2), ...
};

std::vector<double> simulate_plant(const PlantModel& model, std::span<const double> input);

/// Direct-form FIR filter on a whole sequence, zero initial state.
std::vector<double> fir_filter(std::span<const double> taps, std::span<const double> input);

/// Windowed-sinc (Hamming) band-pass FIR design; `num_taps` odd.
std::vector<double> design_bandpass(double f_lo_hz, double f_hi_hz, double sample_rate, std::size_t num_taps);

// ---------------------------------------------------------------------------
// Signal specifications

struct SignalSpec;

struct PrbsSource {
    int register_length = 8;
    std::uint32_t seed = PrbsGenerator::kAllOnes;
    double amplitude = 1.0;
};

struct MultisineSource {
    std::vector<double> frequencies_hz;
    std::vector<double> amplitudes; ///< one per frequency, or a single shared value
    std::vector<double> phases_rad; ///< empty means zero phase
};

struct GaussianNoiseSource {
    double std_dev = 1.0;
};

/// White Gaussian noise through 1/(1 - pole q^-1), rescaled to `std_dev`.
struct ColoredNoiseSource {
    double std_dev = 1.0;
    double pole = 0.9;
};

/// White Gaussian noise through a band-pass FIR, rescaled to `std_dev`.
struct BandlimitedNoiseSource {
    double std_dev = 1.0;
    double f_lo_hz = 70.0;
    double f_hi_hz = 170.0;
    std::size_t num_taps = 257;
};

/// Mono 16-bit PCM WAV; the first `length` samples are used.
struct FileSource {
    std::filesystem::path path;
};

struct SumSource {
    std::vector<SignalSpec> parts;
};

using SignalSource = std::variant<PrbsSource, MultisineSource, GaussianNoiseSource, ColoredNoiseSource,
                                  BandlimitedNoiseSource, FileSource, SumSource>;

struct SignalSpec {
    SignalSource source;
    double sample_rate = 8000.0;
    std::size_t length = 0;
    std::uint64_t seed = 1;
};

/// Renders a spec. Deterministic in (spec, seed); sum parts get seeds derived
/// from the parent seed and their index. Throws ConfigError for invalid specs
/// and IngestionError for missing or short files.
std::vector<double> generate(const SignalSpec& spec);

// ---------------------------------------------------------------------------
// WAV ingestion

struct WavData {
    std::vector<double> samples;
    double sample_rate = 0.0;
};

/// Reads RIFF/WAVE, mono, 16-bit little-endian PCM. Samples scaled by 1/32768.
WavData read_pcm_wav(const std::filesystem::path& path);

/// Writes mono 16-bit PCM, clipping to [-1, 1).
void write_pcm_wav(const std::filesystem::path& path, std::span<const double> samples, double sample_rate);

} // namespace daglms
