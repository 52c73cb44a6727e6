#include "daglms/signal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "daglms/errors.hpp"
#include "daglms/polynomial.hpp"

namespace daglms {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------

std::vector<int> PrbsGenerator::feedback_taps(int register_length)
{
    switch (register_length) {
    case 2: return {1, 2};
    case 3: return {2, 3};
    case 4: return {3, 4};
    case 5: return {3, 5};
    case 6: return {5, 6};
    case 7: return {4, 7};
    case 8: return {2, 3, 4, 8};
    case 9: return {5, 9};
    case 10: return {7, 10};
    case 11: return {9, 11};
    default:
        throw ConfigError("PRBS register length " + std::to_string(register_length) +
                          " unsupported (supported: 2..11)");
    }
}

PrbsGenerator::PrbsGenerator(int register_length, std::uint32_t seed, double amplitude)
    : length_(register_length), state_(0), tap_mask_(0), amplitude_(amplitude)
{
    for (int tap : feedback_taps(register_length)) tap_mask_ |= 1u << (tap - 1);
    const std::uint32_t mask = (1u << length_) - 1u;
    state_ = seed & mask;
    if (state_ == 0) throw ConfigError("PRBS seed must be a nonzero register state");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw ConfigError("PRBS amplitude must be positive");
}

double PrbsGenerator::next()
{
    const bool out = (state_ >> (length_ - 1)) & 1u;
    const std::uint32_t feedback = std::popcount(state_ & tap_mask_) & 1u;
    state_ = ((state_ << 1) | feedback) & ((1u << length_) - 1u);
    return out ? amplitude_ : -amplitude_;
}

std::vector<double> PrbsGenerator::take(std::size_t n)
{
    std::vector<double> out(n);
    for (auto& v : out) v = next();
    return out;
}

// ---------------------------------------------------------------------------

PlantModel PlantModel::make(std::vector<double> numerator, std::vector<double> denominator,
                            std::size_t delay, bool require_stable)
{
    if (numerator.empty()) throw ConfigError("plant numerator must not be empty");
    for (double v : numerator)
        if (!std::isfinite(v)) throw ConfigError("plant numerator has a non-finite coefficient");
    for (double v : denominator)
        if (!std::isfinite(v)) throw ConfigError("plant denominator has a non-finite coefficient");
    PlantModel m{std::move(numerator), std::move(denominator), delay};
    if (require_stable && !m.is_stable())
        throw ConfigError("plant denominator has roots on or outside the unit circle");
    return m;
}

std::size_t PlantModel::order() const
{
    return std::max(denominator.size(), numerator.size() - 1 + delay);
}

bool PlantModel::is_stable() const
{
    return daglms::is_stable(denominator_poly());
}

std::vector<double> PlantModel::denominator_poly() const
{
    std::vector<double> p{1.0};
    p.insert(p.end(), denominator.begin(), denominator.end());
    return p;
}

std::vector<double> PlantModel::numerator_poly() const
{
    std::vector<double> p(delay, 0.0);
    p.insert(p.end(), numerator.begin(), numerator.end());
    return p;
}

std::vector<double> PlantModel::impulse_response(std::size_t n) const
{
    std::vector<double> u(n, 0.0);
    if (n > 0) u[0] = 1.0;
    return simulate_plant(*this, u);
}

PlantSimulator::PlantSimulator(PlantModel model)
    : model_(std::move(model)),
      u_hist_(model_.delay + model_.numerator.size(), 0.0),
      y_hist_(model_.denominator.size(), 0.0)
{
}

double PlantSimulator::step(double u)
{
    std::copy_backward(u_hist_.begin(), u_hist_.end() - 1, u_hist_.end());
    u_hist_[0] = u;

    double y = 0.0;
    for (std::size_t j = 0; j < model_.numerator.size(); ++j)
        y += model_.numerator[j] * u_hist_[model_.delay + j];
    for (std::size_t i = 0; i < model_.denominator.size(); ++i)
        y -= model_.denominator[i] * y_hist_[i];

    if (!y_hist_.empty()) {
        std::copy_backward(y_hist_.begin(), y_hist_.end() - 1, y_hist_.end());
        y_hist_[0] = y;
    }
    return y;
}

void PlantSimulator::reset()
{
    std::fill(u_hist_.begin(), u_hist_.end(), 0.0);
    std::fill(y_hist_.begin(), y_hist_.end(), 0.0);
}

std::vector<double> simulate_plant(const PlantModel& model, std::span<const double> input)
{
    PlantSimulator sim(model);
    std::vector<double> out(input.size());
    for (std::size_t t = 0; t < input.size(); ++t) out[t] = sim.step(input[t]);
    return out;
}

std::vector<double> fir_filter(std::span<const double> taps, std::span<const double> input)
{
    std::vector<double> out(input.size(), 0.0);
    for (std::size_t t = 0; t < input.size(); ++t) {
        double acc = 0.0;
        const std::size_t n = std::min(taps.size(), t + 1);
        for (std::size_t k = 0; k < n; ++k) acc += taps[k] * input[t - k];
        out[t] = acc;
    }
    return out;
}

std::vector<double> design_bandpass(double f_lo_hz, double f_hi_hz, double sample_rate, std::size_t num_taps)
{
    if (num_taps < 3 || num_taps % 2 == 0) throw ConfigError("band-pass tap count must be odd and >= 3");
    if (!(0.0 < f_lo_hz && f_lo_hz < f_hi_hz && f_hi_hz < sample_rate / 2))
        throw ConfigError("band-pass edges must satisfy 0 < f_lo < f_hi < fs/2");

    using std::numbers::pi;
    const double lo = f_lo_hz / sample_rate;
    const double hi = f_hi_hz / sample_rate;
    const auto mid = static_cast<double>(num_taps - 1) / 2.0;
    std::vector<double> h(num_taps);
    for (std::size_t n = 0; n < num_taps; ++n) {
        const double m = static_cast<double>(n) - mid;
        const double ideal = (m == 0.0) ? 2.0 * (hi - lo)
                                         : (std::sin(2 * pi * hi * m) - std::sin(2 * pi * lo * m)) / (pi * m);
        const double window = 0.54 - 0.46 * std::cos(2 * pi * static_cast<double>(n) / static_cast<double>(num_taps - 1));
        h[n] = ideal * window;
    }
    return h;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> white_noise(std::size_t n, double std_dev, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = std_dev * dist(rng);
    return out;
}

void rescale_to_std(std::vector<double>& x, double target)
{
    if (x.empty()) return;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    const double k = var > 0.0 ? target / std::sqrt(var) : 0.0;
    for (auto& v : x) v *= k;
}

struct Renderer {
    const SignalSpec& spec;

    std::vector<double> operator()(const PrbsSource& s) const
    {
        PrbsGenerator gen(s.register_length, s.seed, s.amplitude);
        return gen.take(spec.length);
    }

    std::vector<double> operator()(const MultisineSource& s) const
    {
        const std::size_t k = s.frequencies_hz.size();
        if (s.amplitudes.size() != k && s.amplitudes.size() != 1)
            throw ConfigError("multisine: amplitudes must have one entry per frequency (or a single value)");
        if (!s.phases_rad.empty() && s.phases_rad.size() != k)
            throw ConfigError("multisine: phases must have one entry per frequency");
        for (double f : s.frequencies_hz)
            if (!(f >= 0.0 && f < spec.sample_rate / 2))
                throw ConfigError("multisine: frequency " + std::to_string(f) + " Hz is not below fs/2");

        std::vector<double> out(spec.length, 0.0);
        using std::numbers::pi;
        for (std::size_t i = 0; i < k; ++i) {
            const double a = s.amplitudes.size() == 1 ? s.amplitudes[0] : s.amplitudes[i];
            const double ph = s.phases_rad.empty() ? 0.0 : s.phases_rad[i];
            const double w = 2 * pi * s.frequencies_hz[i] / spec.sample_rate;
            for (std::size_t t = 0; t < spec.length; ++t)
                out[t] += a * std::sin(w * static_cast<double>(t) + ph);
        }
        return out;
    }

    std::vector<double> operator()(const GaussianNoiseSource& s) const
    {
        if (!(s.std_dev >= 0.0)) throw ConfigError("gaussian_noise: std must be >= 0");
        if (s.std_dev == 0.0) return std::vector<double>(spec.length, 0.0);
        return white_noise(spec.length, s.std_dev, spec.seed);
    }

    std::vector<double> operator()(const ColoredNoiseSource& s) const
    {
        if (!(s.std_dev >= 0.0)) throw ConfigError("colored_noise: std must be >= 0");
        if (!(std::abs(s.pole) < 1.0)) throw ConfigError("colored_noise: |pole| must be < 1");
        if (s.std_dev == 0.0) return std::vector<double>(spec.length, 0.0);
        auto x = white_noise(spec.length, 1.0, spec.seed);
        double state = 0.0;
        for (auto& v : x) {
            state = v + s.pole * state;
            v = state;
        }
        rescale_to_std(x, s.std_dev);
        return x;
    }

    std::vector<double> operator()(const BandlimitedNoiseSource& s) const
    {
        if (!(s.std_dev >= 0.0)) throw ConfigError("bandlimited_noise: std must be >= 0");
        const auto taps = design_bandpass(s.f_lo_hz, s.f_hi_hz, spec.sample_rate, s.num_taps);
        if (s.std_dev == 0.0) return std::vector<double>(spec.length, 0.0);
        // Run the filter over a warm-up prefix so the output starts stationary.
        const std::size_t warm = taps.size();
        auto raw = white_noise(spec.length + warm, 1.0, spec.seed);
        auto filtered = fir_filter(taps, raw);
        std::vector<double> out(filtered.begin() + static_cast<std::ptrdiff_t>(warm), filtered.end());
        rescale_to_std(out, s.std_dev);
        return out;
    }

    std::vector<double> operator()(const FileSource& s) const
    {
        auto wav = read_pcm_wav(s.path);
        if (wav.samples.size() < spec.length)
            throw IngestionError("signal file " + s.path.string() + " has " + std::to_string(wav.samples.size()) +
                                 " samples, " + std::to_string(spec.length) + " required");
        wav.samples.resize(spec.length);
        return wav.samples;
    }

    std::vector<double> operator()(const SumSource& s) const
    {
        std::vector<double> out(spec.length, 0.0);
        for (std::size_t i = 0; i < s.parts.size(); ++i) {
            SignalSpec part = s.parts[i];
            part.sample_rate = spec.sample_rate;
            part.length = spec.length;
            part.seed = derive_seed(spec.seed, i);
            const auto x = generate(part);
            for (std::size_t t = 0; t < out.size(); ++t) out[t] += x[t];
        }
        return out;
    }
};

} // namespace

std::vector<double> generate(const SignalSpec& spec)
{
    if (!(spec.sample_rate > 0.0)) throw ConfigError("signal sample_rate must be positive");
    return std::visit(Renderer{spec}, spec.source);
}

} // namespace daglms
