#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "daglms/errors.hpp"
#include "daglms/signal.hpp"
#include "doctest.h"

using namespace daglms;

namespace {

// Counts steps until the register state revisits the start state.
std::size_t cycle_length(int n)
{
    PrbsGenerator g(n);
    const auto start = g.state();
    std::set<std::uint32_t> seen{start};
    for (std::size_t k = 1;; ++k) {
        g.next();
        if (g.state() == start) return k;
        REQUIRE(seen.insert(g.state()).second);
    }
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("daglms_test_" + name);
}

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& b)
{
    std::ofstream os(p, std::ios::binary);
    os.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

void put16(std::vector<std::uint8_t>& b, std::uint16_t v)
{
    b.push_back(v & 0xFF);
    b.push_back(v >> 8);
}
void put32(std::vector<std::uint8_t>& b, std::uint32_t v)
{
    for (int k = 0; k < 4; ++k) b.push_back((v >> (8 * k)) & 0xFF);
}

std::vector<std::uint8_t> wav_header(std::uint16_t channels, std::uint16_t bits, std::uint32_t data_bytes)
{
    std::vector<std::uint8_t> b{'R', 'I', 'F', 'F'};
    put32(b, 36 + data_bytes);
    for (char c : std::string("WAVEfmt ")) b.push_back(static_cast<std::uint8_t>(c));
    put32(b, 16);
    put16(b, 1);
    put16(b, channels);
    put32(b, 8000);
    put32(b, 8000u * channels * bits / 8);
    put16(b, static_cast<std::uint16_t>(channels * bits / 8));
    put16(b, bits);
    for (char c : std::string("data")) b.push_back(static_cast<std::uint8_t>(c));
    put32(b, data_bytes);
    return b;
}

double dft_magnitude(const std::vector<double>& x, double f, double fs)
{
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t)
        acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(t) / fs);
    return std::abs(acc) * 2.0 / static_cast<double>(x.size());
}

} // namespace

TEST_SUITE("signal")
{
    TEST_CASE("register cycles are maximal for every supported length")
    {
        CHECK(PrbsGenerator(8).period() == 255);
        CHECK(PrbsGenerator(11).period() == 2047);
        for (int n = PrbsGenerator::kMinRegisterLength; n <= PrbsGenerator::kMaxRegisterLength; ++n) {
            CAPTURE(n);
            CHECK(cycle_length(n) == (std::size_t{1} << n) - 1);
        }
    }

    TEST_CASE("one period is balanced and has two-valued autocorrelation")
    {
        PrbsGenerator g(8);
        const auto x = g.take(255);
        int plus = 0;
        for (double v : x) {
            CHECK(std::abs(v) == 1.0);
            plus += v > 0;
        }
        CHECK((plus == 128 || plus == 127));
        for (std::size_t lag = 1; lag < 255; ++lag) {
            double r = 0.0;
            for (std::size_t t = 0; t < 255; ++t) r += x[t] * x[(t + lag) % 255];
            CHECK(r == doctest::Approx(-1.0));
        }
        // The sequence repeats after one period.
        const auto y = g.take(255);
        CHECK(x == y);
    }

    TEST_CASE("zero register and unsupported lengths are rejected")
    {
        CHECK_THROWS_AS(PrbsGenerator(8, 0u), ConfigError);
        CHECK_THROWS_AS(PrbsGenerator(8, 0x100u), ConfigError); // masked to zero
        CHECK_THROWS_AS(PrbsGenerator(1), ConfigError);
        CHECK_THROWS_AS(PrbsGenerator(12), ConfigError);
        CHECK_NOTHROW(PrbsGenerator(8, 1u));
    }

    TEST_CASE("plant impulse response follows the hand recursion")
    {
        const PlantModel p{{1.0, 0.5}, {-1.5, 0.7}, 2};
        const auto h = p.impulse_response(40);
        CHECK(h[0] == 0.0);
        CHECK(h[1] == 0.0);
        CHECK(h[2] == 1.0);
        CHECK(h[3] == doctest::Approx(2.0));
        // y(t) = 1.5 y(t-1) - 0.7 y(t-2) + u(t-2) + 0.5 u(t-3)
        std::vector<double> ref(40, 0.0);
        for (std::size_t t = 0; t < 40; ++t) {
            const auto u = [](std::ptrdiff_t k) { return k == 0 ? 1.0 : 0.0; };
            const auto y = [&](std::ptrdiff_t k) { return k >= 0 ? ref[static_cast<std::size_t>(k)] : 0.0; };
            const auto s = static_cast<std::ptrdiff_t>(t);
            ref[t] = 1.5 * y(s - 1) - 0.7 * y(s - 2) + u(s - 2) + 0.5 * u(s - 3);
        }
        for (std::size_t t = 0; t < 40; ++t) CHECK(h[t] == doctest::Approx(ref[t]).epsilon(1e-12));
        CHECK(p.order() == 3);
        CHECK(p.is_stable());
    }

    TEST_CASE("identity plant passes the input through and plants are linear")
    {
        const auto x = generate(SignalSpec{GaussianNoiseSource{1.0}, 8000.0, 200, 3});
        CHECK(simulate_plant(PlantModel::identity(), x) == x);

        const PlantModel p{{1.0, 0.5}, {-1.5, 0.7}, 2};
        const auto y = generate(SignalSpec{GaussianNoiseSource{1.0}, 8000.0, 200, 4});
        std::vector<double> mix(200);
        for (std::size_t t = 0; t < 200; ++t) mix[t] = 2.0 * x[t] - 3.0 * y[t];
        const auto a = simulate_plant(p, x), b = simulate_plant(p, y), c = simulate_plant(p, mix);
        for (std::size_t t = 0; t < 200; ++t) CHECK(c[t] == doctest::Approx(2.0 * a[t] - 3.0 * b[t]).epsilon(1e-9));
    }

    TEST_CASE("plant validation")
    {
        CHECK_THROWS_AS(PlantModel::make({}, {}, 0), ConfigError);
        CHECK_THROWS_AS(PlantModel::make({1.0}, {-2.0}, 0), ConfigError);
        CHECK_NOTHROW(PlantModel::make({1.0}, {-2.0}, 0, false));
    }

    TEST_CASE("multisine puts its energy on the requested lines")
    {
        const std::vector<double> f{80, 125, 230, 400};
        const auto x = generate(SignalSpec{MultisineSource{f, {0.1}, {}}, 8000.0, 8000, 1});
        for (double fk : f) CHECK(dft_magnitude(x, fk, 8000.0) == doctest::Approx(0.1).epsilon(1e-9));
        for (double fk : {50.0, 100.0, 300.0, 1000.0}) CHECK(dft_magnitude(x, fk, 8000.0) < 1e-9);
    }

    TEST_CASE("noise sources: zero std, colored scaling, sums, determinism")
    {
        const auto z = generate(SignalSpec{GaussianNoiseSource{0.0}, 8000.0, 100, 5});
        for (double v : z) CHECK(v == 0.0);

        const auto c = generate(SignalSpec{ColoredNoiseSource{0.5, 0.9}, 8000.0, 5000, 5});
        double m = 0, q = 0;
        for (double v : c) m += v;
        m /= 5000;
        for (double v : c) q += (v - m) * (v - m);
        CHECK(std::sqrt(q / 5000) == doctest::Approx(0.5).epsilon(1e-9));

        const SignalSpec sine{MultisineSource{{100.0}, {0.3}, {}}, 8000.0, 300, 9};
        const SignalSpec noise{GaussianNoiseSource{1.0}, 8000.0, 300, 9};
        const auto sum = generate(SignalSpec{SumSource{{sine, noise}}, 8000.0, 300, 9});
        auto s0 = sine;
        s0.seed = derive_seed(9, 0);
        auto s1 = noise;
        s1.seed = derive_seed(9, 1);
        const auto a = generate(s0), b = generate(s1);
        for (std::size_t t = 0; t < 300; ++t) CHECK(sum[t] == a[t] + b[t]);

        CHECK(generate(noise) == generate(noise));
        auto other = noise;
        other.seed = 10;
        CHECK(generate(noise) != generate(other));
    }

    TEST_CASE("band-pass design passes the band and stops DC")
    {
        const auto h = design_bandpass(70.0, 170.0, 2500.0, 257);
        REQUIRE(h.size() == 257);
        const auto gain = [&](double f) {
            std::complex<double> acc = 0.0;
            for (std::size_t k = 0; k < h.size(); ++k)
                acc += h[k] * std::polar(1.0, -2.0 * std::numbers::pi * f / 2500.0 * static_cast<double>(k));
            return std::abs(acc);
        };
        CHECK(gain(120.0) == doctest::Approx(1.0).epsilon(0.02));
        CHECK(gain(0.0) < 0.01);
        CHECK(gain(600.0) < 0.01);
        CHECK_THROWS_AS(design_bandpass(70.0, 170.0, 2500.0, 256), ConfigError);
    }

    TEST_CASE("wav round trip and rejection of unsupported files")
    {
        const auto p = temp_path("roundtrip.wav");
        const std::vector<double> x{0.0, 0.5, -0.5, 0.25, -1.0};
        write_pcm_wav(p, x, 8000.0);
        const auto w = read_pcm_wav(p);
        CHECK(w.sample_rate == 8000.0);
        REQUIRE(w.samples.size() == x.size());
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(w.samples[k] == doctest::Approx(x[k]).epsilon(1e-4));

        const auto stereo = temp_path("stereo.wav");
        auto b = wav_header(2, 16, 8);
        b.resize(b.size() + 8, 0);
        write_bytes(stereo, b);
        CHECK_THROWS_AS(read_pcm_wav(stereo), IngestionError);

        const auto eight = temp_path("eight.wav");
        b = wav_header(1, 8, 4);
        b.resize(b.size() + 4, 0);
        write_bytes(eight, b);
        CHECK_THROWS_AS(read_pcm_wav(eight), IngestionError);

        const auto junk = temp_path("junk.wav");
        write_bytes(junk, {'R', 'I', 'F', 'X', 0, 0});
        CHECK_THROWS_AS(read_pcm_wav(junk), IngestionError);

        CHECK_THROWS_AS(generate(SignalSpec{FileSource{temp_path("missing.wav")}, 8000.0, 10, 1}), IngestionError);
        CHECK_THROWS_AS(generate(SignalSpec{FileSource{p}, 8000.0, 100, 1}), IngestionError); // too short
        CHECK(generate(SignalSpec{FileSource{p}, 8000.0, 3, 1}).size() == 3);
        for (const auto& f : {p, stereo, eight, junk}) std::filesystem::remove(f);
    }
}
