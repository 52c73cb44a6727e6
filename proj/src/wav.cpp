#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include "daglms/errors.hpp"
#include "daglms/signal.hpp"

namespace daglms {

namespace {

std::uint32_t le32(const unsigned char* p)
{
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p)
{
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::ostream& os, std::uint32_t v)
{
    const char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
    os.write(b, 4);
}

void put16(std::ostream& os, std::uint16_t v)
{
    const char b[2] = {char(v & 0xff), char((v >> 8) & 0xff)};
    os.write(b, 2);
}

} // namespace

WavData read_pcm_wav(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open signal file " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    const auto fail = [&](const std::string& why) {
        throw IngestionError("signal file " + path.string() + ": " + why);
    };
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        fail("not a RIFF/WAVE file");

    bool have_fmt = false;
    WavData out;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        const std::uint32_t size = le32(chunk + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size()) fail("truncated chunk");

        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16) fail("short fmt chunk");
            const unsigned char* f = bytes.data() + body;
            const auto format = le16(f);
            const auto channels = le16(f + 2);
            const auto bits = le16(f + 14);
            if (format != 1) fail("only PCM encoding is supported");
            if (channels != 1) fail("only mono files are supported");
            if (bits != 16) fail("only 16-bit samples are supported");
            out.sample_rate = static_cast<double>(le32(f + 4));
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            if (!have_fmt) fail("data chunk before fmt chunk");
            const std::size_t n = size / 2;
            out.samples.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto raw = static_cast<std::int16_t>(le16(bytes.data() + body + 2 * i));
                out.samples[i] = static_cast<double>(raw) / 32768.0;
            }
            return out;
        }
        pos = body + size + (size & 1u);
    }
    fail("no data chunk");
    return out;
}

void write_pcm_wav(const std::filesystem::path& path, std::span<const double> samples, double sample_rate)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IngestionError("cannot write " + path.string());
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    const auto rate = static_cast<std::uint32_t>(std::lround(sample_rate));
    os.write("RIFF", 4);
    put32(os, 36 + data_bytes);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    put32(os, 16);
    put16(os, 1);
    put16(os, 1);
    put32(os, rate);
    put32(os, rate * 2);
    put16(os, 2);
    put16(os, 16);
    os.write("data", 4);
    put32(os, data_bytes);
    for (double v : samples) {
        const double c = std::clamp(v, -1.0, 32767.0 / 32768.0);
        put16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32768.0))));
    }
}

} // namespace daglms
