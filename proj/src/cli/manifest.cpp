#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "daglms/cli.hpp"
#include "daglms/errors.hpp"

namespace daglms::cli {

using nlohmann::json;

json manifest_to_json(const RunManifest& m)
{
    return json{{"command", m.command},
                {"tool_version", m.tool_version},
                {"rng_seed", m.rng_seed},
                {"run_seeds", m.run_seeds},
                {"outputs", m.outputs},
                {"wall_clock_seconds", m.wall_clock_seconds},
                {"config", m.config}};
}

bool looks_like_manifest(const json& j)
{
    return j.is_object() && j.contains("tool_version") && j.contains("config");
}

RunManifest manifest_from_json(const json& j)
{
    if (!looks_like_manifest(j)) throw ConfigError("not a run manifest (missing tool_version or config)");
    RunManifest m;
    try {
        m.command = j.value("command", std::string("run"));
        m.tool_version = j.at("tool_version").get<std::string>();
        m.config = j.at("config");
        m.rng_seed = j.value("rng_seed", std::uint64_t{0});
        m.run_seeds = j.value("run_seeds", std::vector<std::uint64_t>{});
        m.outputs = j.value("outputs", std::vector<std::string>{});
        m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag)
{
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv("DAGLMS_OUT_DIR"); env && *env) return env;
    return "daglms_out";
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                                  const std::vector<PlotSeries>& series)
{
    constexpr double W = 800, H = 500, L = 70, R = 20, T = 40, B = 50;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k)
            if (std::isfinite(s.x[k]) && std::isfinite(s.y[k])) {
                x0 = std::min(x0, s.x[k]);
                x1 = std::max(x1, s.x[k]);
                y0 = std::min(y0, s.y[k]);
                y1 = std::max(y1, s.y[k]);
            }
    if (!(x0 < x1)) {
        x0 = 0;
        x1 = 1;
    }
    if (!(y0 < y1)) {
        y0 = std::isfinite(y0) ? y0 - 1 : 0;
        y1 = y0 + 2;
    }
    const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n";
    svg += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
    svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           escape(title) + "</text>\n";
    svg += "<rect x=\"70\" y=\"40\" width=\"710\" height=\"410\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0;
        const double yv = y0 + (y1 - y0) * k / 4.0;
        svg += "<text x=\"" + fmt("%.1f", px(xv)) + "\" y=\"470\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" + fmt("%.4g", xv) + "</text>\n";
        svg += "<text x=\"64\" y=\"" + fmt("%.1f", py(yv) + 4) + "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">" + fmt("%.4g", yv) + "</text>\n";
    }
    svg += "<text x=\"425\" y=\"492\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape(x_label) + "</text>\n";
    svg += "<text x=\"16\" y=\"245\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 245)\">" + escape(y_label) + "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = colors[i % 6];
        std::string d;
        bool pen = false;
        // Thin long series to about 2000 vertices.
        const std::size_t n = std::min(s.x.size(), s.y.size());
        const std::size_t stride = std::max<std::size_t>(1, n / 2000);
        for (std::size_t k = 0; k < n; k += stride) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
                pen = false;
                continue;
            }
            d += (pen ? " L" : " M") + fmt("%.2f", px(s.x[k])) + "," + fmt("%.2f", py(s.y[k]));
            pen = true;
        }
        if (!d.empty())
            svg += "<path d=\"" + d.substr(1) + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.2\"/>\n";
        svg += "<text x=\"" + fmt("%.0f", W - R - 8) + "\" y=\"" + fmt("%.0f", T + 16 + 16.0 * static_cast<double>(i)) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + color + "\">" +
               escape(s.name) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace daglms::cli
