#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "daglms/analysis.hpp"
#include "daglms/cli.hpp"
#include "daglms/dag_design.hpp"
#include "daglms/errors.hpp"
#include "daglms/experiments.hpp"
#include "daglms/signal.hpp"
#include "../experiments/monte_carlo.hpp"

namespace daglms::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::string out_dir;
    CLI::Option* out_opt = nullptr;
    std::size_t grid_size = kDefaultGridSize;
    std::size_t parallel = 1;
    CLI::Option* parallel_opt = nullptr;

    fs::path out() const { return resolve_out_dir(*out_opt ? std::optional<std::string>(out_dir) : std::nullopt); }
};

struct DagArgs {
    double c1 = 0.0, c2 = 0.0, d1p = 0.0;
    CLI::Option *c1_opt = nullptr, *c2_opt = nullptr, *d1p_opt = nullptr;
    std::string coeffs_file;
    CLI::Option* coeffs_opt = nullptr;

    void attach(CLI::App* app)
    {
        c1_opt = app->add_option("--c1", c1, "numerator coefficient c1");
        c2_opt = app->add_option("--c2", c2, "numerator coefficient c2");
        d1p_opt = app->add_option("--d1p", d1p, "denominator coefficient d'1");
        coeffs_opt = app->add_option("--coeffs", coeffs_file, "JSON file {\"c\": [...], \"d_prime\": [...]}");
    }

    DagCoefficients resolve() const
    {
        const bool any_scalar = *c1_opt || *c2_opt || *d1p_opt;
        if (*coeffs_opt && any_scalar) throw ConfigError("--coeffs cannot be combined with --c1/--c2/--d1p");
        DagCoefficients dag;
        if (*coeffs_opt) {
            std::ifstream in(coeffs_file);
            if (!in) throw ConfigError("cannot open coefficient file " + coeffs_file);
            try {
                const json j = json::parse(in);
                if (!j.is_object()) throw ConfigError("coefficient file must hold an object");
                for (const auto& [k, _] : j.items())
                    if (k != "c" && k != "d_prime") throw ConfigError("unknown key '" + k + "' in coefficient file");
                dag.c = j.value("c", std::vector<double>{});
                dag.d_prime = j.value("d_prime", std::vector<double>{});
            } catch (const json::exception& e) {
                throw ConfigError("coefficient file " + coeffs_file + ": " + e.what());
            }
        } else if (any_scalar) {
            dag = DagCoefficients::arima2(c1, c2, d1p);
        }
        for (double v : dag.c)
            if (!std::isfinite(v)) throw ConfigError("non-finite DAG coefficient");
        for (double v : dag.d_prime)
            if (!std::isfinite(v)) throw ConfigError("non-finite DAG coefficient");
        return dag;
    }
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string join(const std::vector<double>& v)
{
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += ", ";
        std::ostringstream os;
        os << std::setprecision(6) << v[k];
        s += os.str();
    }
    return s + "]";
}

std::string g6(double v)
{
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_text(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json parse_document(const fs::path& p)
{
    try {
        return json::parse(read_text(p));
    } catch (const json::parse_error& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// design

struct DesignArgs {
    DagArgs dag;
    std::string bode_path;
    CLI::Option* bode_opt = nullptr;
    std::vector<std::string> contour;
    CLI::Option* contour_opt = nullptr;
    std::size_t contour_resolution = 401;
};

double parse_d1p_spec(const std::string& s)
{
    const std::string prefix = "d1p=";
    if (s.rfind(prefix, 0) != 0) throw ConfigError("--contour expects d1p=<value>, got '" + s + "'");
    try {
        std::size_t used = 0;
        const double v = std::stod(s.substr(prefix.size()), &used);
        if (used != s.size() - prefix.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("--contour: bad d1p value in '" + s + "'");
    }
}

int cmd_design(const DesignArgs& a, const Globals& g, std::ostream& out)
{
    const auto dag = a.dag.resolve();
    const auto spr = spr_sweep_oracle(dag, g.grid_size);
    const auto paa = paa_pr_check(dag, g.grid_size);

    out << "dag           c=" << join(dag.c) << " d'=" << join(dag.d_prime) << "\n";
    out << "spr           " << yes_no(spr.is_spr) << "\n";
    out << "  criterion   " << (spr.criterion_verdict ? yes_no(*spr.criterion_verdict) : "n/a") << "\n";
    out << "  sweep       " << yes_no(spr.sweep_verdict) << " (min Re " << g6(spr.min_real_part) << " at omega "
        << g6(spr.argmin_omega) << ", roots " << (spr.roots_ok ? "ok" : "not strictly stable") << ")\n";
    out << "paa_pr        " << yes_no(paa.is_pr) << " (residue " << g6(paa.residue) << ", min Re "
        << g6(paa.min_real_part) << ")\n";
    try {
        out << "ssg           " << g6(steady_state_gain(dag)) << "\n";
    } catch (const DomainError&) {
        out << "ssg           undefined (D'(1) = 0)\n";
    }
    try {
        out << "log_gain_int  " << g6(log_gain_integral(dag)) << "\n";
    } catch (const DomainError&) {
        out << "log_gain_int  undefined (roots not strictly inside the unit circle)\n";
    }

    if (*a.bode_opt) {
        const auto fr = bode(dag, g.grid_size);
        std::string csv = "omega_rad,mag_db,phase_deg,real_part\n";
        for (std::size_t k = 0; k < fr.omega.size(); ++k)
            csv += format_number(fr.omega[k]) + "," + format_number(fr.magnitude_db[k]) + "," +
                   format_number(fr.phase_deg[k]) + "," + format_number(fr.real_part[k]) + "\n";
        write_file_atomic(a.bode_path, csv);
        out << "bode          " << a.bode_path << "\n";
    }
    if (*a.contour_opt) {
        if (a.contour.size() != 2) throw ConfigError("--contour expects d1p=<value> <out.csv>");
        const double d1p = parse_d1p_spec(a.contour[0]);
        if (!(std::abs(d1p) < 1.0)) throw ConfigError("--contour: d1p must lie in (-1, 1)");
        const auto pts = contour_trace(d1p, a.contour_resolution, std::min<std::size_t>(g.grid_size, 2048));
        std::string csv = "c1,c2,boundary_id\n";
        for (const auto& p : pts)
            csv += format_number(p.c1) + "," + format_number(p.c2) + "," +
                   std::to_string(static_cast<int>(p.boundary)) + "\n";
        write_file_atomic(a.contour[1], csv);
        out << "contour       " << a.contour[1] << " (" << pts.size() << " points)\n";
    }
    return kSuccess;
}

// ---------------------------------------------------------------------------
// transient

struct TransientArgs {
    DagArgs dag;
    double g = 0.01;
    std::size_t horizon = 3000;
    double band = kDefaultSettlingBand;
    std::string metrics_path;
    CLI::Option* metrics_opt = nullptr;
    std::string csv_path;
    CLI::Option* csv_opt = nullptr;
};

/// Reads back the d_squared column of an exported metrics CSV.
MetricSeries read_metrics_csv(const fs::path& p)
{
    std::istringstream in(read_text(p));
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(p.string() + ": empty metrics file");
    std::vector<std::string> header;
    {
        std::stringstream hs(line);
        for (std::string f; std::getline(hs, f, ',');) header.push_back(f);
    }
    const auto col = std::find(header.begin(), header.end(), "d_squared");
    if (col == header.end()) throw ConfigError(p.string() + ": no d_squared column");
    const auto idx = static_cast<std::size_t>(col - header.begin());
    std::vector<double> d2;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string f;
        for (std::size_t k = 0; k <= idx; ++k)
            if (!std::getline(ls, f, ',')) throw ConfigError(p.string() + ": short row");
        try {
            d2.push_back(f == "nan" ? std::nan("") : std::stod(f));
        } catch (const std::logic_error&) {
            throw ConfigError(p.string() + ": bad number '" + f + "'");
        }
    }
    MetricSeries s;
    s.resize(d2.size());
    s.d_squared = d2;
    return s;
}

int cmd_transient(const TransientArgs& a, const Globals& g, std::ostream& out)
{
    const auto dag = a.dag.resolve();
    if (!(a.g > 0.0)) throw ConfigError("--g must be positive");
    if (!(a.band > 0.0)) throw ConfigError("--band must be positive");

    const auto rep = sensitivity_step_response(SensitivityModel{a.g, dag}, a.horizon, a.band);
    std::vector<double> wtilde;
    if (*a.metrics_opt) {
        const auto cmp = compare_transient_prediction(dag, read_metrics_csv(a.metrics_path), a.g, a.band);
        wtilde = cmp.wtilde;
        out << "measured settling  "
            << (cmp.measured_settling ? std::to_string(*cmp.measured_settling) : std::string("not settled")) << "\n";
    } else {
        // Scalar averaged system with E = g, mu = 1: the model the prediction linearizes.
        Eigen::MatrixXd e(1, 1);
        e(0, 0) = a.g;
        const auto traj = averaged_feedback_oracle(dag, e, 1.0, Eigen::VectorXd::Ones(1), a.horizon);
        for (const auto& w : traj.state) wtilde.push_back(w(0));
    }
    out << "settling_time      "
        << (rep.settling_time ? std::to_string(*rep.settling_time) : std::string("not settled")) << "\n";
    out << "predicted_speedup  " << g6(rep.predicted_speedup) << "\n";
    out << "stable             " << yes_no(rep.stable) << " (max pole modulus " << g6(rep.max_pole_modulus) << ")\n";

    const std::size_t n = std::max(wtilde.size(), rep.step_response.size());
    const auto at = [](const std::vector<double>& v, std::size_t t) {
        return t < v.size() ? format_number(v[t]) : std::string("nan");
    };
    std::string csv = "t,wtilde,predicted_wtilde\n";
    for (std::size_t t = 0; t < n; ++t) csv += std::to_string(t) + "," + at(wtilde, t) + "," + at(rep.step_response, t) + "\n";
    const fs::path path = *a.csv_opt ? fs::path(a.csv_path) : g.out() / "transient.csv";
    write_file_atomic(path, csv);
    out << "csv                " << path.string() << "\n";
    return kSuccess;
}

// ---------------------------------------------------------------------------
// run and sweep

std::string summary_csv(const ScenarioResult& r)
{
    std::string s = "key,value\n";
    for (const auto& [k, v] : r.summary) s += k + "," + format_number(v) + "\n";
    return s;
}

PlotSeries plot_series(const std::string& name, Scenario sc, const MetricSeries& m)
{
    PlotSeries p{name, {}, {}};
    for (std::size_t t = 0; t < m.size(); ++t) {
        p.x.push_back(static_cast<double>(t));
        switch (sc) {
        case Scenario::ale: p.y.push_back(m.mse_db[t]); break;
        case Scenario::anc_synthetic: p.y.push_back(m.attenuation_db[t]); break;
        default: p.y.push_back(to_db(m.d_squared[t])); break;
        }
    }
    return p;
}

const char* plot_label(Scenario sc)
{
    switch (sc) {
    case Scenario::ale: return "MSE (dB)";
    case Scenario::anc_synthetic: return "attenuation (dB)";
    default: return "D^2 (dB)";
    }
}

ScenarioConfig apply_overrides(ScenarioConfig c, const Globals& g)
{
    if (*g.seed_opt) c.rng_seed = g.seed;
    if (*g.parallel_opt) c.parallel = g.parallel;
    c.validate();
    return c;
}

std::vector<std::uint64_t> run_seeds(const ScenarioConfig& c)
{
    std::vector<std::uint64_t> s;
    for (std::size_t r = 0; r < c.monte_carlo_runs; ++r) s.push_back(derive_seed(c.rng_seed, r));
    return s;
}

void write_manifest(const fs::path& dir, RunManifest m)
{
    m.outputs.push_back("manifest.json");
    write_file_atomic(dir / "manifest.json", manifest_to_json(m).dump(2) + "\n");
}

struct RunArgs {
    std::string input;
    bool svg = false;
};

int do_sweep(const json& doc, const Globals& g, bool svg, std::ostream& out, std::ostream& err,
             std::chrono::steady_clock::time_point t0);

int cmd_run(const RunArgs& a, const Globals& g, std::ostream& out, std::ostream& err)
{
    const auto t0 = std::chrono::steady_clock::now();
    json doc = parse_document(a.input);
    if (looks_like_manifest(doc)) {
        const auto m = manifest_from_json(doc);
        if (m.command == "sweep") return do_sweep(m.config, g, a.svg, out, err, t0);
        if (m.command != "run") throw ConfigError("manifest command '" + m.command + "' cannot be re-run");
        doc = m.config;
    }
    const auto cfg = apply_overrides(config_from_json(doc), g);
    const fs::path dir = g.out();

    ScenarioResult res;
    try {
        res = run_scenario(cfg);
    } catch (const DivergenceError& e) {
        err << "daglms: diverged at sample " << e.sample() << ": " << e.what() << "\n";
        return kDivergence;
    }

    RunManifest m;
    m.command = "run";
    m.config = config_to_json(cfg);
    m.rng_seed = cfg.rng_seed;
    m.run_seeds = run_seeds(cfg);
    export_metrics(res.series, dir / "metrics.csv");
    write_file_atomic(dir / "summary.csv", summary_csv(res));
    m.outputs = {"metrics.csv", "summary.csv"};
    if (a.svg) {
        const std::string title = std::string(to_string(cfg.scenario)) + " " + to_string(cfg.algorithm.kind);
        write_file_atomic(dir / "plot.svg", render_svg_line_chart(title, "sample", plot_label(cfg.scenario),
                                                                  {plot_series("run", cfg.scenario, res.series)}));
        m.outputs.push_back("plot.svg");
    }

    for (const auto& [k, v] : res.summary) out << std::left << std::setw(28) << k << format_number(v) << "\n";
    m.wall_clock_seconds = seconds_since(t0);
    write_manifest(dir, m);
    out << "outputs in " << dir.string() << "\n";
    return kSuccess;
}

std::string safe_name(const std::string& s)
{
    std::string o;
    for (char c : s) o += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return o.empty() ? "variant" : o;
}

struct Variant {
    std::string name;
    ScenarioConfig config;
};

struct VariantOutcome {
    std::optional<ScenarioResult> result;
    std::string failure;
};

int do_sweep(const json& doc, const Globals& g, bool svg, std::ostream& out, std::ostream& err,
             std::chrono::steady_clock::time_point t0)
{
    if (!doc.is_object()) throw ConfigError("sweep file must hold an object");
    for (const auto& [k, _] : doc.items())
        if (k != "base" && k != "variants" && k != "parallel")
            throw ConfigError("unknown key '" + k + "' in sweep file");
    if (!doc.contains("base") || !doc.contains("variants") || !doc.at("variants").is_array() ||
        doc.at("variants").empty())
        throw ConfigError("sweep file needs 'base' and a non-empty 'variants' array");

    std::size_t workers = 1;
    if (doc.contains("parallel")) {
        if (!doc.at("parallel").is_number_unsigned()) throw ConfigError("sweep.parallel must be a nonnegative integer");
        workers = doc.at("parallel").get<std::size_t>();
    }
    if (*g.parallel_opt) workers = g.parallel;

    std::vector<Variant> variants;
    for (const auto& v : doc.at("variants")) {
        if (!v.is_object()) throw ConfigError("each variant must be an object");
        for (const auto& [k, _] : v.items())
            if (k != "name" && k != "algorithm" && k != "dag")
                throw ConfigError("unknown key '" + k + "' in sweep variant");
        if (!v.contains("name") || !v.at("name").is_string()) throw ConfigError("each variant needs a name");
        json merged = doc.at("base");
        if (!merged.is_object()) throw ConfigError("sweep.base must be an object");
        if (v.contains("algorithm")) merged["algorithm"] = v.at("algorithm");
        merged["dag"] = v.contains("dag") ? v.at("dag") : json{{"c", json::array()}, {"d_prime", json::array()}};
        auto cfg = apply_overrides(config_from_json(merged), g);
        // Variants run in parallel with each other; keep each one single-threaded.
        cfg.parallel = 1;
        const auto name = v.at("name").get<std::string>();
        for (const auto& other : variants)
            if (safe_name(other.name) == safe_name(name)) throw ConfigError("duplicate variant name '" + name + "'");
        variants.push_back({name, cfg});
    }

    const auto outcomes = detail::run_indexed<VariantOutcome>(variants.size(), workers, [&](std::size_t i) {
        VariantOutcome o;
        try {
            o.result = run_scenario(variants[i].config);
        } catch (const DivergenceError& e) {
            o.failure = "diverged at sample " + std::to_string(e.sample());
        }
        return o;
    });

    const fs::path dir = g.out();
    RunManifest m;
    m.command = "sweep";
    json snapshot = doc;
    snapshot["base"] = config_to_json(variants.front().config);
    snapshot["base"].erase("dag");
    snapshot["base"].erase("algorithm");
    snapshot["base"]["parallel"] = 1;
    json vs = json::array();
    for (const auto& v : variants)
        vs.push_back(json{{"name", v.name},
                          {"algorithm", config_to_json(v.config)["algorithm"]},
                          {"dag", config_to_json(v.config)["dag"]}});
    snapshot["variants"] = vs;
    snapshot.erase("parallel");
    m.config = snapshot;
    m.rng_seed = variants.front().config.rng_seed;
    m.run_seeds = run_seeds(variants.front().config);

    // Union of summary keys in first-seen order.
    std::vector<std::string> keys;
    for (const auto& o : outcomes)
        if (o.result)
            for (const auto& [k, _] : o.result->summary)
                if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);

    std::vector<std::vector<std::string>> table;
    std::vector<std::string> header{"name", "rule", "mu", "c", "d_prime", "ssg", "status"};
    header.insert(header.end(), keys.begin(), keys.end());
    std::string csv;
    for (std::size_t k = 0; k < header.size(); ++k) csv += (k ? "," : "") + header[k];
    csv += "\n";
    table.push_back(header);

    std::vector<PlotSeries> plots;
    bool any_diverged = false;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        const auto& v = variants[i];
        const auto& o = outcomes[i];
        std::string ssg = "nan";
        try {
            ssg = format_number(steady_state_gain(v.config.dag));
        } catch (const DomainError&) {
        }
        const auto vec = [](const std::vector<double>& x) {
            std::string s;
            for (std::size_t k = 0; k < x.size(); ++k) s += (k ? " " : "") + format_number(x[k]);
            return s;
        };
        std::vector<std::string> row{v.name, to_string(v.config.algorithm.kind), format_number(v.config.algorithm.mu),
                                     vec(v.config.dag.c), vec(v.config.dag.d_prime), ssg,
                                     o.result ? "ok" : o.failure};
        for (const auto& k : keys) {
            const auto val = o.result ? o.result->get(k) : std::nullopt;
            row.push_back(val ? format_number(*val) : "nan");
        }
        for (std::size_t k = 0; k < row.size(); ++k) {
            const bool quote = row[k].find(',') != std::string::npos || row[k].find(' ') != std::string::npos;
            csv += (k ? "," : "") + (quote ? "\"" + row[k] + "\"" : row[k]);
        }
        csv += "\n";
        table.push_back(row);

        if (o.result) {
            const auto file = "metrics_" + safe_name(v.name) + ".csv";
            export_metrics(o.result->series, dir / file);
            m.outputs.push_back(file);
            if (svg) plots.push_back(plot_series(v.name, v.config.scenario, o.result->series));
        } else {
            any_diverged = true;
            err << "daglms: variant '" << v.name << "' " << o.failure << "\n";
        }
    }

    // Aligned text rendering of the same table.
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : table)
        for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
    std::string text;
    for (const auto& row : table) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            text += row[k];
            if (k + 1 < row.size()) text += std::string(width[k] - row[k].size() + 2, ' ');
        }
        text += "\n";
    }
    write_file_atomic(dir / "comparison.csv", csv);
    write_file_atomic(dir / "comparison.txt", text);
    m.outputs.insert(m.outputs.begin(), {"comparison.csv", "comparison.txt"});
    if (svg) {
        write_file_atomic(dir / "plot.svg",
                          render_svg_line_chart("sweep", "sample", plot_label(variants.front().config.scenario), plots));
        m.outputs.push_back("plot.svg");
    }
    out << text;
    if (any_diverged) out << "(diverged variants are marked; the rest of the sweep completed)\n";
    m.wall_clock_seconds = seconds_since(t0);
    write_manifest(dir, m);
    out << "outputs in " << dir.string() << "\n";
    return kSuccess;
}

int cmd_sweep(const RunArgs& a, const Globals& g, std::ostream& out, std::ostream& err)
{
    const auto t0 = std::chrono::steady_clock::now();
    json doc = parse_document(a.input);
    if (looks_like_manifest(doc)) {
        const auto m = manifest_from_json(doc);
        if (m.command != "sweep") throw ConfigError("manifest was not written by sweep");
        doc = m.config;
    }
    return do_sweep(doc, g, a.svg, out, err, t0);
}

} // namespace

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Variable step-size LMS with a dynamic adaptation gain: design, analysis and experiments", "daglms"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Globals g;
    g.seed_opt = app.add_option("--seed", g.seed, "override the config RNG seed");
    g.out_opt = app.add_option("--out-dir", g.out_dir, "output directory (default $DAGLMS_OUT_DIR or daglms_out)");
    app.add_option("--grid-size", g.grid_size, "frequency grid size for design checks")
        ->check(CLI::Range(std::size_t{16}, std::size_t{1} << 22));
    g.parallel_opt =
        app.add_option("--parallel", g.parallel, "worker threads (results do not depend on it)")
            ->check(CLI::Range(std::size_t{1}, std::size_t{256}));

    DesignArgs design;
    auto* sd = app.add_subcommand("design", "SPR/PR verdicts, SSG and the log-gain integral of a DAG");
    sd->fallthrough();
    design.dag.attach(sd);
    design.bode_opt = sd->add_option("--bode", design.bode_path, "write omega_rad,mag_db,phase_deg,real_part CSV");
    design.contour_opt = sd->add_option("--contour", design.contour, "d1p=<value> <out.csv>: c1-c2 region boundaries")
                             ->expected(2);
    sd->add_option("--contour-resolution", design.contour_resolution, "c2 rows in the contour trace")
        ->check(CLI::Range(std::size_t{3}, std::size_t{100000}));

    TransientArgs transient;
    auto* st = app.add_subcommand("transient", "linearized adaptation transient for gain g");
    st->fallthrough();
    transient.dag.attach(st);
    st->add_option("--g", transient.g, "linearized loop gain");
    st->add_option("--horizon", transient.horizon, "samples");
    st->add_option("--band", transient.band, "settling band");
    transient.metrics_opt =
        st->add_option("--metrics", transient.metrics_path, "overlay the measured D^2 from a metrics CSV");
    transient.csv_opt = st->add_option("--csv", transient.csv_path, "trajectory CSV path (default <out-dir>/transient.csv)");

    RunArgs run;
    auto* sr = app.add_subcommand("run", "run one experiment from a config file or a manifest");
    sr->fallthrough();
    sr->add_option("config", run.input, "config or manifest JSON")->required();
    sr->add_flag("--svg", run.svg, "also write plot.svg");

    RunArgs sweep;
    auto* sw = app.add_subcommand("sweep", "run (algorithm, DAG) variants over one scenario");
    sw->fallthrough();
    sw->add_option("config", sweep.input, "sweep JSON or a sweep manifest")->required();
    sw->add_flag("--svg", sweep.svg, "also write plot.svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "daglms: " << e.what() << "\n" << "run 'daglms --help' for usage\n";
        return kConfigError;
    }

    try {
        if (*sd) return cmd_design(design, g, out);
        if (*st) return cmd_transient(transient, g, out);
        if (*sr) return cmd_run(run, g, out, err);
        if (*sw) return cmd_sweep(sweep, g, out, err);
    } catch (const ConfigError& e) {
        err << "daglms: " << e.what() << "\n";
        return kConfigError;
    } catch (const IngestionError& e) {
        err << "daglms: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        err << "daglms: " << e.what() << "\n";
        return kConfigError;
    } catch (const DivergenceError& e) {
        err << "daglms: diverged at sample " << e.sample() << ": " << e.what() << "\n";
        return kDivergence;
    } catch (const std::exception& e) {
        err << "daglms: internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kInternalError;
}

} // namespace daglms::cli
