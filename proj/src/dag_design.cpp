#include "daglms/dag_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "daglms/errors.hpp"
#include "daglms/polynomial.hpp"

namespace daglms {

namespace {

using std::numbers::pi;

bool is_arima2_shaped(const DagCoefficients& dag)
{
    return dag.c.size() <= 2 && dag.d_prime.size() <= 1;
}

double coef(const std::vector<double>& v, std::size_t i)
{
    return i < v.size() ? v[i] : 0.0;
}

// H_DAG on the unit circle with the polynomials built once; sweeps call it
// tens of millions of times.
class CircleEvaluator {
public:
    explicit CircleEvaluator(const DagCoefficients& dag) : num_(dag.numerator()), den_(dag.denominator()) {}

    std::complex<double> value(double omega) const
    {
        const auto z = std::polar(1.0, -omega);
        const auto n = horner(num_, z);
        const auto d = horner(den_, z);
        return n * std::conj(d) / std::norm(d);
    }
    double real(double omega) const { return value(omega).real(); }

private:
    static std::complex<double> horner(const Poly& p, std::complex<double> z)
    {
        std::complex<double> acc = 0.0;
        for (std::size_t k = p.size(); k-- > 0;) acc = acc * z + p[k];
        return acc;
    }

    Poly num_;
    Poly den_;
};

// Golden-section search for the minimum of f on [a, b].
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, int iterations = 60)
{
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < iterations; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

} // namespace

std::complex<double> evaluate(const DagCoefficients& dag, double omega)
{
    return poly_on_circle(dag.numerator(), omega) / poly_on_circle(dag.denominator(), omega);
}

std::complex<double> evaluate_paa(const DagCoefficients& dag, double omega)
{
    if (omega == 0.0) throw DomainError("H_PAA has a pole at omega = 0");
    const std::complex<double> integrator = 1.0 - std::polar(1.0, -omega);
    return evaluate(dag, omega) / integrator;
}

FrequencyResponse bode(const DagCoefficients& dag, std::size_t grid_size)
{
    if (grid_size == 0) throw ConfigError("grid size must be >= 1");
    FrequencyResponse out;
    out.omega.resize(grid_size);
    out.magnitude_db.resize(grid_size);
    out.phase_deg.resize(grid_size);
    out.real_part.resize(grid_size);
    for (std::size_t k = 0; k < grid_size; ++k) {
        const double w = pi * static_cast<double>(k + 1) / static_cast<double>(grid_size);
        const auto h = evaluate(dag, w);
        out.omega[k] = w;
        out.magnitude_db[k] = 20.0 * std::log10(std::abs(h));
        out.phase_deg[k] = std::arg(h) * 180.0 / pi;
        out.real_part[k] = h.real();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Closed form for the ARIMA2 family.
//
// Re[C(e^{-iw}) D'(e^{iw})] with x = cos w is the quadratic
//   p(x) = (1 - c2 - d'c1) + (c1 - d'(1 + c2)) x + 2 c2 x^2,
// which has to stay positive on [-1, 1]. The endpoints give |c1| < 1 + c2;
// for c2 > 0 the vertex can fall inside the interval, and the tangency
// (zero discriminant) gives c1 = d'(1 - 3c2) +- 2 sqrt(2(c2 - c2^2)(1 - d'^2)).
// A tangent bound is active only when its vertex lies inside (-1, 1).

std::optional<std::pair<double, double>> arima2_c1_bounds(double c2, double d)
{
    if (!(std::abs(d) < 1.0) || !(c2 > -1.0) || !(c2 < 1.0)) return std::nullopt;
    double lo = -1.0 - c2;
    double hi = 1.0 + c2;
    if (c2 > 0.0) {
        const double s = std::sqrt(2.0 * (c2 - c2 * c2) * (1.0 - d * d));
        const double centre = d * (1.0 - 3.0 * c2);
        if (s < 2.0 * c2 * (1.0 + d)) hi = std::min(hi, centre + 2.0 * s);
        if (s < 2.0 * c2 * (1.0 - d)) lo = std::max(lo, centre - 2.0 * s);
    }
    if (!(lo < hi)) return std::nullopt;
    return std::pair{lo, hi};
}

bool spr_criterion_arima2(double c1, double c2, double d1_prime)
{
    const auto b = arima2_c1_bounds(c2, d1_prime);
    return b && b->first < c1 && c1 < b->second;
}

std::optional<double> arima2_margin(double c1, double c2, double d1_prime)
{
    const auto b = arima2_c1_bounds(c2, d1_prime);
    if (!b) return std::nullopt;
    return std::min(c1 - b->first, b->second - c1);
}

SprVerdict spr_sweep_oracle(const DagCoefficients& dag, std::size_t grid_size)
{
    if (grid_size < 2) throw ConfigError("grid size must be >= 2");
    SprVerdict v;
    v.roots_ok = is_stable(dag.numerator()) && is_stable(dag.denominator());

    const CircleEvaluator h(dag);
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    const double step = pi / static_cast<double>(grid_size - 1);
    for (std::size_t k = 0; k < grid_size; ++k) {
        const double re = h.real(step * static_cast<double>(k));
        if (re < best_val) {
            best_val = re;
            best = k;
        }
    }
    const double a = step * static_cast<double>(best == 0 ? 0 : best - 1);
    const double b = std::min(pi, step * static_cast<double>(best + 1));
    const auto [w_ref, f_ref] = golden_min([&](double w) { return h.real(w); }, a, b);
    v.min_real_part = best_val;
    v.argmin_omega = step * static_cast<double>(best);
    if (f_ref < best_val) {
        v.min_real_part = f_ref;
        v.argmin_omega = w_ref;
    }

    v.sweep_verdict = v.roots_ok && v.min_real_part > 0.0;
    v.is_spr = v.sweep_verdict;
    if (is_arima2_shaped(dag))
        v.criterion_verdict = spr_criterion_arima2(coef(dag.c, 0), coef(dag.c, 1), coef(dag.d_prime, 0));
    return v;
}

PaaVerdict paa_pr_check(const DagCoefficients& dag, std::size_t grid_size, double tolerance)
{
    if (grid_size == 0) throw ConfigError("grid size must be >= 1");
    PaaVerdict v;
    v.denominator_stable = is_stable(dag.denominator());
    v.numerator_ok = max_root_modulus(dag.numerator()) <= 1.0 + 1e-9;
    const double den1 = poly_eval(dag.denominator(), 1.0).real();
    v.residue = den1 != 0.0 ? poly_eval(dag.numerator(), 1.0).real() / den1 : std::numeric_limits<double>::quiet_NaN();

    const CircleEvaluator h(dag);
    v.min_real_part = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= grid_size; ++k) {
        const double w = pi * static_cast<double>(k) / static_cast<double>(grid_size);
        const double re = (h.value(w) / (1.0 - std::polar(1.0, -w))).real();
        if (re < v.min_real_part) {
            v.min_real_part = re;
            v.argmin_omega = w;
        }
    }
    v.is_pr = v.denominator_stable && v.numerator_ok && v.residue > 0.0 && v.min_real_part >= -tolerance;
    return v;
}

double log_gain_integral(const DagCoefficients& dag, std::size_t nodes)
{
    if (nodes < 2) throw ConfigError("quadrature needs at least 2 nodes");
    if (!is_stable(dag.numerator()) || !is_stable(dag.denominator()))
        throw DomainError("log-gain integral requires numerator and denominator roots strictly inside the unit circle");
    const CircleEvaluator eval(dag);
    const double h = pi / static_cast<double>(nodes - 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
        const double f = std::log(std::abs(eval.value(h * static_cast<double>(k))));
        sum += (k == 0 || k + 1 == nodes) ? 0.5 * f : f;
    }
    return sum * h;
}

double steady_state_gain(const DagCoefficients& dag)
{
    double sc = 0.0;
    for (double v : dag.c) sc += v;
    double sd = 0.0;
    for (double v : dag.d_prime) sd += v;
    const double den = 1.0 - sd;
    if (std::abs(den) < 1e-15) throw DomainError("steady-state gain undefined: sum of d' equals 1");
    return (1.0 + sc) / den;
}

// ---------------------------------------------------------------------------

namespace {

struct Row {
    double c2;
    double lo;
    double hi;
};

// Interval of c1 where a(w) + c1 b(w) > 0 (or >= -tol) across the grid.
void intersect_halfline(double a, double b, double& lo, double& hi, double tol)
{
    if (std::abs(b) < 1e-14) {
        if (a < -tol) {
            lo = std::numeric_limits<double>::infinity();
            hi = -lo;
        }
        return;
    }
    const double root = -a / b;
    if (b > 0.0)
        lo = std::max(lo, root);
    else
        hi = std::min(hi, root);
}

void emit(const std::vector<Row>& rows, ContourId id, std::vector<ContourPoint>& out)
{
    if (rows.empty()) return;
    for (const auto& r : rows) out.push_back({r.lo, r.c2, id});
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) out.push_back({it->hi, it->c2, id});
    out.push_back({rows.front().lo, rows.front().c2, id});
}

} // namespace

std::vector<ContourPoint> contour_trace(double d1_prime, std::size_t resolution, std::size_t grid_size)
{
    if (!(std::abs(d1_prime) < 1.0)) throw ConfigError("contour_trace requires |d1'| < 1");
    if (resolution < 2 || grid_size < 2) throw ConfigError("contour resolution and grid size must be >= 2");

    const Poly dp{1.0, -d1_prime};
    std::vector<Row> spr_rows;
    std::vector<Row> pr_rows;
    for (std::size_t i = 0; i < resolution; ++i) {
        const double c2 = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(resolution - 1);

        // SPR of C/D': Re[C conj(D')] > 0 on [0, pi]; numerator roots inside.
        double lo = -1.0 - c2;
        double hi = 1.0 + c2;
        if (c2 > -1.0 && c2 < 1.0) {
            for (std::size_t k = 0; k < grid_size; ++k) {
                const double w = pi * static_cast<double>(k) / static_cast<double>(grid_size - 1);
                const auto z = std::polar(1.0, -w);
                const auto dconj = std::conj(poly_on_circle(dp, w));
                intersect_halfline(((1.0 + c2 * z * z) * dconj).real(), (z * dconj).real(), lo, hi, 0.0);
            }
            if (lo < hi) spr_rows.push_back({c2, lo, hi});
        }

        // PR of C/((1 - q^-1) D') on (0, pi]; residue C(1) > 0; C marginally stable.
        lo = -1.0 - c2;
        hi = 1.0 + c2;
        if (c2 >= -1.0 && c2 <= 1.0) {
            for (std::size_t k = 1; k <= grid_size; ++k) {
                const double w = pi * static_cast<double>(k) / static_cast<double>(grid_size);
                const auto z = std::polar(1.0, -w);
                const auto dconj = std::conj((1.0 - z) * poly_on_circle(dp, w));
                intersect_halfline(((1.0 + c2 * z * z) * dconj).real(), (z * dconj).real(), lo, hi, 0.0);
            }
            if (lo < hi) pr_rows.push_back({c2, lo, hi});
        }
    }

    std::vector<ContourPoint> out;
    emit(spr_rows, ContourId::spr, out);
    emit(pr_rows, ContourId::paa_pr, out);
    return out;
}

} // namespace daglms
