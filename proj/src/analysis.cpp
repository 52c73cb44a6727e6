#include "daglms/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "daglms/errors.hpp"
#include "daglms/polynomial.hpp"

namespace daglms {

Poly SensitivityModel::sensitivity_numerator() const
{
    const Poly integrator{1.0, -1.0};
    return poly_multiply(integrator, dag.denominator());
}

Poly SensitivityModel::sensitivity_denominator() const
{
    return poly_add(sensitivity_numerator(), poly_scale(dag.numerator(), g));
}

std::optional<std::size_t> settling_time(std::span<const double> y, double band)
{
    if (y.empty()) return std::nullopt;
    for (std::size_t k = y.size(); k-- > 0;)
        if (std::abs(y[k]) > band) {
            if (k + 1 == y.size()) return std::nullopt;
            return k + 1;
        }
    return 0;
}

namespace {

std::vector<double> filter_step(const Poly& num, const Poly& den, std::size_t n)
{
    std::vector<double> y(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t j = 0; j < num.size() && j <= t; ++j) acc += num[j]; // input is 1 for all t >= 0
        for (std::size_t i = 1; i < den.size() && i <= t; ++i) acc -= den[i] * y[t - i];
        y[t] = acc / den[0];
    }
    return y;
}

TransientReport simulate(const SensitivityModel& model, std::size_t horizon, double band)
{
    TransientReport rep;
    const Poly den = model.sensitivity_denominator();
    rep.max_pole_modulus = max_root_modulus(den);
    rep.stable = is_stable(den);
    const auto y = filter_step(model.sensitivity_numerator(), den, horizon);
    rep.step_response.reserve(horizon + 1);
    rep.step_response.push_back(1.0);
    rep.step_response.insert(rep.step_response.end(), y.begin(), y.end());
    if (rep.stable) rep.settling_time = settling_time(rep.step_response, band);
    return rep;
}

} // namespace

TransientReport sensitivity_step_response(const SensitivityModel& model, std::size_t horizon, double band)
{
    if (!(model.g > 0.0) || !std::isfinite(model.g)) throw ConfigError("linearized gain g must be > 0");
    if (!(band > 0.0)) throw ConfigError("settling band must be > 0");
    auto rep = simulate(model, horizon, band);
    const auto base = simulate(SensitivityModel{model.g, DagCoefficients::identity()}, horizon, band);
    if (rep.settling_time && base.settling_time && *rep.settling_time > 0)
        rep.predicted_speedup = static_cast<double>(*base.settling_time) / static_cast<double>(*rep.settling_time);
    return rep;
}

AveragedTrajectory averaged_feedback_oracle(const DagCoefficients& dag, const Eigen::MatrixXd& e_r, double mu,
                                            const Eigen::VectorXd& w0, std::size_t horizon)
{
    const auto n = e_r.rows();
    if (e_r.cols() != n) throw ConfigError("covariance matrix must be square");
    if (w0.size() != n) throw ConfigError("initial error has the wrong dimension");

    const Eigen::MatrixXd me = mu * e_r;
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) + me;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw DomainError("implicit step matrix I + mu E is singular");

    const std::size_t nc = dag.c.size();
    const std::size_t nd = dag.d_prime.size();
    // Histories for lags 1.. of the H_DAG input (w~ from t >= 1) and output.
    std::vector<Eigen::VectorXd> in_hist(nc, Eigen::VectorXd::Zero(n));
    std::vector<Eigen::VectorXd> out_hist(nd, Eigen::VectorXd::Zero(n));

    AveragedTrajectory tr;
    tr.state.reserve(horizon + 1);
    tr.norm.reserve(horizon + 1);
    tr.state.push_back(w0);
    tr.norm.push_back(w0.norm());

    Eigen::VectorXd w = w0;
    for (std::size_t t = 0; t < horizon; ++t) {
        // H[w~](t+1) = w~(t+1) + p, p from the stored history.
        Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
        for (std::size_t j = 0; j < nc; ++j) p += dag.c[j] * in_hist[j];
        for (std::size_t i = 0; i < nd; ++i) p += dag.d_prime[i] * out_hist[i];

        Eigen::VectorXd next = lu.solve(w - me * p);
        const Eigen::VectorXd h = next + p;

        if (nc) {
            std::rotate(in_hist.rbegin(), in_hist.rbegin() + 1, in_hist.rend());
            in_hist[0] = next;
        }
        if (nd) {
            std::rotate(out_hist.rbegin(), out_hist.rbegin() + 1, out_hist.rend());
            out_hist[0] = h;
        }
        w = std::move(next);
        tr.norm.push_back(w.norm());
        tr.state.push_back(w);
    }
    return tr;
}

double linearized_gain(double mu, double mean_rr, std::size_t dim)
{
    if (dim == 0) throw ConfigError("dimension must be >= 1");
    return mu * mean_rr / static_cast<double>(dim);
}

TransientComparison compare_transient_prediction(const DagCoefficients& dag, const MetricSeries& experiment, double g,
                                                 double band)
{
    if (experiment.size() == 0) throw ConfigError("experiment series is empty");
    const double d0 = experiment.d_squared.front();
    if (!(d0 > 0.0) || !std::isfinite(d0))
        throw ConfigError("experiment has no parametric distance reference (D^2(0) must be > 0)");

    TransientComparison out;
    out.g = g;
    out.wtilde.resize(experiment.size());
    for (std::size_t t = 0; t < experiment.size(); ++t) out.wtilde[t] = std::sqrt(experiment.d_squared[t] / d0);

    const auto rep = sensitivity_step_response(SensitivityModel{g, dag}, experiment.size() - 1, band);
    out.predicted_wtilde = rep.step_response;
    out.predicted_settling = rep.settling_time;
    out.measured_settling = settling_time(out.wtilde, band);
    return out;
}

} // namespace daglms
