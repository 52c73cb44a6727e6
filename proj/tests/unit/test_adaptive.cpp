#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "daglms/adaptive_filter.hpp"
#include "daglms/errors.hpp"
#include "daglms/signal.hpp"
#include "doctest.h"

using namespace daglms;

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// D = (1 - q^-1) D' by direct convolution; returns d_1.. with D = 1 - sum d_i q^-i.
Vec integrated_by_convolution(const Vec& d_prime)
{
    Vec dp{1.0};
    for (double v : d_prime) dp.push_back(-v);
    Vec full(dp.size() + 1, 0.0);
    for (std::size_t k = 0; k < dp.size(); ++k) {
        full[k] += dp[k];
        full[k + 1] -= dp[k];
    }
    Vec d;
    for (std::size_t k = 1; k < full.size(); ++k) d.push_back(-full[k]);
    return d;
}

// Straight transcription of the DAG-filtered update with explicit histories.
struct ReferenceFilter {
    std::size_t n;
    StepSizeRule rule;
    Vec c, d;
    std::deque<Vec> w_hist; // w(t-1), w(t-2), ...
    std::deque<Vec> g_hist; // G(t-1), G(t-2), ...

    ReferenceFilter(std::size_t n_, StepSizeRule r, const DagCoefficients& dag)
        : n(n_), rule(r), c(dag.c), d(integrated_by_convolution(dag.d_prime)),
          w_hist(d.size(), Vec(n_, 0.0)), g_hist(c.size(), Vec(n_, 0.0))
    {
    }

    Vec prior() const
    {
        Vec w0(n, 0.0);
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t k = 0; k < n; ++k) w0[k] += d[i] * w_hist[i][k];
        for (std::size_t j = 0; j < c.size(); ++j)
            for (std::size_t k = 0; k < n; ++k) w0[k] += c[j] * g_hist[j][k];
        return w0;
    }

    Vec update(std::span<const double> r, double x)
    {
        const Vec w0 = prior();
        const double e = x - dot(w0, r);
        const double rr = dot(Vec(r.begin(), r.end()), r);
        double mu = rule.mu;
        if (rule.kind == StepSizeRule::Kind::nlms) mu = rule.mu / (rule.delta + rr);
        if (rule.kind == StepSizeRule::Kind::plms) mu = rule.mu / (1.0 + rule.mu * rr);
        Vec g(n), w(n);
        for (std::size_t k = 0; k < n; ++k) {
            g[k] = mu * r[k] * e;
            w[k] = w0[k] + g[k];
        }
        if (!d.empty()) {
            w_hist.pop_back();
            w_hist.push_front(w);
        }
        if (!c.empty()) {
            g_hist.pop_back();
            g_hist.push_front(g);
        }
        return w;
    }
};

std::vector<Vec> random_rows(std::size_t count, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<Vec> rows(count, Vec(n));
    for (auto& r : rows)
        for (auto& v : r) v = nd(rng);
    return rows;
}

} // namespace

TEST_SUITE("adaptive")
{
    TEST_CASE("step size rules")
    {
        CHECK(step_size(StepSizeRule::plms(0.5), 1.0) == doctest::Approx(1.0 / 3.0));
        CHECK(step_size(StepSizeRule::nlms(1.0, 1.0), 1.0) == 0.5);
        CHECK(step_size(StepSizeRule::plms(1.0), 1.0) == 0.5);
        CHECK(step_size(StepSizeRule::lms(0.3), 0.0) == 0.3);
        CHECK(step_size(StepSizeRule::lms(0.3), 1e6) == 0.3);
        CHECK(step_size(StepSizeRule::nlms(0.02), 4.0) == doctest::Approx(0.005));
        CHECK_THROWS_AS(StepSizeRule::lms(-1.0).validate(), ConfigError);
        CHECK_THROWS_AS(StepSizeRule::nlms(1.0, -1.0).validate(), ConfigError);
        CHECK_THROWS_AS(StepSizeRule::plms(std::nan("")).validate(), ConfigError);
    }

    TEST_CASE("integrated denominator coefficients")
    {
        CHECK(DagCoefficients::identity().integrated_denominator() == Vec{1.0});
        const auto d = DagCoefficients{{}, {0.9}}.integrated_denominator();
        REQUIRE(d.size() == 2);
        CHECK(d[0] == doctest::Approx(1.9).epsilon(1e-15));
        CHECK(d[1] == doctest::Approx(-0.9).epsilon(1e-15));

        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            Vec dp(static_cast<std::size_t>(trial % 6));
            for (auto& v : dp) v = u(rng);
            const auto got = DagCoefficients{{}, dp}.integrated_denominator();
            const auto want = integrated_by_convolution(dp);
            REQUIRE(got.size() == want.size());
            double sum = 0.0;
            for (std::size_t k = 0; k < got.size(); ++k) {
                CHECK(std::abs(got[k] - want[k]) <= 1e-14);
                sum += got[k];
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("prediction with identity DAG and zero state")
    {
        AdaptiveFilter f(3, StepSizeRule::lms(0.1), DagCoefficients::identity());
        const Vec r{1.0, 2.0, 3.0};
        CHECK(f.predict_prior(r) == 0.0);
        f.set_weights(Vec{0.5, -1.0, 2.0});
        CHECK(f.predict_prior(r) == 0.5 - 2.0 + 6.0);
        CHECK_THROWS_AS(f.predict_prior(Vec{1.0}), ConfigError);
    }

    TEST_CASE("identity DAG update is bitwise the plain update")
    {
        const auto rows = random_rows(500, 5, 3);
        const auto xs = random_rows(1, 500, 4)[0];
        for (auto rule : {StepSizeRule::lms(0.01), StepSizeRule::nlms(0.3), StepSizeRule::plms(0.2)}) {
            AdaptiveFilter f(5, rule, DagCoefficients::identity());
            Vec w(5, 0.0);
            for (std::size_t t = 0; t < rows.size(); ++t) {
                const auto& r = rows[t];
                const double e = xs[t] - dot(w, r);
                const double gain = step_size(rule, dot(r, r)) * e;
                for (std::size_t k = 0; k < 5; ++k) w[k] += gain * r[k];
                f.update(r, xs[t]);
                const auto got = f.weights();
                for (std::size_t k = 0; k < 5; ++k) REQUIRE(got[k] == w[k]);
            }
        }
    }

    TEST_CASE("DAG update matches an explicit-history transcription")
    {
        const auto rows = random_rows(400, 4, 5);
        const auto xs = random_rows(1, 400, 6)[0];
        const std::vector<DagCoefficients> dags{DagCoefficients::arima2(0.99, 0.0, 0.8),
                                                DagCoefficients{{-0.5, 0.4}, {0.7}},
                                                DagCoefficients{{0.3, 0.1, 0.05}, {0.5, -0.2}},
                                                DagCoefficients{{}, {0.9}}};
        for (const auto& dag : dags)
            for (auto rule : {StepSizeRule::nlms(0.05), StepSizeRule::plms(0.02)}) {
                AdaptiveFilter f(4, rule, dag);
                ReferenceFilter ref(4, rule, dag);
                for (std::size_t t = 0; t < rows.size(); ++t) {
                    const auto w_ref = ref.update(rows[t], xs[t]);
                    f.update(rows[t], xs[t]);
                    const auto got = f.weights();
                    for (std::size_t k = 0; k < 4; ++k)
                        REQUIRE(got[k] == doctest::Approx(w_ref[k]).epsilon(1e-12).scale(1.0));
                }
            }
    }

    TEST_CASE("NLMS(1, 1) and PLMS(1) trajectories coincide")
    {
        const auto rows = random_rows(2000, 6, 7);
        const auto xs = random_rows(1, 2000, 8)[0];
        for (const auto& dag : {DagCoefficients::identity(), DagCoefficients::arima2(0.65, 0.0, 0.3)}) {
            AdaptiveFilter a(6, StepSizeRule::nlms(1.0, 1.0), dag);
            AdaptiveFilter b(6, StepSizeRule::plms(1.0), dag);
            for (std::size_t t = 0; t < rows.size(); ++t) {
                a.update(rows[t], xs[t]);
                b.update(rows[t], xs[t]);
                for (std::size_t k = 0; k < 6; ++k) REQUIRE(std::abs(a.weights()[k] - b.weights()[k]) <= 1e-12);
            }
        }
    }

    TEST_CASE("a-posteriori error identities")
    {
        const auto rows = random_rows(300, 4, 9);
        const auto xs = random_rows(1, 300, 10)[0];
        AdaptiveFilter p(4, StepSizeRule::plms(0.7), DagCoefficients::identity());
        AdaptiveFilter n(4, StepSizeRule::nlms(0.4), DagCoefficients::identity());
        for (std::size_t t = 0; t < rows.size(); ++t) {
            const auto rp = p.update(rows[t], xs[t]);
            const double rr = dot(rows[t], rows[t]);
            CHECK(rp.e_posterior == doctest::Approx(rp.e_prior / (1.0 + 0.7 * rr)).epsilon(1e-12));
            const Vec wp(p.weights().begin(), p.weights().end());
            CHECK(std::abs(rp.e_posterior - (xs[t] - dot(wp, rows[t]))) <= 1e-12 * (1.0 + std::abs(xs[t])));
            const auto rn = n.update(rows[t], xs[t]);
            const Vec wn(n.weights().begin(), n.weights().end());
            CHECK(std::abs(rn.e_posterior - (xs[t] - dot(wn, rows[t]))) <= 1e-12 * (1.0 + std::abs(xs[t])));
        }
    }

    TEST_CASE("zero error keeps a settled weight vector fixed")
    {
        AdaptiveFilter f(3, StepSizeRule::plms(0.1), DagCoefficients{{0.5, 0.2}, {0.6, 0.1}});
        const Vec w{1.0, -2.0, 0.5};
        f.set_weights(w);
        for (int t = 0; t < 50; ++t) {
            f.adapt(Vec{1.0, 2.0, 3.0}, 0.0);
            for (std::size_t k = 0; k < 3; ++k) CHECK(f.weights()[k] == doctest::Approx(w[k]).epsilon(1e-14));
        }
    }

    TEST_CASE("correction history enters linearly")
    {
        // From zero weights the whole trajectory is linear in the error sequence.
        const auto rows = random_rows(60, 3, 12);
        const auto es = random_rows(1, 60, 13)[0];
        const auto dag = DagCoefficients::arima2(0.9, 0.2, 0.5);
        AdaptiveFilter a(3, StepSizeRule::lms(0.05), dag), b(3, StepSizeRule::lms(0.05), dag);
        for (std::size_t t = 0; t < rows.size(); ++t) {
            a.adapt(rows[t], es[t]);
            b.adapt(rows[t], 2.0 * es[t]);
            for (std::size_t k = 0; k < 3; ++k)
                CHECK(b.weights()[k] == doctest::Approx(2.0 * a.weights()[k]).epsilon(1e-12));
        }
    }

    TEST_CASE("exact and approximate prior weights")
    {
        const auto rows = random_rows(300, 4, 14);
        const auto xs = random_rows(1, 300, 15)[0];
        AdaptiveFilter ex(4, StepSizeRule::nlms(0.1), DagCoefficients::arima2(0.99, 0.0, 0.8), PriorMode::exact);
        AdaptiveFilter ap(4, StepSizeRule::nlms(0.1), DagCoefficients::arima2(0.99, 0.0, 0.8), PriorMode::approximate);
        double diff = 0.0;
        for (std::size_t t = 0; t < rows.size(); ++t) {
            ex.update(rows[t], xs[t]);
            ap.update(rows[t], xs[t]);
            diff = std::max(diff, std::abs(ex.weights()[0] - ap.weights()[0]));
        }
        CHECK(diff > 1e-6);

        // With identity DAG both modes are the same recursion.
        AdaptiveFilter i1(4, StepSizeRule::plms(0.1), {}, PriorMode::exact);
        AdaptiveFilter i2(4, StepSizeRule::plms(0.1), {}, PriorMode::approximate);
        for (std::size_t t = 0; t < rows.size(); ++t) {
            i1.update(rows[t], xs[t]);
            i2.update(rows[t], xs[t]);
            for (std::size_t k = 0; k < 4; ++k) REQUIRE(i1.weights()[k] == i2.weights()[k]);
        }

        // Once the corrections die out the exact prior approaches w(t-1).
        AdaptiveFilter q(2, StepSizeRule::plms(0.1), DagCoefficients::arima2(0.99, 0.0, 0.8));
        q.adapt(Vec{1.0, 1.0}, 1.0);
        for (int t = 0; t < 400; ++t) q.adapt(Vec{1.0, 1.0}, 0.0);
        const Vec w(q.weights().begin(), q.weights().end());
        const auto w0 = q.prior_weights();
        CHECK(std::abs(w0[0] - w[0]) < 1e-12);
    }

    TEST_CASE("divergence guard")
    {
        AdaptiveFilter f(2, StepSizeRule::lms(10.0), DagCoefficients::identity());
        bool threw = false;
        try {
            for (int t = 0; t < 1000; ++t) f.update(Vec{1.0, 1.0}, 1.0);
        } catch (const DivergenceError& e) {
            threw = true;
            CHECK(e.sample() < 1000);
        }
        CHECK(threw);

        AdaptiveFilter g(2, StepSizeRule::nlms(0.1), DagCoefficients::identity());
        CHECK_THROWS_AS(g.update(Vec{std::nan(""), 1.0}, 1.0), DivergenceError);
        CHECK_THROWS_AS(g.update(Vec{1.0, 1.0}, std::numeric_limits<double>::infinity()), DivergenceError);
    }

    TEST_CASE("tap line views newest first")
    {
        TapLine tl(3);
        for (double v : {1.0, 2.0, 3.0, 4.0}) tl.push(v);
        const auto v = tl.view();
        CHECK(v[0] == 4.0);
        CHECK(v[1] == 3.0);
        CHECK(v[2] == 2.0);
        tl.clear();
        CHECK(tl.view()[0] == 0.0);
    }

    TEST_CASE("run_filter regressor is the delayed tap line")
    {
        const auto x = random_rows(1, 300, 16)[0];
        const std::size_t L = 4, delta = 3;
        FilterRunOptions o;
        o.decorrelation_delay = delta;
        Vec final_w;
        o.final_weights = &final_w;
        const auto s = run_filter(x, x, StepSizeRule::nlms(0.2), DagCoefficients::identity(), L, o);
        CHECK(s.size() == x.size());

        Vec w(L, 0.0);
        for (std::size_t t = 0; t < x.size(); ++t) {
            Vec r(L, 0.0);
            for (std::size_t k = 0; k < L; ++k)
                if (t >= delta + k) r[k] = x[t - delta - k];
            const double e = x[t] - dot(w, r);
            CHECK(s.e_prior[t] == doctest::Approx(e).epsilon(1e-12));
            const double mu = step_size(StepSizeRule::nlms(0.2), dot(r, r));
            for (std::size_t k = 0; k < L; ++k) w[k] += mu * r[k] * e;
        }
        for (std::size_t k = 0; k < L; ++k) CHECK(final_w[k] == doctest::Approx(w[k]).epsilon(1e-12));

        o.warmup = 10;
        CHECK(run_filter(x, x, StepSizeRule::nlms(0.2), {}, L, o).size() == x.size() - 10);
        CHECK_THROWS_AS(run_filter(x, Vec(5, 0.0), StepSizeRule::nlms(0.2), {}, L), ConfigError);
    }

    TEST_CASE("zero step size freezes the weights")
    {
        const auto rows = random_rows(50, 3, 17);
        const auto xs = random_rows(1, 50, 18)[0];
        FilterRunOptions o;
        o.initial_weights = Vec{0.1, 0.2, 0.3};
        o.reference_weights = Vec{0.0, 0.0, 0.0};
        Vec fw;
        o.final_weights = &fw;
        const auto s = run_regression(rows, xs, StepSizeRule::lms(0.0), DagCoefficients::arima2(0.5, 0, 0.5), o);
        for (std::size_t k = 0; k < 3; ++k) CHECK(fw[k] == doctest::Approx((*o.initial_weights)[k]).epsilon(1e-15));
        for (double d2 : s.d_squared) CHECK(d2 == doctest::Approx(0.14));
    }
}
