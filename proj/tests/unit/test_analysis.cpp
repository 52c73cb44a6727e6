#include <cmath>
#include <random>

#include "daglms/analysis.hpp"
#include "daglms/dag_design.hpp"
#include "daglms/errors.hpp"
#include "daglms/experiments.hpp"
#include "doctest.h"

using namespace daglms;

TEST_SUITE("analysis")
{
    TEST_CASE("identity DAG step response is the first-order closed form")
    {
        for (double g : {0.01, 0.1, 0.5}) {
            const auto rep = sensitivity_step_response({g, DagCoefficients::identity()}, 800);
            REQUIRE(rep.step_response.size() == 801);
            for (std::size_t t = 0; t < rep.step_response.size(); ++t)
                REQUIRE(std::abs(rep.step_response[t] - std::pow(1.0 + g, -static_cast<double>(t))) < 1e-10);
            CHECK(rep.stable);
            CHECK(rep.max_pole_modulus == doctest::Approx(1.0 / (1.0 + g)));
            CHECK(rep.predicted_speedup == doctest::Approx(1.0));
        }
    }

    TEST_CASE("settling times of the linearized loop")
    {
        const auto id = sensitivity_step_response({0.01, DagCoefficients::identity()}, 3000);
        const auto dag = sensitivity_step_response({0.01, DagCoefficients::arima2(0.99, 0, 0.75)}, 3000);
        const auto fast = sensitivity_step_response({0.1, DagCoefficients::identity()}, 3000);
        REQUIRE(id.settling_time);
        REQUIRE(dag.settling_time);
        REQUIRE(fast.settling_time);
        CHECK(*id.settling_time >= 480);
        CHECK(*id.settling_time <= 720);
        CHECK(*dag.settling_time >= 56);
        CHECK(*dag.settling_time <= 84);
        CHECK(std::abs(static_cast<double>(*fast.settling_time) - *dag.settling_time) <= 0.25 * *dag.settling_time);
        CHECK(dag.predicted_speedup == doctest::Approx(static_cast<double>(*id.settling_time) / *dag.settling_time));
        // Independent count for the identity case: last t with (1+g)^-t > band, plus one.
        std::size_t last = 0;
        for (std::size_t t = 0; t < 3000; ++t)
            if (std::pow(1.01, -static_cast<double>(t)) > kDefaultSettlingBand) last = t;
        CHECK(*id.settling_time == last + 1);
    }

    TEST_CASE("settling is non-increasing in the steady-state gain")
    {
        const std::vector<DagCoefficients> dags{DagCoefficients::arima2(0, 0, 0), DagCoefficients::arima2(0.99, 0, 0),
                                                DagCoefficients::arima2(1.4, 0.5, 0), DagCoefficients::arima2(0, 0, 0.9),
                                                DagCoefficients::arima2(0.99, 0, 0.9)};
        double prev_ssg = 0.0;
        std::size_t prev = SIZE_MAX;
        for (const auto& d : dags) {
            const double ssg = steady_state_gain(d);
            CHECK(ssg > prev_ssg);
            const auto rep = sensitivity_step_response({0.01, d}, 5000);
            REQUIRE(rep.settling_time);
            CHECK(*rep.settling_time <= prev);
            prev = *rep.settling_time;
            prev_ssg = ssg;
        }
    }

    TEST_CASE("settling_time helper")
    {
        CHECK(settling_time(std::vector<double>{1.0, 0.5, 0.01, 0.0}, 0.1) == 2u);
        CHECK(settling_time(std::vector<double>{0.0, 0.0}, 0.1) == 0u);
        CHECK_FALSE(settling_time(std::vector<double>{1.0, 0.0, 0.5}, 0.1).has_value());
        CHECK_THROWS_AS(sensitivity_step_response({0.0, {}}, 10), ConfigError);
    }

    TEST_CASE("unstable closed loops are flagged")
    {
        // Non-SPR numerator root outside the circle drives a pole out for large g.
        const auto rep = sensitivity_step_response({5.0, DagCoefficients{{2.5}, {}}}, 200);
        CHECK_FALSE(rep.stable);
        CHECK(rep.max_pole_modulus > 1.0);
        CHECK_FALSE(rep.settling_time.has_value());
    }

    TEST_CASE("averaged oracle: geometric decay, fixed point, convergence")
    {
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
        Eigen::VectorXd w0(3);
        w0 << 1.0, -2.0, 0.5;
        const auto tr = averaged_feedback_oracle(DagCoefficients::identity(), eye, 0.1, w0, 100);
        REQUIRE(tr.norm.size() == 101);
        for (std::size_t t = 0; t <= 100; ++t)
            CHECK(tr.norm[t] == doctest::Approx(w0.norm() * std::pow(1.1, -static_cast<double>(t))).epsilon(1e-12));

        const auto zero = averaged_feedback_oracle(DagCoefficients::arima2(0.99, 0, 0.8), eye, 0.1,
                                                   Eigen::VectorXd::Zero(3), 50);
        for (double n : zero.norm) CHECK(n == 0.0);

        Eigen::MatrixXd e(3, 3);
        e << 2.0, 0.3, 0.1, 0.3, 1.0, 0.2, 0.1, 0.2, 0.5;
        const auto conv = averaged_feedback_oracle(DagCoefficients::arima2(0.99, 0, 0.8), e, 0.01, w0, 20000);
        CHECK(conv.norm.back() < 1e-6 * conv.norm.front());

        CHECK_THROWS_AS(averaged_feedback_oracle({}, Eigen::MatrixXd::Identity(2, 3), 0.1, Eigen::VectorXd::Ones(2), 5),
                        ConfigError);
        CHECK_THROWS_AS(averaged_feedback_oracle({}, eye, 0.1, Eigen::VectorXd::Ones(2), 5), ConfigError);
        CHECK_THROWS_AS(averaged_feedback_oracle({}, -eye, 1.0, w0, 5), DomainError);
    }

    TEST_CASE("scalar averaged oracle coincides with the sensitivity response")
    {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(-0.8, 0.8);
        for (int k = 0; k < 20; ++k) {
            const DagCoefficients d{{u(rng), 0.5 * u(rng)}, {u(rng)}};
            const double g = 0.005 + 0.05 * std::abs(u(rng));
            Eigen::MatrixXd e(1, 1);
            e(0, 0) = g;
            const auto tr = averaged_feedback_oracle(d, e, 1.0, Eigen::VectorXd::Ones(1), 400);
            const auto rep = sensitivity_step_response({g, d}, 400);
            for (std::size_t t = 0; t <= 400; ++t) REQUIRE(std::abs(tr.state[t](0) - rep.step_response[t]) < 1e-12);
        }
    }

    TEST_CASE("linearized gain and transient comparison")
    {
        CHECK(linearized_gain(0.02, 4.0, 4) == doctest::Approx(0.02));
        auto cfg = default_config(Scenario::ident_iir);
        cfg.dag = DagCoefficients::arima2(0.65, 0, 0.3);
        const auto res = run_identification(cfg);
        const auto cmp = compare_transient_prediction(cfg.dag, res.series, 0.05);
        REQUIRE(cmp.wtilde.size() == res.series.size());
        CHECK(cmp.wtilde[0] == doctest::Approx(1.0));
        CHECK(cmp.predicted_wtilde[0] == doctest::Approx(1.0));
        CHECK(cmp.measured_settling.has_value());
        CHECK(cmp.predicted_settling.has_value());
        CHECK(cmp.g == 0.05);

        MetricSeries no_ref;
        no_ref.resize(10);
        CHECK_THROWS_AS(compare_transient_prediction({}, no_ref, 0.05), ConfigError);
    }
}
