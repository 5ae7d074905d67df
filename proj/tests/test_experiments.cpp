// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <cmath>
#include <limits>

#include "mmtrack/config.hpp"
#include "mmtrack/experiments.hpp"

using namespace mmtrack;

namespace {

ChannelState some_state()
{
    ChannelState s;
    s.alpha = CVector(2);
    s.alpha << cdouble{0.3, -0.2}, cdouble{-1.1, 0.4};
    s.theta = RVector(2);
    s.theta << 0.8, 0.7;
    s.phi = RVector(2);
    s.phi << 0.75, 0.9;
    return s;
}

ExperimentConfig small(std::size_t horizon = 50, std::size_t trials = 40)
{
    ExperimentConfig cfg = default_experiment();
    cfg.horizon = horizon;
    cfg.trials = trials;
    return cfg;
}

} // namespace

TEST_CASE("init_trial schemes")
{
    const ChannelState s = some_state();
    Rng rng = make_substream(1, 1);
    CHECK(init_trial(s, InitScheme{InitKind::perfect, 0.25, 1e-4}, rng) == EstimateVector::from_state(s));
    CHECK(init_trial(s, InitScheme{InitKind::imperfect, 0.0, 0.0}, rng) == EstimateVector::from_state(s));

    const InitScheme scheme{InitKind::imperfect, 0.25, deg_to_rad(0.5) * deg_to_rad(0.5)};
    const RVector lambda = scheme.covariance_diagonal(2);
    const RVector base = EstimateVector::from_state(s).values();
    const std::size_t draws = 100'000;
    RVector sumsq = RVector::Zero(8);
    for (std::size_t i = 0; i < draws; ++i) {
        const RVector eps = init_trial(s, scheme, rng).values() - base;
        sumsq += eps.cwiseAbs2();
    }
    for (int i = 0; i < 8; ++i)
        CHECK(std::abs(sumsq[i] / draws - lambda[i]) < 0.05 * lambda[i]);
}

TEST_CASE("simulated trials start inside the pointing spread")
{
    const ExperimentConfig cfg = small(10, 1);
    for (std::uint64_t t = 0; t < 200; ++t) {
        const TrialData d = simulate_trial(cfg, t);
        CHECK(d.truth.size() == 10);
        CHECK(d.measurements.size() == 10);
        CHECK(std::abs(d.truth[0].theta[0] - cfg.array.theta_point) <= cfg.initial_spread);
        CHECK(std::abs(d.truth[0].phi[0] - cfg.array.phi_point) <= cfg.initial_spread);
        CHECK(d.truth[9].k == 10);
    }
}

TEST_CASE("noiseless static channel with exact init gives zero MSE")
{
    ExperimentConfig cfg = small(40, 8);
    cfg.snr_db = std::numeric_limits<double>::infinity();
    cfg.dynamics = DynamicsParams{1.0, 0.0, 0.0};
    cfg.init = InitScheme{InitKind::perfect, 0.0, 0.0};
    const MseTrace trace = run_experiment(cfg);
    REQUIRE(trace.algorithms.size() == 4);
    for (const auto& at : trace.algorithms) {
        CHECK(at.diverged == 0);
        for (auto g : kParamGroups)
            for (double v : at.group(g).mse)
                CHECK(v == 0.0);
    }
}

TEST_CASE("MSE traces are finite, non-negative and carry standard errors")
{
    ExperimentConfig cfg = small(60, 40);
    cfg.init = InitScheme{InitKind::imperfect, 0.25, deg_to_rad(0.5) * deg_to_rad(0.5)};
    const MseTrace trace = run_experiment(cfg);
    CHECK(trace.horizon == 60);
    for (const auto& at : trace.algorithms) {
        CHECK_FALSE(at.all_diverged);
        for (auto g : kParamGroups) {
            const auto& gt = at.group(g);
            REQUIRE(gt.mse.size() == 60);
            for (std::size_t k = 0; k < 60; ++k) {
                CHECK(std::isfinite(gt.mse[k]));
                CHECK(gt.mse[k] >= 0.0);
                CHECK(gt.stderr_[k] >= 0.0);
            }
            CHECK(gt.steady.mean >= 0.0);
            CHECK(gt.steady.stderr_ > 0.0);
        }
    }
    // the frozen baseline holds the initial estimate
    const auto& none = trace.at(Algorithm::none).group(ParamGroup::aoa).mse;
    CHECK(none.back() > none.front());
}

TEST_CASE("steady-state window is the final fifth of the horizon")
{
    CHECK(steady_state_window(500) == 100);
    CHECK(steady_state_window(2) == 1);
    CHECK(steady_state_window(1) == 1);
    CHECK(steady_state_window(11) == 3);
}

TEST_CASE("results do not depend on the thread count")
{
    ExperimentConfig cfg = small(30, 70);
    cfg.threads = 1;
    const MseTrace one = run_experiment(cfg);
    cfg.threads = 3;
    const MseTrace three = run_experiment(cfg);
    CHECK(format_trace_csv(one) == format_trace_csv(three));
    CHECK(format_steady_state_csv(one) == format_steady_state_csv(three));
}

TEST_CASE("same seed gives identical traces, different seeds differ")
{
    ExperimentConfig cfg = small(30, 20);
    cfg.seed = 9;
    const std::string a = format_trace_csv(run_experiment(cfg));
    const std::string b = format_trace_csv(run_experiment(cfg));
    CHECK(a == b);
    cfg.seed = 10;
    CHECK(format_trace_csv(run_experiment(cfg)) != a);
}

TEST_CASE("algorithms within a trial share truth and noise")
{
    // With a single algorithm the "none" trace must not change.
    ExperimentConfig cfg = small(30, 20);
    const auto all = run_experiment(cfg);
    cfg.algorithms = {Algorithm::none};
    const auto only = run_experiment(cfg);
    CHECK(all.at(Algorithm::none).group(ParamGroup::aoa).mse == only.at(Algorithm::none).group(ParamGroup::aoa).mse);
}

TEST_CASE("diverging algorithm is flagged, not zeroed")
{
    ExperimentConfig cfg = small(20, 10);
    cfg.steps.mu_alpha = 1e308;
    cfg.algorithms = {Algorithm::lms, Algorithm::none};
    const MseTrace trace = run_experiment(cfg);
    const auto& lms = trace.at(Algorithm::lms);
    CHECK(lms.diverged == 10);
    CHECK(lms.all_diverged);
    CHECK(std::isnan(lms.group(ParamGroup::aoa).mse[5]));
    CHECK(trace.at(Algorithm::none).diverged == 0);
    CHECK_THROWS_AS(trace.at(Algorithm::ekf), std::out_of_range);
}

TEST_CASE("sweep")
{
    const ExperimentConfig cfg = small(20, 10);
    CHECK_THROWS_AS(sweep(cfg, SweepParameter::snr_db, {}), std::invalid_argument);

    const auto single = sweep(cfg, SweepParameter::snr_db, {20.0});
    ExperimentConfig at20 = cfg;
    at20.snr_db = 20.0;
    REQUIRE(single.size() == 1);
    CHECK(format_trace_csv(single[0]) == format_trace_csv(run_experiment(at20)));

    const auto arrays = sweep(cfg, SweepParameter::array_size, {8.0, 16.0});
    CHECK(arrays.size() == 2);
    CHECK(apply_sweep_value(cfg, SweepParameter::array_size, 8.0).array.tx_antennas == 8);
    CHECK(apply_sweep_value(cfg, SweepParameter::array_size, 8.0).array.rx_antennas == 8);
    CHECK_THROWS_AS(apply_sweep_value(cfg, SweepParameter::array_size, 8.5), std::invalid_argument);
    // paired truth across sweep values: the frozen baseline sees the same angles
    CHECK(arrays[0].at(Algorithm::none).group(ParamGroup::aoa).mse ==
          arrays[1].at(Algorithm::none).group(ParamGroup::aoa).mse);
}

TEST_CASE("config validation")
{
    ExperimentConfig cfg = small();
    cfg.horizon = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small();
    cfg.trials = 0;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = small();
    cfg.dynamics.rho = 1.2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(parse_algorithm("ukf"), std::invalid_argument);
}
