// SPDX-License-Identifier: Apache-2.0
//
// mmtrack: adaptive beam and channel tracking for mobile mmWave links
// Copyright (C) 2026 mmtrack developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mmtrack/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace mmtrack {

namespace {

enum StreamTag : std::uint64_t { kTruthStream = 0, kNoiseStream = 1, kInitStream = 2, kTerminalStream = 3 };

constexpr std::size_t kTrialsPerBlock = 32;
constexpr std::size_t kGroups = kParamGroups.size();

void squared_errors(const EstimateVector& est, const ChannelState& truth, double* out)
{
    const Eigen::Index L = truth.paths();
    double aoa = 0.0, aod = 0.0, gain = 0.0;
    for (Eigen::Index l = 0; l < L; ++l) {
        aoa += (est.theta(l) - truth.theta[l]) * (est.theta(l) - truth.theta[l]);
        aod += (est.phi(l) - truth.phi[l]) * (est.phi(l) - truth.phi[l]);
        gain += std::norm(est.alpha(l) - truth.alpha[l]);
    }
    out[0] = aoa / L;
    out[1] = aod / L;
    out[2] = gain / L;
}

// Partial sums over one block of trials, per algorithm and group.
struct BlockSums {
    std::vector<double> sum;   // [alg][group][step]
    std::vector<double> sumsq; // [alg][group][step]
    std::vector<double> steady_sum;   // [alg][group]
    std::vector<double> steady_sumsq; // [alg][group]
    std::vector<std::size_t> used;    // [alg]
};

double standard_error(double sum, double sumsq, std::size_t n)
{
    if (n < 2)
        return 0.0;
    const double mean = sum / n;
    const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1));
    return std::sqrt(var / n);
}

} // namespace

std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::lms: return "lms";
    case Algorithm::bilms: return "bilms";
    case Algorithm::ekf: return "ekf";
    case Algorithm::none: return "none";
    }
    return "?";
}

std::string_view to_string(ParamGroup g)
{
    switch (g) {
    case ParamGroup::aoa: return "aoa";
    case ParamGroup::aod: return "aod";
    case ParamGroup::gain: return "gain";
    }
    return "?";
}

std::string_view to_string(InitKind k) { return k == InitKind::perfect ? "perfect" : "imperfect"; }

std::string_view to_string(TerminalInit t)
{
    switch (t) {
    case TerminalInit::scheme: return "scheme";
    case TerminalInit::truth: return "truth";
    case TerminalInit::forward: return "forward";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name)
{
    for (auto a : {Algorithm::lms, Algorithm::bilms, Algorithm::ekf, Algorithm::none})
        if (to_string(a) == name)
            return a;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

InitKind parse_init_kind(std::string_view name)
{
    if (name == "perfect")
        return InitKind::perfect;
    if (name == "imperfect")
        return InitKind::imperfect;
    throw std::invalid_argument("unknown init scheme '" + std::string(name) + "'");
}

TerminalInit parse_terminal_init(std::string_view name)
{
    for (auto t : {TerminalInit::scheme, TerminalInit::truth, TerminalInit::forward})
        if (to_string(t) == name)
            return t;
    throw std::invalid_argument("unknown terminal init '" + std::string(name) + "'");
}

void InitScheme::validate() const
{
    if (!(var_alpha_eps >= 0.0) || !(var_angle_eps >= 0.0) || !std::isfinite(var_alpha_eps) ||
        !std::isfinite(var_angle_eps))
        throw std::invalid_argument("InitScheme: variances must be finite and >= 0");
}

RVector InitScheme::covariance_diagonal(Eigen::Index paths) const
{
    RVector d(4 * paths);
    d.head(2 * paths).setConstant(var_alpha_eps);
    d.tail(2 * paths).setConstant(var_angle_eps);
    return d;
}

void ExperimentConfig::validate() const
{
    array.validate();
    dynamics.validate();
    steps.validate();
    init.validate();
    if (paths < 1)
        throw std::invalid_argument("ExperimentConfig: paths must be >= 1");
    if (horizon < 1)
        throw std::invalid_argument("ExperimentConfig: horizon must be >= 1");
    if (trials < 1)
        throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("ExperimentConfig: snr_db must be a number below +inf or +inf (noiseless)");
    if (!(initial_spread >= 0.0) || !std::isfinite(initial_spread))
        throw std::invalid_argument("ExperimentConfig: initial_spread must be finite and >= 0");
    if (algorithms.empty())
        throw std::invalid_argument("ExperimentConfig: at least one algorithm required");
}

ExperimentConfig default_experiment()
{
    ExperimentConfig cfg;
    cfg.array.rx_antennas = 16;
    cfg.array.tx_antennas = 16;
    cfg.array.spacing_ratio = 0.5;
    cfg.array.theta_point = deg_to_rad(45.0);
    cfg.array.phi_point = deg_to_rad(45.0);
    cfg.dynamics.rho = 0.995;
    cfg.dynamics.var_theta = deg_to_rad(0.5) * deg_to_rad(0.5);
    cfg.dynamics.var_phi = cfg.dynamics.var_theta;
    cfg.steps = StepSizes{0.1, 1e-4, 1e-4};
    cfg.paths = 1;
    cfg.snr_db = 30.0;
    cfg.initial_spread = deg_to_rad(5.0);
    return cfg;
}

const AlgorithmTrace& MseTrace::at(Algorithm a) const
{
    for (const auto& t : algorithms)
        if (t.algorithm == a)
            return t;
    throw std::out_of_range("MseTrace: algorithm '" + std::string(to_string(a)) + "' was not run");
}

std::size_t steady_state_window(std::size_t horizon)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(horizon))));
}

TrialData simulate_trial(const ExperimentConfig& cfg, std::uint64_t trial)
{
    Rng truth_rng = make_substream(cfg.seed, trial, kTruthStream);
    Rng noise_rng = make_substream(cfg.seed, trial, kNoiseStream);
    std::normal_distribution<double> unit;
    std::uniform_real_distribution<double> spread(-cfg.initial_spread, cfg.initial_spread);

    const Eigen::Index L = cfg.paths;
    ChannelState x;
    x.alpha.resize(L);
    x.theta.resize(L);
    x.phi.resize(L);
    for (Eigen::Index l = 0; l < L; ++l) {
        const double re = unit(truth_rng);
        const double im = unit(truth_rng);
        x.alpha[l] = cdouble{re, im} / std::numbers::sqrt2;
    }
    for (Eigen::Index l = 0; l < L; ++l)
        x.theta[l] = cfg.array.theta_point + spread(truth_rng);
    for (Eigen::Index l = 0; l < L; ++l)
        x.phi[l] = cfg.array.phi_point + spread(truth_rng);
    x.k = 1;

    const double n0 = cfg.noise_psd();
    TrialData data;
    data.truth.reserve(cfg.horizon);
    data.measurements.reserve(cfg.horizon);
    for (std::size_t k = 0; k < cfg.horizon; ++k) {
        if (k > 0)
            x = evolve(x, cfg.dynamics, truth_rng);
        data.truth.push_back(x);
        data.measurements.push_back(observe(x, cfg.array, n0, noise_rng));
    }
    return data;
}

EstimateVector init_trial(const ChannelState& truth, const InitScheme& scheme, Rng& rng)
{
    EstimateVector est = EstimateVector::from_state(truth);
    if (scheme.kind == InitKind::perfect)
        return est;
    std::normal_distribution<double> unit;
    const RVector sd = scheme.covariance_diagonal(truth.paths()).cwiseSqrt();
    for (Eigen::Index i = 0; i < sd.size(); ++i)
        est.values()[i] += sd[i] * unit(rng);
    return est;
}

std::vector<EstimateVector> run_algorithm(Algorithm algorithm, const ExperimentConfig& cfg, const TrialData& data,
                                          const EstimateVector& initial, const EstimateVector& terminal)
{
    const std::size_t K = data.measurements.size();
    switch (algorithm) {
    case Algorithm::none:
        return std::vector<EstimateVector>(K, initial);
    case Algorithm::lms:
        return lms_run(initial, data.measurements, cfg.steps, cfg.array);
    case Algorithm::bilms: {
        BilmsBuffer buffer;
        buffer.measurements = data.measurements;
        if (cfg.terminal_init == TerminalInit::forward) {
            auto forward = lms_run(initial, data.measurements, cfg.steps, cfg.array);
            buffer.terminal_init = forward.back();
        } else {
            buffer.terminal_init = terminal;
        }
        return bilms_run(buffer, cfg.steps, cfg.array, initial);
    }
    case Algorithm::ekf: {
        const Eigen::Index n = 4 * initial.paths();
        RMatrix P0 = cfg.init.kind == InitKind::imperfect
                         ? RMatrix(cfg.init.covariance_diagonal(initial.paths()).asDiagonal())
                         : RMatrix(1e-6 * RMatrix::Identity(n, n));
        EkfTracker ekf = make_ekf(initial, P0, cfg.dynamics, cfg.noise_psd(), cfg.array);
        std::vector<EstimateVector> out;
        out.reserve(K);
        out.push_back(initial);
        for (std::size_t k = 1; k < K; ++k) {
            ekf = ekf_step(ekf, data.measurements[k]);
            out.push_back(ekf.estimate);
        }
        return out;
    }
    }
    throw std::logic_error("run_algorithm: unhandled algorithm");
}

MseTrace run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    const std::size_t K = cfg.horizon;
    const std::size_t A = cfg.algorithms.size();
    const std::size_t window = steady_state_window(K);
    const std::size_t blocks = (cfg.trials + kTrialsPerBlock - 1) / kTrialsPerBlock;

    std::vector<BlockSums> partial(blocks);
    std::vector<std::size_t> diverged(A * blocks, 0);

    auto run_block = [&](std::size_t b) {
        BlockSums& s = partial[b];
        s.sum.assign(A * kGroups * K, 0.0);
        s.sumsq.assign(A * kGroups * K, 0.0);
        s.steady_sum.assign(A * kGroups, 0.0);
        s.steady_sumsq.assign(A * kGroups, 0.0);
        s.used.assign(A, 0);

        std::vector<double> errs(kGroups * K);
        const std::size_t first = b * kTrialsPerBlock;
        const std::size_t last = std::min(cfg.trials, first + kTrialsPerBlock);
        for (std::size_t trial = first; trial < last; ++trial) {
            const TrialData data = simulate_trial(cfg, trial);
            Rng init_rng = make_substream(cfg.seed, trial, kInitStream);
            Rng terminal_rng = make_substream(cfg.seed, trial, kTerminalStream);
            const EstimateVector initial = init_trial(data.truth.front(), cfg.init, init_rng);
            const EstimateVector terminal = cfg.terminal_init == TerminalInit::truth
                                                ? EstimateVector::from_state(data.truth.back())
                                                : init_trial(data.truth.back(), cfg.init, terminal_rng);

            for (std::size_t a = 0; a < A; ++a) {
                std::vector<EstimateVector> est;
                try {
                    est = run_algorithm(cfg.algorithms[a], cfg, data, initial, terminal);
                } catch (const DivergedError&) {
                    ++diverged[a * blocks + b];
                    continue;
                } catch (const NumericalError&) {
                    ++diverged[a * blocks + b];
                    continue;
                }
                double e[kGroups];
                for (std::size_t k = 0; k < K; ++k) {
                    squared_errors(est[k], data.truth[k], e);
                    for (std::size_t g = 0; g < kGroups; ++g)
                        errs[g * K + k] = e[g];
                }
                for (std::size_t g = 0; g < kGroups; ++g) {
                    double* sum = &s.sum[(a * kGroups + g) * K];
                    double* sumsq = &s.sumsq[(a * kGroups + g) * K];
                    double steady = 0.0;
                    for (std::size_t k = 0; k < K; ++k) {
                        const double v = errs[g * K + k];
                        sum[k] += v;
                        sumsq[k] += v * v;
                        if (k >= K - window)
                            steady += v;
                    }
                    steady /= static_cast<double>(window);
                    s.steady_sum[a * kGroups + g] += steady;
                    s.steady_sumsq[a * kGroups + g] += steady * steady;
                }
                ++s.used[a];
            }
        }
    };

    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));
    if (threads <= 1) {
        for (std::size_t b = 0; b < blocks; ++b)
            run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < blocks; b = next++)
                    run_block(b);
            });
    }

    // Reduction in block order keeps results independent of scheduling.
    MseTrace trace;
    trace.horizon = K;
    trace.trials = cfg.trials;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t a = 0; a < A; ++a) {
        AlgorithmTrace at;
        at.algorithm = cfg.algorithms[a];
        std::size_t used = 0;
        for (std::size_t b = 0; b < blocks; ++b) {
            at.diverged += diverged[a * blocks + b];
            used += partial[b].used[a];
        }
        at.all_diverged = used == 0;
        for (std::size_t g = 0; g < kGroups; ++g) {
            GroupTrace& gt = at.groups[g];
            gt.mse.assign(K, nan);
            gt.stderr_.assign(K, nan);
            gt.steady = {nan, nan};
            if (used == 0)
                continue;
            for (std::size_t k = 0; k < K; ++k) {
                double sum = 0.0, sumsq = 0.0;
                for (std::size_t b = 0; b < blocks; ++b) {
                    sum += partial[b].sum[(a * kGroups + g) * K + k];
                    sumsq += partial[b].sumsq[(a * kGroups + g) * K + k];
                }
                gt.mse[k] = sum / used;
                gt.stderr_[k] = standard_error(sum, sumsq, used);
            }
            double sum = 0.0, sumsq = 0.0;
            for (std::size_t b = 0; b < blocks; ++b) {
                sum += partial[b].steady_sum[a * kGroups + g];
                sumsq += partial[b].steady_sumsq[a * kGroups + g];
            }
            gt.steady = {sum / used, standard_error(sum, sumsq, used)};
        }
        trace.algorithms.push_back(std::move(at));
    }
    return trace;
}

SweepParameter parse_sweep_parameter(std::string_view name)
{
    if (name == "snr_db")
        return SweepParameter::snr_db;
    if (name == "array_size")
        return SweepParameter::array_size;
    throw std::invalid_argument("unknown sweep parameter '" + std::string(name) + "'");
}

std::string_view to_string(SweepParameter p) { return p == SweepParameter::snr_db ? "snr_db" : "array_size"; }

ExperimentConfig apply_sweep_value(ExperimentConfig cfg, SweepParameter parameter, double value)
{
    if (parameter == SweepParameter::snr_db) {
        cfg.snr_db = value;
    } else {
        if (!(value >= 1.0) || value != std::floor(value) || value > std::numeric_limits<int>::max())
            throw std::invalid_argument("sweep: array_size values must be positive integers");
        cfg.array.rx_antennas = static_cast<int>(value);
        cfg.array.tx_antennas = static_cast<int>(value);
    }
    return cfg;
}

std::vector<MseTrace> sweep(const ExperimentConfig& cfg, SweepParameter parameter, const std::vector<double>& values)
{
    if (values.empty())
        throw std::invalid_argument("sweep: values must be non-empty");
    std::vector<MseTrace> out;
    out.reserve(values.size());
    for (double v : values)
        out.push_back(run_experiment(apply_sweep_value(cfg, parameter, v)));
    return out;
}

} // namespace mmtrack
