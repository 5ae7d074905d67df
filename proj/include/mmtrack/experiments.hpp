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

#ifndef MMTRACK_EXPERIMENTS_HPP
#define MMTRACK_EXPERIMENTS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mmtrack/core_model.hpp"
#include "mmtrack/trackers.hpp"

namespace mmtrack {

enum class InitKind { perfect, imperfect };

struct InitScheme {
    InitKind kind = InitKind::perfect;
    double var_alpha_eps = 0.0; // per real component
    double var_angle_eps = 0.0; // rad^2

    void validate() const;
    // Lambda = diag[var_alpha_eps 1_2L; var_angle_eps 1_2L]
    RVector covariance_diagonal(Eigen::Index paths) const;
    bool operator==(const InitScheme&) const = default;
};

enum class Algorithm { lms, bilms, ekf, none };
enum class ParamGroup { aoa, aod, gain };

// Source of the window-end estimate that seeds the BiLMS backward pass.
enum class TerminalInit { scheme, truth, forward };

inline constexpr std::array<ParamGroup, 3> kParamGroups{ParamGroup::aoa, ParamGroup::aod, ParamGroup::gain};

std::string_view to_string(Algorithm a);
std::string_view to_string(ParamGroup g);
std::string_view to_string(InitKind k);
std::string_view to_string(TerminalInit t);
Algorithm parse_algorithm(std::string_view name);
InitKind parse_init_kind(std::string_view name);
TerminalInit parse_terminal_init(std::string_view name);

struct ExperimentConfig {
    ArrayConfig array;
    DynamicsParams dynamics;
    StepSizes steps;
    int paths = 1;
    double snr_db = 30.0; // +inf means noiseless
    std::size_t horizon = 500;
    std::size_t trials = 500;
    InitScheme init;
    TerminalInit terminal_init = TerminalInit::scheme;
    std::vector<Algorithm> algorithms{Algorithm::lms, Algorithm::bilms, Algorithm::ekf, Algorithm::none};
    double initial_spread = 0.0; // half-width of the uniform initial angle draw around the pointing angles (rad)
    std::uint64_t seed = 1;
    unsigned threads = 0; // 0 = hardware concurrency; never changes results

    void validate() const;
    double noise_psd() const { return noise_psd_for_snr(array, snr_db); }
};

// Reference operating point: 16x16 ULAs at half-wavelength pointing at 45 deg,
// 30 dB SNR, rho = 0.995, 0.5 deg angular random walk, one path.
ExperimentConfig default_experiment();

struct SteadyState {
    double mean = 0.0;
    double stderr_ = 0.0;
};

struct GroupTrace {
    std::vector<double> mse;    // per step
    std::vector<double> stderr_; // Monte-Carlo standard error per step
    SteadyState steady;          // over the final 20% of the horizon
};

struct AlgorithmTrace {
    Algorithm algorithm = Algorithm::none;
    std::size_t diverged = 0;
    bool all_diverged = false;
    std::array<GroupTrace, 3> groups;

    const GroupTrace& group(ParamGroup g) const { return groups[static_cast<std::size_t>(g)]; }
};

struct MseTrace {
    std::size_t horizon = 0;
    std::size_t trials = 0;
    std::vector<AlgorithmTrace> algorithms;

    const AlgorithmTrace& at(Algorithm a) const;
};

// Number of trailing steps that define the steady-state window.
std::size_t steady_state_window(std::size_t horizon);

// Ground-truth trajectory and matching observations for one trial.
struct TrialData {
    std::vector<ChannelState> truth;
    std::vector<Measurement> measurements;
};

TrialData simulate_trial(const ExperimentConfig& cfg, std::uint64_t trial);

// x_1 itself for a perfect scheme, x_1 + eps with eps ~ N(0, Lambda) otherwise.
EstimateVector init_trial(const ChannelState& truth, const InitScheme& scheme, Rng& rng);

// Estimates x_1..x_K of one algorithm on one trial. Throws DivergedError or
// NumericalError when the tracker fails.
std::vector<EstimateVector> run_algorithm(Algorithm algorithm, const ExperimentConfig& cfg, const TrialData& data,
                                          const EstimateVector& initial, const EstimateVector& terminal);

MseTrace run_experiment(const ExperimentConfig& cfg);

enum class SweepParameter { snr_db, array_size };
SweepParameter parse_sweep_parameter(std::string_view name);
std::string_view to_string(SweepParameter p);

ExperimentConfig apply_sweep_value(ExperimentConfig cfg, SweepParameter parameter, double value);
std::vector<MseTrace> sweep(const ExperimentConfig& cfg, SweepParameter parameter, const std::vector<double>& values);

} // namespace mmtrack

#endif
