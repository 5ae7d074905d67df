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

#ifndef MMTRACK_CONFIG_HPP
#define MMTRACK_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mmtrack/experiments.hpp"

namespace mmtrack {

// Configuration problem tied to one key (empty for file-level failures).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

// Unreadable config file or unwritable output location.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Run configuration in boundary units: angles and their deviations in
// degrees, SNR in dB. Defaults are the reference operating point.
struct RunConfig {
    int rx_antennas = 16;
    int tx_antennas = 16;
    double spacing_ratio = 0.5;
    double theta_point_deg = 45.0;
    double phi_point_deg = 45.0;
    int paths = 1;
    double rho = 0.995;
    double sigma_theta_deg = 0.5;
    double sigma_phi_deg = 0.5;
    double mu_alpha = 0.1;
    double mu_theta = 1e-4;
    double mu_phi = 1e-4;
    double snr_db = 30.0;
    std::uint64_t horizon = 500;
    std::uint64_t trials = 500;
    InitKind init = InitKind::perfect;
    double sigma_eps_alpha = 0.5;
    double sigma_eps_angle_deg = 0.5;
    TerminalInit terminal_init = TerminalInit::scheme;
    std::vector<Algorithm> algorithms{Algorithm::lms, Algorithm::bilms, Algorithm::ekf, Algorithm::none};
    double initial_spread_deg = 5.0;
    std::uint64_t seed = 1;
    std::optional<SweepParameter> sweep;
    std::vector<double> sweep_values;

    bool operator==(const RunConfig&) const = default;

    /// Throws ConfigError naming the first offending key.
    void validate() const;
    ExperimentConfig to_experiment() const;
};

// Every accepted key, in emission order.
const std::vector<std::string_view>& config_keys();

// Sets one key from its textual value. Throws ConfigError on unknown keys
// or malformed values; range checks happen in RunConfig::validate().
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& cfg, std::string_view key);

// Parses `key = value` lines (`#` comments). A trailing `[run]` section
// holds manifest metadata and is skipped.
RunConfig parse_config_text(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

// Resolved configuration with every key materialized.
std::string format_config(const RunConfig& cfg);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kOutDirEnv = "MMTRACK_OUT_DIR";

struct RunManifest {
    RunConfig config;
    std::string tool_version{kToolVersion};
    double wall_clock_seconds = 0.0;
    std::vector<std::string> outputs;
};

std::string format_manifest(const RunManifest& manifest);

inline constexpr std::string_view kCsvHeader = "step,algorithm,param_group,mse,stderr,diverged_count";

std::string format_trace_csv(const MseTrace& trace);
std::string format_steady_state_csv(const MseTrace& trace);

/// Runs the configured experiment (or sweep) and writes mse.csv,
/// steady_state.csv and manifest.cfg into `out_dir`; sweeps write one CSV
/// pair per value plus index.csv. Throws on failure.
RunManifest run_and_write(const RunConfig& cfg, const std::filesystem::path& out_dir);

} // namespace mmtrack

#endif
