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

#include "mmtrack/config.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace mmtrack {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> out;
    s = trim(s);
    if (s.empty())
        return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

double parse_double(std::string_view key, std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
    return v;
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view text)
{
    text = trim(text);
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(std::string(key), "expected an integer, got '" + std::string(text) + "'");
    return v;
}

template <typename Int>
std::string format_integer(Int v)
{
    return std::to_string(v);
}

struct Field {
    std::string_view key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field double_field(std::string_view key, T RunConfig::*member)
{
    return {key, [key, member](RunConfig& c, std::string_view v) { c.*member = parse_double(key, v); },
            [member](const RunConfig& c) { return format_double(c.*member); }};
}

template <typename T>
Field integer_field(std::string_view key, T RunConfig::*member)
{
    return {key, [key, member](RunConfig& c, std::string_view v) { c.*member = parse_integer<T>(key, v); },
            [member](const RunConfig& c) { return format_integer(c.*member); }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back(integer_field("rx_antennas", &RunConfig::rx_antennas));
        f.push_back(integer_field("tx_antennas", &RunConfig::tx_antennas));
        f.push_back(double_field("spacing_ratio", &RunConfig::spacing_ratio));
        f.push_back(double_field("theta_point_deg", &RunConfig::theta_point_deg));
        f.push_back(double_field("phi_point_deg", &RunConfig::phi_point_deg));
        f.push_back(integer_field("paths", &RunConfig::paths));
        f.push_back(double_field("rho", &RunConfig::rho));
        f.push_back(double_field("sigma_theta_deg", &RunConfig::sigma_theta_deg));
        f.push_back(double_field("sigma_phi_deg", &RunConfig::sigma_phi_deg));
        f.push_back(double_field("mu_alpha", &RunConfig::mu_alpha));
        f.push_back(double_field("mu_theta", &RunConfig::mu_theta));
        f.push_back(double_field("mu_phi", &RunConfig::mu_phi));
        f.push_back(double_field("snr_db", &RunConfig::snr_db));
        f.push_back(integer_field("horizon", &RunConfig::horizon));
        f.push_back(integer_field("trials", &RunConfig::trials));
        f.push_back({"init",
                     [](RunConfig& c, std::string_view v) {
                         try {
                             c.init = parse_init_kind(trim(v));
                         } catch (const std::invalid_argument& e) {
                             throw ConfigError("init", e.what());
                         }
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.init)); }});
        f.push_back(double_field("sigma_eps_alpha", &RunConfig::sigma_eps_alpha));
        f.push_back(double_field("sigma_eps_angle_deg", &RunConfig::sigma_eps_angle_deg));
        f.push_back({"terminal_init",
                     [](RunConfig& c, std::string_view v) {
                         try {
                             c.terminal_init = parse_terminal_init(trim(v));
                         } catch (const std::invalid_argument& e) {
                             throw ConfigError("terminal_init", e.what());
                         }
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.terminal_init)); }});
        f.push_back({"algorithms",
                     [](RunConfig& c, std::string_view v) {
                         std::vector<Algorithm> algs;
                         for (auto name : split_list(v)) {
                             try {
                                 algs.push_back(parse_algorithm(name));
                             } catch (const std::invalid_argument& e) {
                                 throw ConfigError("algorithms", e.what());
                             }
                         }
                         c.algorithms = std::move(algs);
                     },
                     [](const RunConfig& c) {
                         std::string s;
                         for (std::size_t i = 0; i < c.algorithms.size(); ++i)
                             s += (i ? "," : "") + std::string(to_string(c.algorithms[i]));
                         return s;
                     }});
        f.push_back(double_field("initial_spread_deg", &RunConfig::initial_spread_deg));
        f.push_back(integer_field("seed", &RunConfig::seed));
        f.push_back({"sweep",
                     [](RunConfig& c, std::string_view v) {
                         v = trim(v);
                         if (v == "none") {
                             c.sweep.reset();
                             return;
                         }
                         try {
                             c.sweep = parse_sweep_parameter(v);
                         } catch (const std::invalid_argument& e) {
                             throw ConfigError("sweep", e.what());
                         }
                     },
                     [](const RunConfig& c) { return c.sweep ? std::string(to_string(*c.sweep)) : std::string("none"); }});
        f.push_back({"sweep_values",
                     [](RunConfig& c, std::string_view v) {
                         std::vector<double> values;
                         for (auto item : split_list(v))
                             values.push_back(parse_double("sweep_values", item));
                         c.sweep_values = std::move(values);
                     },
                     [](const RunConfig& c) {
                         std::string s;
                         for (std::size_t i = 0; i < c.sweep_values.size(); ++i)
                             s += (i ? "," : "") + format_double(c.sweep_values[i]);
                         return s;
                     }});
        return f;
    }();
    return table;
}

const Field& field(std::string_view key)
{
    for (const auto& f : fields())
        if (f.key == key)
            return f;
    throw ConfigError(std::string(key), "unknown key");
}

void require(bool ok, std::string_view key, const std::string& message)
{
    if (!ok)
        throw ConfigError(std::string(key), message);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

// Only the cosine of a pointing angle matters, so fold it into [0, 180].
double fold_pointing_deg(double deg)
{
    double d = std::fmod(deg, 360.0);
    if (d < 0.0)
        d += 360.0;
    return d > 180.0 ? 360.0 - d : d;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

} // namespace

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

const std::vector<std::string_view>& config_keys()
{
    static const std::vector<std::string_view> keys = [] {
        std::vector<std::string_view> k;
        for (const auto& f : fields())
            k.push_back(f.key);
        return k;
    }();
    return keys;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value)
{
    field(trim(key)).set(cfg, value);
}

std::string get_config_value(const RunConfig& cfg, std::string_view key) { return field(trim(key)).get(cfg); }

void RunConfig::validate() const
{
    require(rx_antennas >= 1, "rx_antennas", "must be >= 1");
    require(tx_antennas >= 1, "tx_antennas", "must be >= 1");
    require(finite_pos(spacing_ratio), "spacing_ratio", "must be finite and > 0");
    require(std::isfinite(theta_point_deg), "theta_point_deg", "must be finite");
    require(std::isfinite(phi_point_deg), "phi_point_deg", "must be finite");
    const double tp = fold_pointing_deg(theta_point_deg);
    const double pp = fold_pointing_deg(phi_point_deg);
    require(tp > 0.0 && tp < 180.0, "theta_point_deg", "endfire pointing (0 or 180 deg) is not supported");
    require(pp > 0.0 && pp < 180.0, "phi_point_deg", "endfire pointing (0 or 180 deg) is not supported");
    require(paths >= 1, "paths", "must be >= 1");
    require(rho >= 0.0 && rho <= 1.0, "rho", "must lie in [0, 1]");
    require(finite_nonneg(sigma_theta_deg), "sigma_theta_deg", "must be finite and >= 0");
    require(finite_nonneg(sigma_phi_deg), "sigma_phi_deg", "must be finite and >= 0");
    require(finite_pos(mu_alpha), "mu_alpha", "must be finite and > 0");
    require(finite_pos(mu_theta), "mu_theta", "must be finite and > 0");
    require(finite_pos(mu_phi), "mu_phi", "must be finite and > 0");
    require(!std::isnan(snr_db) && snr_db != -std::numeric_limits<double>::infinity(), "snr_db",
            "must be a number or inf (noiseless)");
    require(horizon >= 1, "horizon", "must be >= 1");
    require(trials >= 1, "trials", "must be >= 1");
    require(finite_nonneg(sigma_eps_alpha), "sigma_eps_alpha", "must be finite and >= 0");
    require(finite_nonneg(sigma_eps_angle_deg), "sigma_eps_angle_deg", "must be finite and >= 0");
    require(!algorithms.empty(), "algorithms", "at least one algorithm required");
    for (std::size_t i = 0; i < algorithms.size(); ++i)
        for (std::size_t j = i + 1; j < algorithms.size(); ++j)
            require(algorithms[i] != algorithms[j], "algorithms", "duplicate entry");
    require(finite_nonneg(initial_spread_deg), "initial_spread_deg", "must be finite and >= 0");
    if (sweep) {
        require(!sweep_values.empty(), "sweep_values", "must be non-empty when sweep is set");
        for (double v : sweep_values) {
            require(std::isfinite(v), "sweep_values", "must be finite");
            if (*sweep == SweepParameter::array_size)
                require(v >= 1.0 && v == std::floor(v) && v <= std::numeric_limits<int>::max(), "sweep_values",
                        "array sizes must be positive integers");
        }
    }
}

ExperimentConfig RunConfig::to_experiment() const
{
    validate();
    ExperimentConfig e;
    e.array.rx_antennas = rx_antennas;
    e.array.tx_antennas = tx_antennas;
    e.array.spacing_ratio = spacing_ratio;
    e.array.theta_point = deg_to_rad(fold_pointing_deg(theta_point_deg));
    e.array.phi_point = deg_to_rad(fold_pointing_deg(phi_point_deg));
    e.paths = paths;
    e.dynamics.rho = rho;
    e.dynamics.var_theta = deg_to_rad(sigma_theta_deg) * deg_to_rad(sigma_theta_deg);
    e.dynamics.var_phi = deg_to_rad(sigma_phi_deg) * deg_to_rad(sigma_phi_deg);
    e.steps = StepSizes{mu_alpha, mu_theta, mu_phi};
    e.snr_db = snr_db;
    e.horizon = horizon;
    e.trials = trials;
    e.init.kind = init;
    e.init.var_alpha_eps = sigma_eps_alpha * sigma_eps_alpha;
    e.init.var_angle_eps = deg_to_rad(sigma_eps_angle_deg) * deg_to_rad(sigma_eps_angle_deg);
    e.terminal_init = terminal_init;
    e.algorithms = algorithms;
    e.initial_spread = deg_to_rad(initial_spread_deg);
    e.seed = seed;
    e.validate();
    return e;
}

RunConfig parse_config_text(std::string_view text, RunConfig base)
{
    RunConfig cfg = std::move(base);
    std::vector<std::string> seen;
    bool in_run_section = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line != "[run]")
                throw ConfigError("", "line " + std::to_string(line_no) + ": unknown section " + std::string(line));
            in_run_section = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (in_run_section) {
            if (key != "tool_version" && key != "wall_clock_seconds" && key != "outputs")
                throw ConfigError(std::string(key), "unknown key in [run] section");
            continue;
        }
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ConfigError(std::string(key), "duplicate key");
        seen.emplace_back(key);
        set_config_value(cfg, key, value);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), std::move(base));
}

std::string format_config(const RunConfig& cfg)
{
    std::string out = "# mmtrack run configuration (angles in degrees, SNR in dB)\n";
    for (const auto& f : fields())
        out += std::string(f.key) + " = " + f.get(cfg) + "\n";
    return out;
}

std::string format_manifest(const RunManifest& manifest)
{
    std::string out = format_config(manifest.config);
    out += "\n[run]\n";
    out += "tool_version = " + manifest.tool_version + "\n";
    out += "wall_clock_seconds = " + format_double(manifest.wall_clock_seconds) + "\n";
    std::string outputs;
    for (std::size_t i = 0; i < manifest.outputs.size(); ++i)
        outputs += (i ? "," : "") + manifest.outputs[i];
    out += "outputs = " + outputs + "\n";
    return out;
}

std::string format_trace_csv(const MseTrace& trace)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (std::size_t k = 0; k < trace.horizon; ++k) {
        for (const auto& at : trace.algorithms) {
            for (auto g : kParamGroups) {
                const auto& gt = at.group(g);
                out += std::to_string(k + 1);
                out += ',';
                out += to_string(at.algorithm);
                out += ',';
                out += to_string(g);
                out += ',';
                out += format_double(gt.mse[k]);
                out += ',';
                out += format_double(gt.stderr_[k]);
                out += ',';
                out += std::to_string(at.diverged);
                out += '\n';
            }
        }
    }
    return out;
}

std::string format_steady_state_csv(const MseTrace& trace)
{
    std::string out = "algorithm,param_group,mse,stderr,diverged_count,window_steps\n";
    const std::size_t window = steady_state_window(trace.horizon);
    for (const auto& at : trace.algorithms) {
        for (auto g : kParamGroups) {
            const auto& s = at.group(g).steady;
            out += std::string(to_string(at.algorithm)) + "," + std::string(to_string(g)) + "," +
                   format_double(s.mean) + "," + format_double(s.stderr_) + "," + std::to_string(at.diverged) + "," +
                   std::to_string(window) + "\n";
        }
    }
    return out;
}

RunManifest run_and_write(const RunConfig& cfg, const std::filesystem::path& out_dir)
{
    const auto started = std::chrono::steady_clock::now();
    const ExperimentConfig exp = cfg.to_experiment();

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw IoError("cannot create output directory '" + out_dir.string() + "'");

    RunManifest manifest;
    manifest.config = cfg;

    if (!cfg.sweep) {
        const MseTrace trace = run_experiment(exp);
        write_file(out_dir / "mse.csv", format_trace_csv(trace));
        write_file(out_dir / "steady_state.csv", format_steady_state_csv(trace));
        manifest.outputs = {"mse.csv", "steady_state.csv"};
    } else {
        const auto traces = sweep(exp, *cfg.sweep, cfg.sweep_values);
        std::string index = "value,mse_file,steady_state_file\n";
        const std::string prefix(to_string(*cfg.sweep));
        for (std::size_t i = 0; i < traces.size(); ++i) {
            const std::string value = format_double(cfg.sweep_values[i]);
            const std::string mse_name = "mse_" + prefix + "_" + value + ".csv";
            const std::string ss_name = "steady_state_" + prefix + "_" + value + ".csv";
            write_file(out_dir / mse_name, format_trace_csv(traces[i]));
            write_file(out_dir / ss_name, format_steady_state_csv(traces[i]));
            index += value + "," + mse_name + "," + ss_name + "\n";
            manifest.outputs.push_back(mse_name);
            manifest.outputs.push_back(ss_name);
        }
        write_file(out_dir / "index.csv", index);
        manifest.outputs.push_back("index.csv");
    }

    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.outputs.push_back("manifest.cfg");
    write_file(out_dir / "manifest.cfg", format_manifest(manifest));
    return manifest;
}

} // namespace mmtrack
