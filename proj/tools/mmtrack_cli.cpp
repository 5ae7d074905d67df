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

// Command-line front end. Talks to the simulator only through the C API.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "mmtrack/mmtrack.h"

namespace {

struct ConfigDeleter {
    void operator()(mmt_config* c) const { mmt_config_free(c); }
};
using ConfigPtr = std::unique_ptr<mmt_config, ConfigDeleter>;

int report(mmt_status status, const std::string& context)
{
    std::fprintf(stderr, "mmtrack: %s: %s (%s)\n", context.c_str(), mmt_last_error(), mmt_status_string(status));
    return 2;
}

std::string default_out_dir()
{
    if (const char* env = std::getenv("MMTRACK_OUT_DIR"); env && *env)
        return env;
    return "mmtrack_out";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mmtrack: Monte-Carlo beam and channel tracking experiments (LMS, BiLMS, EKF)"};
    app.set_version_flag("--version", std::string(mmt_version()));

    std::string config_path;
    std::string out_dir = default_out_dir();
    std::optional<std::string> seed, trials, horizon, snr_db, init, algorithms, sweep, values;
    std::vector<std::string> sets;
    bool print_config = false;
    bool list_keys = false;

    app.add_option("-c,--config", config_path, "Config file (key = value lines)")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_dir, "Output directory (default: $MMTRACK_OUT_DIR or ./mmtrack_out)");
    app.add_option("--seed", seed, "Master seed (u64)");
    app.add_option("--trials", trials, "Monte-Carlo trials");
    app.add_option("--horizon", horizon, "Steps per trial");
    app.add_option("--snr-db", snr_db, "SNR = M*N/N0 in dB");
    app.add_option("--init", init, "Initialization scheme: perfect | imperfect");
    app.add_option("--algorithms", algorithms, "Comma list from lms,bilms,ekf,none");
    app.add_option("--sweep", sweep, "Sweep parameter: snr_db | array_size | none");
    app.add_option("--values", values, "Comma list of sweep values");
    app.add_option("--set", sets, "Override any config key: --set key=value (repeatable)");
    app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");
    app.add_flag("--list-keys", list_keys, "List accepted config keys and exit");

    CLI11_PARSE(app, argc, argv);

    if (list_keys) {
        for (size_t i = 0; i < mmt_config_key_count(); ++i)
            std::printf("%s\n", mmt_config_key_name(i));
        return 0;
    }

    mmt_config* raw = nullptr;
    mmt_status st = config_path.empty() ? mmt_config_create(&raw) : mmt_config_load(config_path.c_str(), &raw);
    if (st != MMT_OK)
        return report(st, config_path.empty() ? "creating config" : "loading " + config_path);
    ConfigPtr cfg(raw);

    std::vector<std::pair<std::string, std::string>> overrides;
    auto push = [&](const char* key, const std::optional<std::string>& v) {
        if (v)
            overrides.emplace_back(key, *v);
    };
    push("seed", seed);
    push("trials", trials);
    push("horizon", horizon);
    push("snr_db", snr_db);
    push("init", init);
    push("algorithms", algorithms);
    push("sweep", sweep);
    push("sweep_values", values);
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "mmtrack: --set expects key=value, got '%s'\n", s.c_str());
            return 2;
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [key, value] : overrides)
        if ((st = mmt_config_set(cfg.get(), key.c_str(), value.c_str())) != MMT_OK)
            return report(st, "override " + key);

    if ((st = mmt_config_validate(cfg.get())) != MMT_OK)
        return report(st, "invalid configuration");

    if (print_config) {
        size_t needed = 0;
        mmt_config_format(cfg.get(), nullptr, 0, &needed);
        std::string text(needed, '\0');
        if ((st = mmt_config_format(cfg.get(), text.data(), text.size(), &needed)) != MMT_OK)
            return report(st, "formatting config");
        text.resize(needed - 1);
        std::fputs(text.c_str(), stdout);
        return 0;
    }

    double seconds = 0.0;
    if ((st = mmt_run_and_write(cfg.get(), out_dir.c_str(), &seconds)) != MMT_OK)
        return report(st, "run");
    std::printf("wrote results to %s (%.2f s)\n", out_dir.c_str(), seconds);
    return 0;
}
