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

#include "mmtrack/mmtrack.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "mmtrack/config.hpp"

struct mmt_config {
    mmtrack::RunConfig cfg;
};

struct mmt_trace {
    mmtrack::MseTrace trace;
};

namespace {

thread_local std::string g_last_error;

mmt_status fail(mmt_status status, const std::string& message)
{
    g_last_error = message;
    return status;
}

// Maps exceptions from the C++ core onto status codes.
template <typename Fn>
mmt_status guarded(Fn&& fn)
{
    try {
        return fn();
    } catch (const mmtrack::IoError& e) {
        return fail(MMT_ERR_IO, e.what());
    } catch (const mmtrack::ConfigError& e) {
        return fail(MMT_ERR_CONFIG, e.what());
    } catch (const mmtrack::DivergedError& e) {
        return fail(MMT_ERR_DIVERGED, e.what());
    } catch (const mmtrack::NumericalError& e) {
        return fail(MMT_ERR_NUMERICAL, e.what());
    } catch (const std::out_of_range& e) {
        return fail(MMT_ERR_NOT_FOUND, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(MMT_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MMT_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MMT_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MMT_ERR_INTERNAL, "unknown error");
    }
}

mmt_status copy_out(const std::string& value, char* buf, size_t capacity, size_t* needed)
{
    if (needed)
        *needed = value.size() + 1;
    if (!buf || capacity < value.size() + 1)
        return fail(MMT_ERR_BUFFER_TOO_SMALL, "output buffer too small");
    std::memcpy(buf, value.c_str(), value.size() + 1);
    return MMT_OK;
}

const mmtrack::GroupTrace& find_group(const mmt_trace* t, const char* algorithm, const char* group)
{
    const auto& at = t->trace.at(mmtrack::parse_algorithm(algorithm));
    for (auto g : mmtrack::kParamGroups)
        if (mmtrack::to_string(g) == group)
            return at.group(g);
    throw std::out_of_range(std::string("unknown parameter group '") + group + "'");
}

} // namespace

extern "C" {

const char* mmt_version(void) { return mmtrack::kToolVersion.data(); }

const char* mmt_status_string(mmt_status status)
{
    switch (status) {
    case MMT_OK: return "ok";
    case MMT_ERR_NULL_ARGUMENT: return "null argument";
    case MMT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MMT_ERR_CONFIG: return "configuration error";
    case MMT_ERR_IO: return "i/o error";
    case MMT_ERR_NUMERICAL: return "numerical failure";
    case MMT_ERR_DIVERGED: return "tracker diverged";
    case MMT_ERR_NOT_FOUND: return "not found";
    case MMT_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case MMT_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* mmt_last_error(void) { return g_last_error.c_str(); }

mmt_status mmt_config_create(mmt_config** out)
{
    if (!out)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_config_create: out is null");
    return guarded([&] {
        *out = new mmt_config{};
        return MMT_OK;
    });
}

mmt_status mmt_config_load(const char* path, mmt_config** out)
{
    if (!path || !out)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_config_load: null argument");
    return guarded([&] {
        auto cfg = mmtrack::load_config(path);
        *out = new mmt_config{std::move(cfg)};
        return MMT_OK;
    });
}

mmt_status mmt_config_parse(const char* text, mmt_config** out)
{
    if (!text || !out)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_config_parse: null argument");
    return guarded([&] {
        auto cfg = mmtrack::parse_config_text(text);
        *out = new mmt_config{std::move(cfg)};
        return MMT_OK;
    });
}

void mmt_config_free(mmt_config* config) { delete config; }

mmt_status mmt_config_set(mmt_config* config, const char* key, const char* value)
{
    if (!config || !key || !value)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_config_set: null argument");
    return guarded([&] {
        mmtrack::RunConfig updated = config->cfg;
        mmtrack::set_config_value(updated, key, value);
        config->cfg = std::move(updated);
        return MMT_OK;
    });
}

mmt_status mmt_config_get(const mmt_config* config, const char* key, char* buf, size_t capacity, size_t* needed)
{
    if (!config || !key)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_config_get: null argument");
    return guarded([&] { return copy_out(mmtrack::get_config_value(config->cfg, key), buf, capacity, needed); });
}

mmt_status mmt_config_validate(const mmt_config* config)
{
    if (!config)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_config_validate: null argument");
    return guarded([&] {
        config->cfg.validate();
        return MMT_OK;
    });
}

mmt_status mmt_config_format(const mmt_config* config, char* buf, size_t capacity, size_t* needed)
{
    if (!config)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_config_format: null argument");
    return guarded([&] { return copy_out(mmtrack::format_config(config->cfg), buf, capacity, needed); });
}

size_t mmt_config_key_count(void) { return mmtrack::config_keys().size(); }

const char* mmt_config_key_name(size_t index)
{
    const auto& keys = mmtrack::config_keys();
    return index < keys.size() ? keys[index].data() : nullptr;
}

mmt_status mmt_run(const mmt_config* config, mmt_trace** out)
{
    if (!config || !out)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_run: null argument");
    return guarded([&] {
        auto trace = mmtrack::run_experiment(config->cfg.to_experiment());
        *out = new mmt_trace{std::move(trace)};
        return MMT_OK;
    });
}

void mmt_trace_free(mmt_trace* trace) { delete trace; }

mmt_status mmt_trace_horizon(const mmt_trace* trace, size_t* horizon)
{
    if (!trace || !horizon)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_trace_horizon: null argument");
    *horizon = trace->trace.horizon;
    return MMT_OK;
}

mmt_status mmt_trace_mse(const mmt_trace* trace, const char* algorithm, const char* group, size_t step, double* mse,
                         double* std_error)
{
    if (!trace || !algorithm || !group || !mse)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_trace_mse: null argument");
    return guarded([&] {
        const auto& g = find_group(trace, algorithm, group);
        if (step < 1 || step > g.mse.size())
            return fail(MMT_ERR_INVALID_ARGUMENT, "mmt_trace_mse: step out of range");
        *mse = g.mse[step - 1];
        if (std_error)
            *std_error = g.stderr_[step - 1];
        return MMT_OK;
    });
}

mmt_status mmt_trace_steady_state(const mmt_trace* trace, const char* algorithm, const char* group, double* mse,
                                  double* std_error)
{
    if (!trace || !algorithm || !group || !mse)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_trace_steady_state: null argument");
    return guarded([&] {
        const auto& g = find_group(trace, algorithm, group);
        *mse = g.steady.mean;
        if (std_error)
            *std_error = g.steady.stderr_;
        return MMT_OK;
    });
}

mmt_status mmt_trace_diverged(const mmt_trace* trace, const char* algorithm, size_t* count)
{
    if (!trace || !algorithm || !count)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_trace_diverged: null argument");
    return guarded([&] {
        *count = trace->trace.at(mmtrack::parse_algorithm(algorithm)).diverged;
        return MMT_OK;
    });
}

mmt_status mmt_run_and_write(const mmt_config* config, const char* out_dir, double* wall_seconds)
{
    if (!config || !out_dir)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_run_and_write: null argument");
    return guarded([&] {
        const auto manifest = mmtrack::run_and_write(config->cfg, out_dir);
        if (wall_seconds)
            *wall_seconds = manifest.wall_clock_seconds;
        return MMT_OK;
    });
}

mmt_status mmt_directivity(int K, double delta, double spacing_ratio, double* re, double* im)
{
    if (!re || !im)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_directivity: null argument");
    return guarded([&] {
        const auto g = mmtrack::g_fn(K, delta, spacing_ratio);
        *re = g.real();
        *im = g.imag();
        return MMT_OK;
    });
}

mmt_status mmt_directivity_derivative(int K, double delta, double spacing_ratio, double ddelta_dangle, double* re,
                                      double* im)
{
    if (!re || !im)
        return fail(MMT_ERR_NULL_ARGUMENT, "mmt_directivity_derivative: null argument");
    return guarded([&] {
        const auto g = mmtrack::g_fn_derivative(K, delta, spacing_ratio, ddelta_dangle);
        *re = g.real();
        *im = g.imag();
        return MMT_OK;
    });
}

} // extern "C"
