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

#include "mmtrack/core_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mmtrack {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool all_finite(const RVector& v) { return v.allFinite(); }

// (1/K) sum_m (-2j*pi*ratio*m)^order r^m, r = exp(-2j*pi*ratio*delta)
cdouble direct_sum(int K, double delta, double spacing_ratio, int order)
{
    cdouble acc{0.0, 0.0};
    for (int m = 0; m < K; ++m) {
        const double phase = -kTwoPi * spacing_ratio * m * delta;
        cdouble term = std::polar(1.0, phase);
        if (order == 1)
            term *= cdouble{0.0, -kTwoPi * spacing_ratio * m};
        acc += term;
    }
    return acc / static_cast<double>(K);
}

void check_g_args(int K, double delta)
{
    if (K < 1)
        throw std::invalid_argument("g_fn: K must be >= 1, got " + std::to_string(K));
    if (!std::isfinite(delta))
        throw std::invalid_argument("g_fn: delta must be finite");
}

} // namespace

Rng make_substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
    return Rng(seq);
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

void ArrayConfig::validate() const
{
    if (rx_antennas < 1)
        throw std::invalid_argument("ArrayConfig: rx_antennas (M) must be >= 1");
    if (tx_antennas < 1)
        throw std::invalid_argument("ArrayConfig: tx_antennas (N) must be >= 1");
    if (!(spacing_ratio > 0.0) || !std::isfinite(spacing_ratio))
        throw std::invalid_argument("ArrayConfig: spacing_ratio must be positive and finite");
    if (!(theta_point > 0.0 && theta_point < std::numbers::pi))
        throw std::invalid_argument("ArrayConfig: theta_point must lie in (0, pi)");
    if (!(phi_point > 0.0 && phi_point < std::numbers::pi))
        throw std::invalid_argument("ArrayConfig: phi_point must lie in (0, pi)");
}

void ChannelState::validate() const
{
    if (alpha.size() < 1)
        throw std::invalid_argument("ChannelState: at least one path required");
    if (theta.size() != alpha.size() || phi.size() != alpha.size())
        throw std::invalid_argument("ChannelState: alpha, theta and phi lengths differ");
    if (!alpha.allFinite() || !all_finite(theta) || !all_finite(phi))
        throw std::invalid_argument("ChannelState: non-finite entry");
}

void DynamicsParams::validate() const
{
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("DynamicsParams: rho must lie in [0, 1]");
    if (!(var_theta >= 0.0) || !(var_phi >= 0.0) || !std::isfinite(var_theta) || !std::isfinite(var_phi))
        throw std::invalid_argument("DynamicsParams: angle variances must be finite and >= 0");
}

CVector array_response(int count, double angle, double spacing_ratio)
{
    if (count < 1)
        throw std::invalid_argument("array_response: count must be >= 1");
    CVector v(count);
    const double scale = 1.0 / std::sqrt(static_cast<double>(count));
    const double c = std::cos(angle);
    for (int m = 0; m < count; ++m)
        v[m] = std::polar(scale, -kTwoPi * spacing_ratio * m * c);
    return v;
}

cdouble g_fn(int K, double delta, double spacing_ratio)
{
    check_g_args(K, delta);
    if (delta == 0.0)
        return {1.0, 0.0};
    const cdouble r = std::polar(1.0, -kTwoPi * spacing_ratio * delta);
    const cdouble denom = 1.0 - r;
    if (std::abs(denom) < kGratingLobeTolerance)
        return direct_sum(K, delta, spacing_ratio, 0);
    const cdouble rK = std::polar(1.0, -kTwoPi * spacing_ratio * K * delta);
    return (1.0 - rK) / (static_cast<double>(K) * denom);
}

cdouble g_fn_derivative(int K, double delta, double spacing_ratio, double ddelta_dangle)
{
    check_g_args(K, delta);
    if (delta == 0.0)
        return {0.0, 0.0};
    const double w = kTwoPi * spacing_ratio;
    const cdouble r = std::polar(1.0, -w * delta);
    const cdouble denom = 1.0 - r;
    if (std::abs(denom) < kGratingLobeTolerance)
        return direct_sum(K, delta, spacing_ratio, 1) * ddelta_dangle;
    const double Kd = static_cast<double>(K);
    const cdouble rK = std::polar(1.0, -w * Kd * delta);
    const cdouble rK1 = std::polar(1.0, -w * (Kd + 1.0) * delta);
    const cdouble bracket = Kd * rK - r - (Kd - 1.0) * rK1;
    return cdouble{0.0, w / Kd * ddelta_dangle} * bracket / (denom * denom);
}

CMatrix channel_matrix(const ChannelState& state, const ArrayConfig& config)
{
    CMatrix H = CMatrix::Zero(config.rx_antennas, config.tx_antennas);
    for (Eigen::Index l = 0; l < state.paths(); ++l) {
        const CVector aR = array_response(config.rx_antennas, state.theta[l], config.spacing_ratio);
        const CVector aT = array_response(config.tx_antennas, state.phi[l], config.spacing_ratio);
        H.noalias() += state.alpha[l] * aR * aT.adjoint();
    }
    return H;
}

ChannelState evolve(const ChannelState& state, const DynamicsParams& dyn, Rng& rng)
{
    std::normal_distribution<double> unit;
    const double gain_sd = std::sqrt((1.0 - dyn.rho * dyn.rho) / 2.0);
    const double theta_sd = std::sqrt(dyn.var_theta);
    const double phi_sd = std::sqrt(dyn.var_phi);

    ChannelState next = state;
    const Eigen::Index L = state.paths();
    for (Eigen::Index l = 0; l < L; ++l) {
        const double re = unit(rng);
        const double im = unit(rng);
        next.alpha[l] = dyn.rho * state.alpha[l] + gain_sd * cdouble{re, im};
    }
    for (Eigen::Index l = 0; l < L; ++l)
        next.theta[l] = state.theta[l] + theta_sd * unit(rng);
    for (Eigen::Index l = 0; l < L; ++l)
        next.phi[l] = state.phi[l] + phi_sd * unit(rng);
    next.k = state.k + 1;
    return next;
}

Beamformers beamformers(const ArrayConfig& config)
{
    return {array_response(config.tx_antennas, config.phi_point, config.spacing_ratio),
            array_response(config.rx_antennas, config.theta_point, config.spacing_ratio)};
}

cdouble measure_clean(const ChannelState& state, const ArrayConfig& config)
{
    cdouble h{0.0, 0.0};
    for (Eigen::Index l = 0; l < state.paths(); ++l) {
        const cdouble gr = g_fn(config.rx_antennas, aoa_offset(state.theta[l], config), config.spacing_ratio);
        const cdouble gt = g_fn(config.tx_antennas, aod_offset(state.phi[l], config), config.spacing_ratio);
        h += state.alpha[l] * gr * gt;
    }
    return h;
}

Measurement observe(const ChannelState& state, const ArrayConfig& config, double noise_psd, Rng& rng, cdouble pilot)
{
    if (!(noise_psd >= 0.0) || !std::isfinite(noise_psd))
        throw std::invalid_argument("observe: noise_psd must be finite and >= 0");
    if (std::abs(std::abs(pilot) - 1.0) > 1e-12)
        throw std::invalid_argument("observe: pilot must have unit magnitude");

    const cdouble h = measure_clean(state, config);
    cdouble y = h * pilot;
    if (noise_psd > 0.0) {
        std::normal_distribution<double> unit;
        const double sd = std::sqrt(noise_psd / 2.0);
        const CVector w = array_response(config.rx_antennas, config.theta_point, config.spacing_ratio);
        cdouble combined{0.0, 0.0};
        for (int m = 0; m < config.rx_antennas; ++m) {
            const double re = unit(rng);
            const double im = unit(rng);
            combined += std::conj(w[m]) * cdouble{sd * re, sd * im};
        }
        y += combined;
    }
    y *= std::conj(pilot);
    return {y.real(), y.imag()};
}

double noise_psd_for_snr(const ArrayConfig& config, double snr_db)
{
    return static_cast<double>(config.rx_antennas) * config.tx_antennas / std::pow(10.0, snr_db / 10.0);
}

} // namespace mmtrack
