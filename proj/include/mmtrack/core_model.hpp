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

#ifndef MMTRACK_CORE_MODEL_HPP
#define MMTRACK_CORE_MODEL_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace mmtrack {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Pseudorandom source used throughout. Substreams are derived with
// std::seed_seq from (seed, stream index, tag); normal draws use
// std::normal_distribution, so trajectories are bit-reproducible for a
// given standard library.
using Rng = std::mt19937_64;

Rng make_substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag = 0);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

// Uniform linear arrays at both ends, analog beams steered to fixed pointing angles.
struct ArrayConfig {
    int rx_antennas = 16;       // M
    int tx_antennas = 16;       // N
    double spacing_ratio = 0.5; // d / lambda
    double theta_point = 0.0;   // combiner pointing angle (rad)
    double phi_point = 0.0;     // precoder pointing angle (rad)

    void validate() const;
    bool operator==(const ArrayConfig&) const = default;
};

// Path gains, AoAs and AoDs of L paths at time index k.
struct ChannelState {
    CVector alpha;
    RVector theta;
    RVector phi;
    std::uint64_t k = 1;

    Eigen::Index paths() const { return alpha.size(); }
    void validate() const;
};

struct DynamicsParams {
    double rho = 0.995;
    double var_theta = 0.0; // rad^2
    double var_phi = 0.0;   // rad^2

    void validate() const;
    bool operator==(const DynamicsParams&) const = default;
};

// Real/imaginary split of one de-rotated scalar observation.
struct Measurement {
    double y_re = 0.0;
    double y_im = 0.0;

    cdouble value() const { return {y_re, y_im}; }
};

// Steering vector (1/sqrt(count)) * exp(-2j*pi*ratio*m*cos(angle)), m = 0..count-1.
CVector array_response(int count, double angle, double spacing_ratio);

// Below this magnitude of 1 - exp(-2j*pi*ratio*delta) the closed-form
// directivity is replaced by the explicit geometric sum.
inline constexpr double kGratingLobeTolerance = 1e-9;

// Normalized beam pattern (1/K) * sum_m exp(-2j*pi*ratio*m*delta), evaluated
// in closed form away from grating lobes.
cdouble g_fn(int K, double delta, double spacing_ratio);

// d g / d angle = (d g / d delta) * ddelta_dangle. Zero at delta == 0.
cdouble g_fn_derivative(int K, double delta, double spacing_ratio, double ddelta_dangle);

// Direction-cosine differences entering the receive and transmit factors.
inline double aoa_offset(double theta, const ArrayConfig& cfg) { return std::cos(theta) - std::cos(cfg.theta_point); }
inline double aod_offset(double phi, const ArrayConfig& cfg) { return std::cos(cfg.phi_point) - std::cos(phi); }

// H = sum_l alpha_l a_R(theta_l) a_T(phi_l)^H, size M x N.
CMatrix channel_matrix(const ChannelState& state, const ArrayConfig& config);

// One step of the AR(1) gain process and the Gaussian angle random walk.
ChannelState evolve(const ChannelState& state, const DynamicsParams& dyn, Rng& rng);

struct Beamformers {
    CVector precoder; // f, length N
    CVector combiner; // w, length M
};

Beamformers beamformers(const ArrayConfig& config);

// Noiseless beamformed observation h(x) = sum_l alpha_l g(M, dtheta_l) g(N, dphi_l).
cdouble measure_clean(const ChannelState& state, const ArrayConfig& config);

// Noisy de-rotated observation h(x) + w^H v with v ~ CN(0, N0 I_M).
Measurement observe(const ChannelState& state, const ArrayConfig& config, double noise_psd, Rng& rng,
                    cdouble pilot = cdouble{1.0, 0.0});

// N0 such that M*N/N0 equals the requested SNR.
double noise_psd_for_snr(const ArrayConfig& config, double snr_db);

} // namespace mmtrack

#endif
