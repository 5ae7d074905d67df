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

#ifndef MMTRACK_TRACKERS_HPP
#define MMTRACK_TRACKERS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmtrack/core_model.hpp"

namespace mmtrack {

/// Stacked real unknowns [alpha_re (L); alpha_im (L); theta (L); phi (L)].
class EstimateVector {
public:
    EstimateVector() = default;
    explicit EstimateVector(RVector stacked);

    static EstimateVector from_state(const ChannelState& state);
    ChannelState to_state(std::uint64_t k = 1) const;

    Eigen::Index paths() const { return x_.size() / 4; }
    const RVector& values() const { return x_; }
    RVector& values() { return x_; }

    cdouble alpha(Eigen::Index l) const { return {x_[l], x_[paths() + l]}; }
    double theta(Eigen::Index l) const { return x_[2 * paths() + l]; }
    double phi(Eigen::Index l) const { return x_[3 * paths() + l]; }

    bool finite() const { return x_.allFinite(); }
    bool operator==(const EstimateVector& o) const { return x_.size() == o.x_.size() && x_ == o.x_; }

private:
    RVector x_;
};

struct StepSizes {
    double mu_alpha = 0.1;
    double mu_theta = 1e-4;
    double mu_phi = 1e-4;

    void validate() const;
    RVector diagonal(Eigen::Index paths) const;
    bool operator==(const StepSizes&) const = default;
};

/// Raised when a tracker estimate stops being finite.
class DivergedError : public std::runtime_error {
public:
    DivergedError(const std::string& what, std::uint64_t step) : std::runtime_error(what), step_(step) {}
    std::uint64_t step() const { return step_; }

private:
    std::uint64_t step_;
};

/// Raised when the EKF innovation covariance cannot be inverted reliably.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MeasurementJacobian {
    Eigen::Vector2d h;                      // [h_re; h_im]
    Eigen::Matrix<double, 2, Eigen::Dynamic> J; // 2 x 4L
};

// Predicted stacked measurement and its derivative with respect to the estimate.
MeasurementJacobian measurement_and_jacobian(const EstimateVector& estimate, const ArrayConfig& config);

// x + 2 mu J^T (y - h(x)); the shared gradient kernel of the forward and backward passes.
EstimateVector lms_update(const EstimateVector& estimate, const Measurement& meas, const StepSizes& steps,
                          const ArrayConfig& config);

struct LmsTracker {
    EstimateVector estimate;
    StepSizes steps;
    ArrayConfig config;
    std::uint64_t step_index = 1;
};

/// Consumes y_k and advances the estimate from x_k to x_{k+1}. Throws
/// DivergedError if the new estimate is not finite.
LmsTracker lms_step(const LmsTracker& tracker, const Measurement& meas);

// Forward LMS over a window: element k holds the estimate at step k+1 (the
// first is `initial`, the last measurement is not consumed).
std::vector<EstimateVector> lms_run(const EstimateVector& initial, const std::vector<Measurement>& measurements,
                                    const StepSizes& steps, const ArrayConfig& config);

struct EkfTracker {
    EstimateVector estimate;
    RMatrix covariance;    // P
    RMatrix transition;    // F
    RMatrix process_noise; // Q
    Eigen::Matrix2d meas_noise; // R
    ArrayConfig config;
    std::uint64_t step_index = 1;
};

/// Builds F = blockdiag(rho I_2L, I_2L), Q = blockdiag((1-rho^2)/2 I_2L,
/// var_theta I_L, var_phi I_L) and R = max(N0/2, kMinMeasurementNoise) I_2.
EkfTracker make_ekf(const EstimateVector& initial, const RMatrix& initial_covariance, const DynamicsParams& dyn,
                    double noise_psd, const ArrayConfig& config);

inline constexpr double kMaxInnovationCondition = 1e12;
// Keeps S invertible for noiseless observations.
inline constexpr double kMinMeasurementNoise = 1e-12;

EkfTracker ekf_step(const EkfTracker& tracker, const Measurement& meas);

struct BilmsBuffer {
    std::vector<Measurement> measurements;
    std::vector<EstimateVector> forward_estimates;
    std::vector<EstimateVector> backward_estimates;
    std::optional<EstimateVector> terminal_init;
};

// Per-step average of a forward and a backward estimate sequence.
std::vector<EstimateVector> combine_bidirectional(const std::vector<EstimateVector>& forward,
                                                  const std::vector<EstimateVector>& backward);

/// Runs the forward pass from `initial`, the backward pass from
/// buffer.terminal_init, stores both in the buffer, and returns their average.
std::vector<EstimateVector> bilms_run(BilmsBuffer& buffer, const StepSizes& steps, const ArrayConfig& config,
                                      const EstimateVector& initial);

} // namespace mmtrack

#endif
