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

#include "mmtrack/trackers.hpp"

#include <algorithm>
#include <cmath>

namespace mmtrack {

EstimateVector::EstimateVector(RVector stacked) : x_(std::move(stacked))
{
    if (x_.size() == 0 || x_.size() % 4 != 0)
        throw std::invalid_argument("EstimateVector: length must be a positive multiple of 4");
}

EstimateVector EstimateVector::from_state(const ChannelState& state)
{
    const Eigen::Index L = state.paths();
    RVector x(4 * L);
    x.segment(0, L) = state.alpha.real();
    x.segment(L, L) = state.alpha.imag();
    x.segment(2 * L, L) = state.theta;
    x.segment(3 * L, L) = state.phi;
    return EstimateVector(std::move(x));
}

ChannelState EstimateVector::to_state(std::uint64_t k) const
{
    const Eigen::Index L = paths();
    ChannelState s;
    s.alpha.resize(L);
    for (Eigen::Index l = 0; l < L; ++l)
        s.alpha[l] = alpha(l);
    s.theta = x_.segment(2 * L, L);
    s.phi = x_.segment(3 * L, L);
    s.k = k;
    return s;
}

void StepSizes::validate() const
{
    if (!(mu_alpha > 0.0) || !(mu_theta > 0.0) || !(mu_phi > 0.0))
        throw std::invalid_argument("StepSizes: all step sizes must be > 0");
}

RVector StepSizes::diagonal(Eigen::Index paths) const
{
    RVector d(4 * paths);
    d.segment(0, 2 * paths).setConstant(mu_alpha);
    d.segment(2 * paths, paths).setConstant(mu_theta);
    d.segment(3 * paths, paths).setConstant(mu_phi);
    return d;
}

MeasurementJacobian measurement_and_jacobian(const EstimateVector& estimate, const ArrayConfig& config)
{
    const Eigen::Index L = estimate.paths();
    const int M = config.rx_antennas;
    const int N = config.tx_antennas;
    const double ratio = config.spacing_ratio;

    MeasurementJacobian out;
    out.J.resize(2, 4 * L);
    cdouble h{0.0, 0.0};
    for (Eigen::Index l = 0; l < L; ++l) {
        const double theta = estimate.theta(l);
        const double phi = estimate.phi(l);
        const cdouble a = estimate.alpha(l);
        const double dtheta = aoa_offset(theta, config);
        const double dphi = aod_offset(phi, config);
        const cdouble gr = g_fn(M, dtheta, ratio);
        const cdouble gt = g_fn(N, dphi, ratio);
        // d(dtheta)/d(theta) = -sin(theta), d(dphi)/d(phi) = +sin(phi)
        const cdouble dgr = g_fn_derivative(M, dtheta, ratio, -std::sin(theta));
        const cdouble dgt = g_fn_derivative(N, dphi, ratio, std::sin(phi));

        const cdouble d_re = gr * gt;
        const cdouble d_im = cdouble{0.0, 1.0} * d_re;
        const cdouble d_theta = a * dgr * gt;
        const cdouble d_phi = a * gr * dgt;
        h += a * gr * gt;

        out.J(0, l) = d_re.real();
        out.J(1, l) = d_re.imag();
        out.J(0, L + l) = d_im.real();
        out.J(1, L + l) = d_im.imag();
        out.J(0, 2 * L + l) = d_theta.real();
        out.J(1, 2 * L + l) = d_theta.imag();
        out.J(0, 3 * L + l) = d_phi.real();
        out.J(1, 3 * L + l) = d_phi.imag();
    }
    out.h << h.real(), h.imag();
    return out;
}

EstimateVector lms_update(const EstimateVector& estimate, const Measurement& meas, const StepSizes& steps,
                          const ArrayConfig& config)
{
    const MeasurementJacobian mj = measurement_and_jacobian(estimate, config);
    const Eigen::Vector2d e(meas.y_re - mj.h[0], meas.y_im - mj.h[1]);
    RVector x = estimate.values();
    x.array() += 2.0 * steps.diagonal(estimate.paths()).array() * (mj.J.transpose() * e).array();
    return EstimateVector(std::move(x));
}

LmsTracker lms_step(const LmsTracker& tracker, const Measurement& meas)
{
    LmsTracker next = tracker;
    next.estimate = lms_update(tracker.estimate, meas, tracker.steps, tracker.config);
    if (!next.estimate.finite())
        throw DivergedError("LMS estimate became non-finite", tracker.step_index);
    ++next.step_index;
    return next;
}

std::vector<EstimateVector> lms_run(const EstimateVector& initial, const std::vector<Measurement>& measurements,
                                    const StepSizes& steps, const ArrayConfig& config)
{
    std::vector<EstimateVector> out;
    if (measurements.empty())
        return out;
    out.reserve(measurements.size());
    LmsTracker tracker{initial, steps, config, 1};
    out.push_back(initial);
    for (std::size_t k = 0; k + 1 < measurements.size(); ++k) {
        tracker = lms_step(tracker, measurements[k]);
        out.push_back(tracker.estimate);
    }
    return out;
}

EkfTracker make_ekf(const EstimateVector& initial, const RMatrix& initial_covariance, const DynamicsParams& dyn,
                    double noise_psd, const ArrayConfig& config)
{
    const Eigen::Index L = initial.paths();
    const Eigen::Index n = 4 * L;
    if (initial_covariance.rows() != n || initial_covariance.cols() != n)
        throw std::invalid_argument("make_ekf: initial covariance must be 4L x 4L");

    EkfTracker t;
    t.estimate = initial;
    t.covariance = initial_covariance;
    t.transition = RMatrix::Identity(n, n);
    t.transition.topLeftCorner(2 * L, 2 * L) *= dyn.rho;

    RVector q(n);
    q.segment(0, 2 * L).setConstant((1.0 - dyn.rho * dyn.rho) / 2.0);
    q.segment(2 * L, L).setConstant(dyn.var_theta);
    q.segment(3 * L, L).setConstant(dyn.var_phi);
    t.process_noise = q.asDiagonal();
    t.meas_noise = Eigen::Matrix2d::Identity() * std::max(noise_psd / 2.0, kMinMeasurementNoise);
    t.config = config;
    return t;
}

EkfTracker ekf_step(const EkfTracker& tracker, const Measurement& meas)
{
    const auto& F = tracker.transition;
    const Eigen::Index n = F.rows();

    EkfTracker next = tracker;
    const EstimateVector predicted(F * tracker.estimate.values());
    const RMatrix P_pred = F * tracker.covariance * F.transpose() + tracker.process_noise;

    const MeasurementJacobian mj = measurement_and_jacobian(predicted, tracker.config);
    const Eigen::Matrix2d S = mj.J * P_pred * mj.J.transpose() + tracker.meas_noise;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(S);
    const double lo = eig.eigenvalues()[0];
    const double hi = eig.eigenvalues()[1];
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo <= 0.0 || hi / lo > kMaxInnovationCondition)
        throw NumericalError("EKF innovation covariance is singular at step " + std::to_string(tracker.step_index));

    const Eigen::Matrix<double, Eigen::Dynamic, 2> K = P_pred * mj.J.transpose() * S.inverse();
    const Eigen::Vector2d innovation(meas.y_re - mj.h[0], meas.y_im - mj.h[1]);

    next.estimate = EstimateVector(predicted.values() + K * innovation);
    RMatrix P = (RMatrix::Identity(n, n) - K * mj.J) * P_pred;
    next.covariance = 0.5 * (P + P.transpose());
    if (!next.estimate.finite() || !next.covariance.allFinite())
        throw DivergedError("EKF estimate became non-finite", tracker.step_index);
    ++next.step_index;
    return next;
}

std::vector<EstimateVector> combine_bidirectional(const std::vector<EstimateVector>& forward,
                                                  const std::vector<EstimateVector>& backward)
{
    if (forward.size() != backward.size())
        throw std::invalid_argument("combine_bidirectional: sequence lengths differ");
    std::vector<EstimateVector> out;
    out.reserve(forward.size());
    for (std::size_t k = 0; k < forward.size(); ++k)
        out.emplace_back((forward[k].values() + backward[k].values()) / 2.0);
    return out;
}

std::vector<EstimateVector> bilms_run(BilmsBuffer& buffer, const StepSizes& steps, const ArrayConfig& config,
                                      const EstimateVector& initial)
{
    if (!buffer.terminal_init)
        throw std::logic_error("bilms_run: terminal_init must be set before the backward pass");
    const auto& ys = buffer.measurements;
    const std::size_t K = ys.size();

    buffer.forward_estimates = lms_run(initial, ys, steps, config);

    buffer.backward_estimates.assign(K, EstimateVector{});
    if (K > 0) {
        buffer.backward_estimates[K - 1] = *buffer.terminal_init;
        for (std::size_t k = K - 1; k >= 1; --k) {
            EstimateVector prev = lms_update(buffer.backward_estimates[k], ys[k], steps, config);
            if (!prev.finite())
                throw DivergedError("backward LMS estimate became non-finite", k + 1);
            buffer.backward_estimates[k - 1] = std::move(prev);
        }
    }
    return combine_bidirectional(buffer.forward_estimates, buffer.backward_estimates);
}

} // namespace mmtrack
