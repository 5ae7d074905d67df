// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used only by the tests. Nothing here
// calls into the closed-form paths of the library under test.

#ifndef MMTRACK_TESTS_ORACLES_HPP
#define MMTRACK_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

// (1/K) sum_{m<K} exp(-2j pi ratio m delta), summed term by term.
inline cd geometric_sum(int K, double delta, double ratio)
{
    cd acc{0.0, 0.0};
    for (int m = 0; m < K; ++m)
        acc += std::exp(cd{0.0, -2.0 * std::numbers::pi * ratio * m * delta});
    return acc / static_cast<double>(K);
}

// w^H H f with H, w and f built entry by entry from their definitions.
inline cd beamformed_gain(const std::vector<cd>& alpha, const std::vector<double>& theta,
                          const std::vector<double>& phi, int M, int N, double ratio, double theta_point,
                          double phi_point)
{
    const double two_pi = 2.0 * std::numbers::pi;
    auto steer = [&](int count, int idx, double angle) {
        return std::exp(cd{0.0, -two_pi * ratio * idx * std::cos(angle)}) / std::sqrt(static_cast<double>(count));
    };
    std::vector<cd> H(static_cast<std::size_t>(M) * N, cd{0.0, 0.0});
    for (std::size_t l = 0; l < alpha.size(); ++l)
        for (int m = 0; m < M; ++m)
            for (int n = 0; n < N; ++n)
                H[m * N + n] += alpha[l] * steer(M, m, theta[l]) * std::conj(steer(N, n, phi[l]));
    cd acc{0.0, 0.0};
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n)
            acc += std::conj(steer(M, m, theta_point)) * H[m * N + n] * steer(N, n, phi_point);
    return acc;
}

// Central difference of a scalar function.
template <typename F>
auto central_difference(F&& f, double x, double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Monte-Carlo E|alpha_k - alpha_1|^2 for a stationary AR(1) gain, written
// from scratch with its own generator.
inline std::vector<double> ar1_gain_drift(double rho, std::size_t horizon, std::size_t trials, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double s = std::sqrt(1.0 - rho * rho);
    std::vector<double> acc(horizon, 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
        const cd a1{n(gen), n(gen)};
        cd a = a1;
        for (std::size_t k = 0; k < horizon; ++k) {
            if (k > 0)
                a = rho * a + s * cd{n(gen), n(gen)};
            acc[k] += std::norm(a - a1);
        }
    }
    for (auto& v : acc)
        v /= static_cast<double>(trials);
    return acc;
}

} // namespace oracle

#endif
