// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "mmtrack/core_model.hpp"
#include "oracles.hpp"

using namespace mmtrack;

namespace {

constexpr double kPi = std::numbers::pi;

ArrayConfig array(int M, int N, double theta_deg = 45.0, double phi_deg = 45.0)
{
    ArrayConfig c;
    c.rx_antennas = M;
    c.tx_antennas = N;
    c.theta_point = deg_to_rad(theta_deg);
    c.phi_point = deg_to_rad(phi_deg);
    return c;
}

ChannelState random_state(int L, std::mt19937_64& gen)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    std::uniform_real_distribution<double> ang(0.05, kPi - 0.05);
    ChannelState s;
    s.alpha.resize(L);
    s.theta.resize(L);
    s.phi.resize(L);
    for (int l = 0; l < L; ++l) {
        s.alpha[l] = {n(gen), n(gen)};
        s.theta[l] = ang(gen);
        s.phi[l] = ang(gen);
    }
    return s;
}

double rel_err(cdouble a, cdouble b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("array_response examples")
{
    const CVector a = array_response(4, kPi / 2, 0.5);
    for (int m = 0; m < 4; ++m)
        CHECK(std::abs(a[m] - cdouble{0.5, 0.0}) < 1e-12);

    const CVector b = array_response(2, 0.0, 0.5);
    CHECK(std::abs(b[0] - cdouble{1.0 / std::sqrt(2.0), 0.0}) < 1e-15);
    CHECK(std::abs(b[1] - cdouble{-1.0 / std::sqrt(2.0), 0.0}) < 1e-15);

    CHECK_THROWS_AS(array_response(0, 0.3, 0.5), std::invalid_argument);
}

TEST_CASE("array_response is unit norm")
{
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> count(1, 64);
    std::uniform_real_distribution<double> angle(-2 * kPi, 2 * kPi);
    std::uniform_real_distribution<double> ratio(0.05, 2.0);
    for (int i = 0; i < 1000; ++i)
        CHECK(std::abs(array_response(count(gen), angle(gen), ratio(gen)).norm() - 1.0) < 1e-12);
}

TEST_CASE("g_fn examples and errors")
{
    CHECK(g_fn(16, 0.0, 0.5) == cdouble{1.0, 0.0});
    CHECK(std::abs(g_fn(1, 0.37, 0.5) - cdouble{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(g_fn(2, 1.0, 0.5)) < 1e-15);

    CHECK_THROWS_AS(g_fn(0, 0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(g_fn(4, std::nan(""), 0.5), std::invalid_argument);
    CHECK_THROWS_AS(g_fn(4, INFINITY, 0.5), std::invalid_argument);
}

TEST_CASE("g_fn grating lobes fall back to the direct sum")
{
    // ratio * delta = 1: closed form is 0/0, every term of the sum is 1.
    CHECK(std::abs(g_fn(16, 2.0, 0.5) - cdouble{1.0, 0.0}) < 1e-12);
    const cdouble near = g_fn(16, 2.0 + 1e-12, 0.5);
    CHECK(std::isfinite(near.real()));
    CHECK(std::abs(near - oracle::geometric_sum(16, 2.0 + 1e-12, 0.5)) < 1e-9);
    CHECK(std::abs(g_fn(8, 1.0, 1.0) - cdouble{1.0, 0.0}) < 1e-12);
}

TEST_CASE("g_fn matches geometric sum and is conjugate symmetric")
{
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> K(1, 64);
    std::uniform_real_distribution<double> delta(-1.95, 1.95);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        const int k = K(gen);
        const double d = delta(gen);
        if (std::abs(d) < 1e-6)
            continue;
        const cdouble g = g_fn(k, d, 0.5);
        CHECK(std::abs(g - oracle::geometric_sum(k, d, 0.5)) < 1e-12);
        CHECK(std::abs(g_fn(k, -d, 0.5) - std::conj(g)) < 1e-14);
        ++checked;
    }
    CHECK(checked > 1900);
}

TEST_CASE("g_fn_derivative examples")
{
    CHECK(g_fn_derivative(16, 0.0, 0.5, 0.8) == cdouble{0.0, 0.0});
    CHECK(std::abs(g_fn_derivative(1, 0.2, 0.5, 1.0)) < 1e-15);

    const double h = 1e-6;
    const cdouble fd = oracle::central_difference([](double d) { return oracle::geometric_sum(8, d, 0.5); }, 0.05, h) * 0.7;
    CHECK(rel_err(g_fn_derivative(8, 0.05, 0.5, 0.7), fd) < 1e-6);
    CHECK_THROWS_AS(g_fn_derivative(0, 0.1, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("g_fn_derivative matches finite differences of g_fn")
{
    std::mt19937_64 gen(6);
    std::uniform_int_distribution<int> K(2, 64);
    std::uniform_real_distribution<double> mag(1e-3, 1.9);
    std::bernoulli_distribution sign;
    std::uniform_real_distribution<double> slope(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const int k = K(gen);
        const double d = sign(gen) ? mag(gen) : -mag(gen);
        const double s = slope(gen);
        const cdouble fd = oracle::central_difference([&](double x) { return g_fn(k, x, 0.5); }, d, 1e-6) * s;
        const cdouble an = g_fn_derivative(k, d, 0.5, s);
        CHECK(std::abs(an - fd) <= 1e-5 * std::max(std::abs(fd), 1e-3));
    }
}

TEST_CASE("g_fn_derivative near a grating lobe uses the direct sum")
{
    const double d = 2.0 + 1e-11;
    const cdouble expected = oracle::central_difference([](double x) { return oracle::geometric_sum(6, x, 0.5); }, d, 1e-6);
    CHECK(std::abs(g_fn_derivative(6, d, 0.5, 1.0) - expected) < 1e-6);
}

TEST_CASE("channel_matrix")
{
    ChannelState s;
    s.alpha = CVector::Constant(1, cdouble{1.0, 0.0});
    s.theta = RVector::Constant(1, kPi / 2);
    s.phi = RVector::Constant(1, kPi / 2);
    const CMatrix H = channel_matrix(s, array(2, 2));
    CHECK((H - CMatrix::Constant(2, 2, cdouble{0.5, 0.0})).norm() < 1e-12);

    std::mt19937_64 gen(3);
    for (int L : {1, 2, 3}) {
        const ChannelState r = random_state(L, gen);
        const ArrayConfig cfg = array(8, 6);
        const CMatrix Hr = channel_matrix(r, cfg);
        Eigen::JacobiSVD<CMatrix> svd(Hr);
        const auto sv = svd.singularValues();
        for (Eigen::Index i = L; i < sv.size(); ++i)
            CHECK(sv[i] < 1e-12 * sv[0]);
    }

    const ChannelState two = random_state(2, gen);
    const ArrayConfig cfg = array(5, 7);
    CMatrix expected = CMatrix::Zero(5, 7);
    for (int l = 0; l < 2; ++l)
        expected += two.alpha[l] * array_response(5, two.theta[l], 0.5) * array_response(7, two.phi[l], 0.5).adjoint();
    CHECK((channel_matrix(two, cfg) - expected).norm() < 1e-13);
}

TEST_CASE("evolve degenerate case keeps the state")
{
    std::mt19937_64 gen(1);
    const ChannelState s = random_state(3, gen);
    Rng rng = make_substream(7, 0);
    const ChannelState n = evolve(s, DynamicsParams{1.0, 0.0, 0.0}, rng);
    CHECK(n.k == s.k + 1);
    CHECK(n.alpha == s.alpha);
    CHECK(n.theta == s.theta);
    CHECK(n.phi == s.phi);
}

TEST_CASE("evolve keeps unit stationary gain variance")
{
    // AR(1) with rho = 0.995: the variance estimate over n steps has
    // relative standard error ~ sqrt((1 + rho^2) / ((1 - rho^2) n)) per
    // component, so 10^6 steps put the 5% band beyond 3 sigma.
    const double rho = 0.995;
    const std::size_t steps = 1'000'000;
    Rng rng = make_substream(2026, 0);
    ChannelState s;
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    s.alpha = CVector(2);
    s.alpha << cdouble{n(rng), n(rng)}, cdouble{n(rng), n(rng)};
    s.theta = RVector::Zero(2);
    s.phi = RVector::Zero(2);
    RVector acc = RVector::Zero(2);
    for (std::size_t k = 0; k < steps; ++k) {
        s = evolve(s, DynamicsParams{rho, 0.0, 0.0}, rng);
        acc += s.alpha.cwiseAbs2();
    }
    acc /= static_cast<double>(steps);
    const double se = std::sqrt((1 + rho * rho) / ((1 - rho * rho) * steps) / 2.0);
    for (int l = 0; l < 2; ++l) {
        CHECK(std::abs(acc[l] - 1.0) < 0.05);
        CHECK(std::abs(acc[l] - 1.0) < 3.0 * se);
    }
}

TEST_CASE("evolve angle increments have the configured moments")
{
    const double var = deg_to_rad(0.5) * deg_to_rad(0.5);
    const std::size_t steps = 100'000;
    Rng rng = make_substream(99, 1);
    ChannelState s;
    s.alpha = CVector::Constant(1, cdouble{1.0, 0.0});
    s.theta = RVector::Constant(1, 0.7);
    s.phi = RVector::Constant(1, 0.9);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const ChannelState n = evolve(s, DynamicsParams{0.995, var, var}, rng);
        const double inc = n.theta[0] - s.theta[0];
        sum += inc;
        sumsq += inc * inc;
        s = n;
    }
    const double mean = sum / steps;
    const double sample_var = sumsq / steps - mean * mean;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(var / steps));
    CHECK(std::abs(sample_var - var) < 3.0 * var * std::sqrt(2.0 / steps));
}

TEST_CASE("beamformers")
{
    const ArrayConfig broadside = array(4, 9, 90.0, 90.0);
    const Beamformers bf = beamformers(broadside);
    CHECK(bf.precoder.size() == 9);
    CHECK(bf.combiner.size() == 4);
    for (int n = 0; n < 9; ++n)
        CHECK(std::abs(bf.precoder[n] - cdouble{1.0 / 3.0, 0.0}) < 1e-12);
    for (int m = 0; m < 4; ++m)
        CHECK(std::abs(bf.combiner[m] - cdouble{0.5, 0.0}) < 1e-12);

    const ArrayConfig cfg = array(16, 8, 37.0, 101.0);
    const Beamformers b2 = beamformers(cfg);
    CHECK(std::abs(b2.precoder.norm() - 1.0) < 1e-12);
    CHECK(std::abs(b2.combiner.norm() - 1.0) < 1e-12);
    const cdouble self = b2.combiner.dot(array_response(16, cfg.theta_point, cfg.spacing_ratio));
    CHECK(std::abs(self - cdouble{1.0, 0.0}) < 1e-12);
}

TEST_CASE("measure_clean examples")
{
    const ArrayConfig cfg = array(16, 16);
    ChannelState s;
    s.alpha = CVector::Constant(1, cdouble{1.0, 0.0});
    s.theta = RVector::Constant(1, cfg.theta_point);
    s.phi = RVector::Constant(1, cfg.phi_point);
    CHECK(measure_clean(s, cfg) == cdouble{1.0, 0.0});

    std::mt19937_64 gen(4);
    const ChannelState r = random_state(2, gen);
    ChannelState scaled = r;
    const cdouble c{0.3, -1.7};
    scaled.alpha *= c;
    CHECK(rel_err(measure_clean(scaled, cfg), c * measure_clean(r, cfg)) < 1e-12);
}

TEST_CASE("measure_clean equals direct w^H H f")
{
    // M and N differ in some draws, which pins the receive size to the AoA
    // factor and the transmit size to the AoD factor.
    std::mt19937_64 gen(2024);
    const int sizes[] = {1, 2, 4, 8, 16, 32};
    std::uniform_int_distribution<int> pick(0, 5);
    std::uniform_int_distribution<int> paths(1, 3);
    std::uniform_real_distribution<double> point(10.0, 170.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ArrayConfig cfg = array(sizes[pick(gen)], sizes[pick(gen)], point(gen), point(gen));
        const ChannelState s = random_state(paths(gen), gen);
        std::vector<cdouble> a(s.alpha.data(), s.alpha.data() + s.paths());
        std::vector<double> t(s.theta.data(), s.theta.data() + s.paths());
        std::vector<double> p(s.phi.data(), s.phi.data() + s.paths());
        const cdouble ref = oracle::beamformed_gain(a, t, p, cfg.rx_antennas, cfg.tx_antennas, cfg.spacing_ratio,
                                                    cfg.theta_point, cfg.phi_point);
        const cdouble h = measure_clean(s, cfg);
        worst = std::max(worst, rel_err(h, ref));
        // Matrix-product route through the library's own H as well.
        const Beamformers bf = beamformers(cfg);
        const cdouble viaH = bf.combiner.dot(channel_matrix(s, cfg) * bf.precoder);
        CHECK(rel_err(h, viaH) < 1e-10);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("observe")
{
    const ArrayConfig cfg = array(16, 16);
    std::mt19937_64 gen(8);
    const ChannelState s = random_state(2, gen);
    const cdouble h = measure_clean(s, cfg);

    Rng rng = make_substream(1, 2);
    const Measurement clean = observe(s, cfg, 0.0, rng);
    CHECK(clean.y_re == h.real());
    CHECK(clean.y_im == h.imag());

    CHECK_THROWS_AS(observe(s, cfg, -1.0, rng), std::invalid_argument);

    CHECK(noise_psd_for_snr(cfg, 30.0) == doctest::Approx(0.256).epsilon(1e-12));

    const double n0 = 0.256;
    const std::size_t draws = 100'000;
    double acc = 0.0;
    const cdouble pilot = std::polar(1.0, 0.8);
    for (std::size_t i = 0; i < draws; ++i)
        acc += std::norm(observe(s, cfg, n0, rng, pilot).value() - h);
    CHECK(std::abs(acc / draws - n0) < 0.05 * n0);
}
