/*
 * Copyright (C) 2026 The waning Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "support.hpp"

#include "waning/dfe.hpp"
#include "waning/errors.hpp"

#include <doctest.h>

using namespace waning;

TEST_CASE("matrix A has the bidiagonal-plus-boosting-row pattern")
{
    const Vector beta = (Vector(3) << 1, 2, 3).finished();
    const Vector p    = (Vector(3) << 0, 0.5, 0.25).finished();
    const ModelConfig c = build_general(2, beta, 0.4, 0.1, 1, 2, p);
    const DfeMatrix m   = assemble_A(c, 0.5);
    // d_k = -(delta_k + omega_k + mu + beta_k I)
    CHECK(m.a(0, 0) == doctest::Approx(-(0.4 + 0 + 0.1 + 0.5)));
    CHECK(m.a(1, 1) == doctest::Approx(-(0.2 + 1 + 0.1 + 1)));
    CHECK(m.a(2, 2) == doctest::Approx(-(0 + 0.5 + 0.1 + 1.5)));
    CHECK(m.a(1, 0) == doctest::Approx(0.4));
    CHECK(m.a(2, 1) == doctest::Approx(0.2));
    CHECK(m.a(0, 1) == doctest::Approx(1));
    CHECK(m.a(0, 2) == doctest::Approx(0.5));
    CHECK(m.a(2, 0) == 0);
    CHECK((m.lower() + Vector::Unit(3, 0) * m.omega_row().transpose() - m.a).norm() == 0);
}

TEST_CASE("closed-form DFE agrees with an independent elimination")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const int n         = 1 + trial % 12;
        const ModelConfig c = gen::general(rng, n);
        const DfeSolution s = solve_dfe_closed_form(c);
        Vector rhs          = Vector::Zero(n + 1);
        rhs[n]              = -c.mu();
        const Vector ref    = oracle::solve(assemble_A(c, 0).a, rhs);
        CHECK((s.s - ref).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(s.s.sum() == doctest::Approx(1).epsilon(1e-12));
        CHECK(s.s.minCoeff() >= 0);
        const double ref_det = oracle::det(assemble_A(c, 0).a);
        CHECK(s.det_a == doctest::Approx(ref_det).epsilon(1e-9));
        CHECK((solve_dfe_numeric(c).s - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("determinant sign is (-1)^(n+1)")
{
    std::mt19937_64 rng(22);
    for (int n = 1; n <= 10; ++n) {
        const ModelConfig c = gen::general(rng, n, 0.01, 10);
        CHECK((det_A(c) > 0) == ((n + 1) % 2 == 0));
    }
}

TEST_CASE("without boosting the DFE is the fully waned state")
{
    const Vector beta   = (Vector(3) << 1, 2, 5).finished();
    const ModelConfig c = build_general(2, beta, 0.3, 0.02, 1, 0, Vector::Zero(3));
    const DfeSolution s = solve_dfe_closed_form(c);
    CHECK(s.s[2] == doctest::Approx(1));
    CHECK(s.s[0] == 0);
    CHECK(r0(c).r0 == doctest::Approx(5 / 1.02));
}

TEST_CASE("R0 under the all-but-last scheme is independent of boosting")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const int n       = 2 + trial % 6;
        const Vector beta = gen::sorted_betas(rng, n, 0.1, 20);
        Vector interior(n - 1);
        for (int k = 0; k < n - 1; ++k) {
            interior[k] = gen::uniform(rng, 0, 1);
        }
        const double mu = gen::log_uniform(rng, 1e-3, 1), r = gen::log_uniform(rng, 0.1, 20);
        const ModelConfig c = build_all_but_last(n, beta, gen::log_uniform(rng, 1e-3, 5), mu, r,
                                                 gen::log_uniform(rng, 1e-3, 50), interior);
        CHECK(std::abs(r0(c).r0 - beta[n] / (r + mu)) <= 1e-15 * beta[n] / (r + mu));
    }
}

TEST_CASE("R0 under the last-only scheme decreases in the boosting rate")
{
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 30; ++trial) {
        const int n          = 1 + trial % 5;
        const Vector beta    = gen::sorted_betas(rng, n, 0.5, 20);
        if (!(beta[0] < beta[n])) {
            continue;
        }
        const ModelConfig base = build_last_only(n, beta, gen::log_uniform(rng, 1e-3, 2), gen::log_uniform(rng, 1e-3, 1),
                                                 gen::log_uniform(rng, 0.1, 10), 1, 1.0);
        double previous = r0(base.with_omega(0)).r0;
        for (int k = 1; k <= 40; ++k) {
            const double current = r0(base.with_omega(0.05 * k * k)).r0;
            CHECK(current < previous);
            previous = current;
        }
    }
}

TEST_CASE("threshold T reproduces the weighted DFE sum and its limits")
{
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 50; ++trial) {
        const int n         = 1 + trial % 7;
        const Vector beta   = gen::sorted_betas(rng, n, 0.5, 20);
        const double delta  = gen::log_uniform(rng, 1e-2, 3);
        const double mu     = gen::log_uniform(rng, 1e-3, 0.5);
        const double pn     = gen::uniform(rng, 0.1, 1);
        const ModelConfig c = build_last_only(n, beta, delta, mu, 1, gen::log_uniform(rng, 0.01, 30), pn);
        CHECK(threshold_T(c, c.omega_n()) == doctest::Approx(r0(c).threshold_sum).epsilon(1e-11));

        CHECK(threshold_T(c, 0) == doctest::Approx(beta[n]));
        const double sigma = delta / (delta + mu);
        double weighted    = 0;
        for (int i = 0; i < n; ++i) {
            weighted += beta[i] * std::pow(sigma, i);
        }
        const double limit = mu / (delta + mu) * weighted / (1 - std::pow(sigma, n));
        CHECK(threshold_T(c, 1e12) == doctest::Approx(limit).epsilon(1e-6));
    }
}

TEST_CASE("vanishing waning gives the two-compartment R0 formula")
{
    const Vector beta = (Vector(4) << 2, 3, 4, 8).finished();
    const double mu = 0.05, r = 3, pn = 0.7, omega = 2;
    const ModelConfig c = build_last_only(3, beta, 1e-6, mu, r, omega, pn);
    const double wn     = pn * omega;
    const double expect = (wn * beta[0] + mu * beta[3]) / ((wn + mu) * (r + mu));
    CHECK(std::abs(r0(c).r0 - expect) < 1e-4);
}

TEST_CASE("threshold T requires the last-only scheme")
{
    const Vector beta = (Vector(3) << 1, 2, 3).finished();
    const ModelConfig c = build_general(2, beta, 0.1, 0.1, 1, 1, (Vector(3) << 0, 0.5, 0.5).finished());
    CHECK_THROWS_AS(threshold_T(c, 1), SchemeMismatch);
}

TEST_CASE("regime classification uses a narrow critical band")
{
    const Vector beta = (Vector(2) << 1, 1.5).finished();
    const ModelConfig at = build_general(1, beta, 0, 0.5, 1, 0, Vector::Zero(2));
    CHECK(r0(at).regime == Regime::critical);
    CHECK(r0(at.with_r(0.999)).regime == Regime::unstable);
    CHECK(r0(at.with_r(1.001)).regime == Regime::stable);
}
