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

#include "waning/errors.hpp"
#include "waning/io.hpp"
#include "waning/model.hpp"

#include <doctest.h>

using namespace waning;

namespace
{

Vector vec(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs) {
        v[k++] = x;
    }
    return v;
}

} // namespace

TEST_CASE("builder rejects invalid parameters")
{
    const Vector beta = vec({1, 2, 3});
    const Vector p    = vec({0, 0.5, 0.5});
    CHECK_NOTHROW(build_general(2, beta, 0.1, 0.02, 1, 1, p));
    CHECK_THROWS_AS(build_general(0, vec({1}), 0.1, 0.02, 1, 1, vec({0})), ConfigError);
    CHECK_THROWS_AS(build_general(2, vec({1, 2}), 0.1, 0.02, 1, 1, p), ConfigError);
    CHECK_THROWS_AS(build_general(2, vec({3, 2, 1}), 0.1, 0.02, 1, 1, p), ConfigError);
    CHECK_THROWS_AS(build_general(2, beta, -0.1, 0.02, 1, 1, p), ConfigError);
    CHECK_THROWS_AS(build_general(2, beta, 0.1, 0, 1, 1, p), ConfigError);
    CHECK_THROWS_AS(build_general(2, beta, 0.1, 0.02, 0, 1, p), ConfigError);
    CHECK_THROWS_AS(build_general(2, beta, 0.1, 0.02, 1, -1, p), ConfigError);
    CHECK_THROWS_AS(build_general(2, beta, 0.1, 0.02, 1, 1, vec({0.1, 0.5, 0.5})), ConfigError);
    CHECK_THROWS_AS(build_general(2, beta, 0.1, 0.02, 1, 1, vec({0, 1.5, 0.5})), ConfigError);
    CHECK_THROWS_AS(build_general(2, beta, std::nan(""), 0.02, 1, 1, p), ConfigError);
    CHECK_THROWS_AS(build_all_but_last(2, beta, 0.1, 0.02, 1, 1, vec({0.5, 0.5})), ConfigError);
}

TEST_CASE("derived rates follow the coverage split")
{
    const ModelConfig c = build_general(2, vec({1, 2, 3}), 0.4, 0.02, 1, 10, vec({0, 0.25, 0.5}));
    const DerivedRates& dr = c.rates();
    CHECK(dr.omega_i[0] == 0);
    CHECK(dr.omega_i[1] == doctest::Approx(2.5));
    CHECK(dr.omega_i[2] == doctest::Approx(5));
    CHECK(dr.delta_i[0] == doctest::Approx(0.4));
    CHECK(dr.delta_i[1] == doctest::Approx(0.3));
    CHECK(dr.delta_i[2] == 0);
    CHECK(c.omega_n() == doctest::Approx(5));
    CHECK(c.scheme() == Scheme::general);
    CHECK(build_last_only(2, vec({1, 2, 3}), 0.4, 0.02, 1, 10, 0.5).scheme() == Scheme::last_only);
    CHECK(build_all_but_last(2, vec({1, 2, 3}), 0.4, 0.02, 1, 10, vec({0.5})).scheme() == Scheme::all_but_last);
}

TEST_CASE("equal end transmissions disable strict monotonicity")
{
    CHECK_FALSE(build_last_only(1, vec({2, 2}), 0, 0.1, 1, 0, 0).strictly_monotone());
    CHECK(build_last_only(1, vec({1, 2}), 0, 0.1, 1, 0, 0).strictly_monotone());
}

TEST_CASE("vector field conserves the population")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n              = 1 + trial % 8;
        const ModelConfig c      = gen::general(rng, n);
        const StateVector st     = gen::simplex_point(rng, n);
        const StateDerivative f  = vector_field(c, st);
        const double scale       = std::max(f.ds.cwiseAbs().maxCoeff(), std::abs(f.di));
        CHECK(std::abs(f.sum()) <= 1e-14 * scale + 1e-300);
    }
}

TEST_CASE("vector field matches the term-by-term equations")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const int n          = 1 + trial % 6;
        const ModelConfig c  = gen::general(rng, n);
        const StateVector st = gen::simplex_point(rng, n);
        Vector dy;
        vector_field_flat(c, st.flat(), dy);
        const Vector expect = oracle::rhs(c, st.flat());
        CHECK((dy - expect).cwiseAbs().maxCoeff() <= 1e-12 * (1 + expect.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("special-case builders agree with the general builder exactly")
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const int n       = 2 + trial % 5;
        const Vector beta = gen::sorted_betas(rng, n, 0.1, 10);
        const double d = 0.3, mu = 0.05, r = 2, w = 4;
        Vector interior(n - 1);
        for (int k = 0; k < n - 1; ++k) {
            interior[k] = gen::uniform(rng, 0, 1);
        }
        Vector p_abl = Vector::Zero(n + 1);
        p_abl.segment(1, n - 1) = interior;
        const ModelConfig abl   = build_all_but_last(n, beta, d, mu, r, w, interior);
        const ModelConfig abl_g = build_general(n, beta, d, mu, r, w, p_abl);

        const double pn        = gen::uniform(rng, 0, 1);
        Vector p_lo            = Vector::Zero(n + 1);
        p_lo[n]                = pn;
        const ModelConfig lo   = build_last_only(n, beta, d, mu, r, w, pn);
        const ModelConfig lo_g = build_general(n, beta, d, mu, r, w, p_lo);

        const StateVector st = gen::simplex_point(rng, n);
        Vector a, b;
        vector_field_flat(abl, st.flat(), a);
        vector_field_flat(abl_g, st.flat(), b);
        CHECK(a == b);
        vector_field_flat(lo, st.flat(), a);
        vector_field_flat(lo_g, st.flat(), b);
        CHECK(a == b);
    }
}

TEST_CASE("without vaccination and infection the field is the infection-free system")
{
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        const int n         = 1 + trial % 6;
        const double delta  = gen::log_uniform(rng, 1e-3, 5);
        const double mu     = gen::log_uniform(rng, 1e-3, 1);
        const ModelConfig c = build_general(n, gen::sorted_betas(rng, n, 0.1, 10), delta, mu, 1, 3, Vector::Zero(n + 1));
        StateVector st      = gen::simplex_point(rng, n);
        st.s /= st.s.sum();
        st.i = 0;
        const StateDerivative f = vector_field(c, st);
        CHECK(f.ds[0] == doctest::Approx(-(delta + mu) * st.s[0]));
        for (int k = 1; k < n; ++k) {
            CHECK(f.ds[k] == doctest::Approx(delta * st.s[k - 1] - (delta + mu) * st.s[k]));
        }
        CHECK(f.ds[n] == doctest::Approx(mu + delta * st.s[n - 1] - mu * st.s[n]));
        CHECK(f.di == 0);
    }
}

TEST_CASE("state validation and explicit normalization")
{
    CHECK_NOTHROW(StateVector::on_simplex(vec({0.5, 0.5}), 0));
    CHECK_THROWS_AS(StateVector::on_simplex(vec({0.5, 0.6}), 0), ConfigError);
    CHECK_THROWS_AS(StateVector::on_simplex(vec({-0.1, 1.1}), 0), ConfigError);
    const StateVector fixed = normalize(StateVector{vec({1, 2}), 1});
    CHECK(fixed.total() == doctest::Approx(1));
    CHECK(fixed.s[1] == doctest::Approx(0.5));
    const ModelConfig c = build_last_only(2, vec({1, 2, 3}), 0.1, 0.1, 1, 1, 0.5);
    CHECK_THROWS_AS(vector_field(c, StateVector{vec({0.5, 0.5}), 0}), ConfigError);
}

TEST_CASE("config JSON is strict and round-trips")
{
    const ModelConfig c = build_general(2, vec({1, 2, 3}), 0.1, 0.02, 1.5, 4, vec({0, 0.3, 0.6}));
    const Json j        = config_to_json(c);
    CHECK(config_from_json(j) == c);

    Json extra      = j;
    extra["sigma"]  = 1;
    CHECK_THROWS_AS(config_from_json(extra), ConfigError);
    Json missing = j;
    missing.erase("mu");
    CHECK_THROWS_AS(config_from_json(missing), ConfigError);
    CHECK_THROWS_WITH_AS(parse_json_text("{\n  \"n\": 2,\n  oops\n}"), doctest::Contains("line 3"), ConfigError);
    CHECK(config_hash(c) == config_hash(config_from_json(j)));
    CHECK(config_hash(c) != config_hash(c.with_mu(0.03)));
    CHECK(format_double(0.1) == "0.10000000000000001");
}
