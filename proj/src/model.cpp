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
#include "waning/model.hpp"
#include "waning/errors.hpp"

#include <cmath>
#include <string>

namespace waning
{

namespace
{

void require_rate(double value, const char* name, bool strictly_positive)
{
    if (!std::isfinite(value)) {
        throw ConfigError(std::string(name) + " must be finite");
    }
    if (strictly_positive ? value <= 0 : value < 0) {
        throw ConfigError(std::string(name) + (strictly_positive ? " must be > 0" : " must be >= 0"));
    }
}

} // namespace

ModelConfig build_general(int n, Vector beta, double delta, double mu, double r, double omega, Vector p)
{
    if (n < 1) {
        throw ConfigError("n must be >= 1");
    }
    const auto size = static_cast<Eigen::Index>(n) + 1;
    if (beta.size() != size) {
        throw ConfigError("beta must have n+1 = " + std::to_string(size) + " entries, got " +
                          std::to_string(beta.size()));
    }
    if (p.size() != size) {
        throw ConfigError("p must have n+1 = " + std::to_string(size) + " entries, got " + std::to_string(p.size()));
    }
    require_rate(delta, "delta", false);
    require_rate(mu, "mu", true);
    require_rate(r, "r", true);
    require_rate(omega, "omega", false);
    for (Eigen::Index k = 0; k < size; ++k) {
        if (!std::isfinite(beta[k]) || beta[k] < 0) {
            throw ConfigError("beta[" + std::to_string(k) + "] must be finite and >= 0");
        }
        if (k > 0 && beta[k] < beta[k - 1]) {
            throw ConfigError("beta must be non-decreasing (beta[" + std::to_string(k) + "] < beta[" +
                              std::to_string(k - 1) + "])");
        }
        if (!(p[k] >= 0 && p[k] <= 1)) {
            throw ConfigError("p[" + std::to_string(k) + "] must lie in [0,1]");
        }
    }
    if (p[0] != 0) {
        throw ConfigError("p[0] must be 0: the most immune compartment is never boosted");
    }

    ModelConfig config;
    config.n_     = n;
    config.beta_  = std::move(beta);
    config.delta_ = delta;
    config.mu_    = mu;
    config.r_     = r;
    config.omega_ = omega;
    config.p_     = std::move(p);

    config.rates_.omega_i = config.p_ * omega;
    config.rates_.delta_i = (Vector::Ones(size) - config.p_) * delta;
    config.rates_.delta_i[n] = 0;
    return config;
}

ModelConfig build_all_but_last(int n, Vector beta, double delta, double mu, double r, double omega,
                               const Vector& p_interior)
{
    if (n < 1 || p_interior.size() != n - 1) {
        throw ConfigError("p_interior must have n-1 entries");
    }
    Vector p = Vector::Zero(n + 1);
    p.segment(1, n - 1) = p_interior;
    return build_general(n, std::move(beta), delta, mu, r, omega, std::move(p));
}

ModelConfig build_last_only(int n, Vector beta, double delta, double mu, double r, double omega, double p_n)
{
    if (n < 1) {
        throw ConfigError("n must be >= 1");
    }
    Vector p = Vector::Zero(n + 1);
    p[n]     = p_n;
    return build_general(n, std::move(beta), delta, mu, r, omega, std::move(p));
}

Scheme ModelConfig::scheme() const
{
    if (p_.head(n_).isZero(0)) {
        return Scheme::last_only;
    }
    if (p_[n_] == 0) {
        return Scheme::all_but_last;
    }
    return Scheme::general;
}

ModelConfig ModelConfig::with_beta(Vector beta) const
{
    return build_general(n_, std::move(beta), delta_, mu_, r_, omega_, p_);
}
ModelConfig ModelConfig::with_delta(double delta) const
{
    return build_general(n_, beta_, delta, mu_, r_, omega_, p_);
}
ModelConfig ModelConfig::with_mu(double mu) const
{
    return build_general(n_, beta_, delta_, mu, r_, omega_, p_);
}
ModelConfig ModelConfig::with_r(double r) const
{
    return build_general(n_, beta_, delta_, mu_, r, omega_, p_);
}
ModelConfig ModelConfig::with_omega(double omega) const
{
    return build_general(n_, beta_, delta_, mu_, r_, omega, p_);
}
ModelConfig ModelConfig::with_p(Vector p) const
{
    return build_general(n_, beta_, delta_, mu_, r_, omega_, std::move(p));
}

StateVector StateVector::on_simplex(Vector s, double i)
{
    if (s.size() < 2) {
        throw ConfigError("state needs at least two susceptible compartments");
    }
    if (!s.allFinite() || !std::isfinite(i)) {
        throw ConfigError("state entries must be finite");
    }
    if ((s.array() < 0).any() || i < 0) {
        throw ConfigError("state entries must be non-negative");
    }
    const double total = s.sum() + i;
    if (std::abs(total - 1.0) > simplex_tolerance) {
        throw ConfigError("state must sum to 1 (got " + std::to_string(total) + ")");
    }
    return StateVector{std::move(s), i};
}

Vector StateVector::flat() const
{
    Vector y(s.size() + 1);
    y.head(s.size()) = s;
    y[s.size()]      = i;
    return y;
}

StateVector StateVector::from_flat(const Vector& y)
{
    return StateVector{y.head(y.size() - 1), y[y.size() - 1]};
}

StateVector normalize(const StateVector& state)
{
    if ((state.s.array() < 0).any() || state.i < 0) {
        throw ConfigError("cannot normalize a state with negative entries");
    }
    const double total = state.total();
    if (!(total > 0)) {
        throw ConfigError("cannot normalize a zero state");
    }
    return StateVector{state.s / total, state.i / total};
}

void vector_field_flat(const ModelConfig& config, const Vector& y, Vector& dy)
{
    const int n            = config.n();
    const Vector& beta     = config.beta();
    const DerivedRates& dr = config.rates();
    const double mu        = config.mu();
    const double I         = y[n + 1];

    dy.resize(n + 2);
    double boosted   = 0; // sum_k omega_k S_k
    double infection = 0; // sum_k beta_k S_k
    for (int k = 0; k <= n; ++k) {
        boosted += dr.omega_i[k] * y[k];
        infection += beta[k] * y[k];
    }

    for (int k = 0; k <= n; ++k) {
        double v = -(dr.omega_i[k] + dr.delta_i[k] + mu + beta[k] * I) * y[k];
        if (k > 0) {
            v += dr.delta_i[k - 1] * y[k - 1];
        }
        dy[k] = v;
    }
    dy[0] += boosted + config.r() * I;
    dy[n] += mu;
    dy[n + 1] = I * (infection - config.r() - mu);
}

StateDerivative vector_field(const ModelConfig& config, const StateVector& state)
{
    if (state.n() != config.n()) {
        throw ConfigError("state has " + std::to_string(state.s.size()) + " susceptible compartments, config expects " +
                          std::to_string(config.n() + 1));
    }
    Vector dy;
    vector_field_flat(config, state.flat(), dy);
    return StateDerivative{dy.head(config.n() + 1), dy[config.n() + 1]};
}

Vector d_coefficients(const ModelConfig& config, double prevalence)
{
    if (prevalence < 0) {
        throw ConfigError("prevalence must be >= 0");
    }
    const DerivedRates& dr = config.rates();
    return -(dr.delta_i.array() + dr.omega_i.array() + config.mu() + config.beta().array() * prevalence).matrix();
}

} // namespace waning
