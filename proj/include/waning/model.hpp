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
#ifndef WANING_MODEL_HPP
#define WANING_MODEL_HPP

#include <Eigen/Core>

namespace waning
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Tolerance on |sum(s) + i - 1| accepted for input states.
inline constexpr double simplex_tolerance = 1e-9;

/**
 * Per-compartment rates derived from the coverage vector.
 *
 * omega_i[k] = p_k * omega and delta_i[k] = (1 - p_k) * delta for k < n.
 * delta_i[n] is stored as 0 since nothing wanes out of the last compartment.
 */
struct DerivedRates {
    Vector omega_i;
    Vector delta_i;
};

enum class Scheme
{
    general,
    all_but_last, ///< p_n = 0, interior coverage arbitrary
    last_only, ///< p_k = 0 for k < n
};

/**
 * Parameters of the n-compartment waning-immunity model.
 *
 * Susceptible compartments S_0 (most immune) .. S_n (least immune) wane forward at rate
 * delta, are boosted back to S_0 at rate omega with coverage p_k, get infected at rate
 * beta_k * I, and are born into S_n. Instances are immutable and always valid; use the
 * build_* functions to construct them.
 */
class ModelConfig
{
public:
    int n() const
    {
        return n_;
    }
    const Vector& beta() const
    {
        return beta_;
    }
    double delta() const
    {
        return delta_;
    }
    double mu() const
    {
        return mu_;
    }
    double r() const
    {
        return r_;
    }
    double omega() const
    {
        return omega_;
    }
    const Vector& p() const
    {
        return p_;
    }
    const DerivedRates& rates() const
    {
        return rates_;
    }
    double omega_n() const
    {
        return rates_.omega_i[n_];
    }
    double beta_0() const
    {
        return beta_[0];
    }
    double beta_n() const
    {
        return beta_[n_];
    }
    /// beta_0 < beta_n; several strict-monotonicity results only hold in that case.
    bool strictly_monotone() const
    {
        return beta_[0] < beta_[n_];
    }
    Scheme scheme() const;

    ModelConfig with_beta(Vector beta) const;
    ModelConfig with_delta(double delta) const;
    ModelConfig with_mu(double mu) const;
    ModelConfig with_r(double r) const;
    ModelConfig with_omega(double omega) const;
    ModelConfig with_p(Vector p) const;

    friend ModelConfig build_general(int n, Vector beta, double delta, double mu, double r, double omega,
                                     Vector p);

    friend bool operator==(const ModelConfig& a, const ModelConfig& b)
    {
        return a.n_ == b.n_ && a.beta_ == b.beta_ && a.delta_ == b.delta_ && a.mu_ == b.mu_ && a.r_ == b.r_ &&
               a.omega_ == b.omega_ && a.p_ == b.p_;
    }

private:
    ModelConfig() = default;

    int n_ = 0;
    Vector beta_;
    double delta_ = 0;
    double mu_ = 0;
    double r_ = 0;
    double omega_ = 0;
    Vector p_;
    DerivedRates rates_;
};

/// Validates and builds a configuration. Throws ConfigError on any violated constraint.
ModelConfig build_general(int n, Vector beta, double delta, double mu, double r, double omega, Vector p);

/// Coverage of S_1..S_{n-1} only; p_interior has n-1 entries and p_n is set to 0.
ModelConfig build_all_but_last(int n, Vector beta, double delta, double mu, double r, double omega,
                               const Vector& p_interior);

/// Coverage of S_n only.
ModelConfig build_last_only(int n, Vector beta, double delta, double mu, double r, double omega, double p_n);

/// A point (S_0..S_n, I) of the unit simplex.
struct StateVector {
    Vector s;
    double i = 0;

    /// Validates non-negativity and the normalization sum(s) + i = 1 within simplex_tolerance.
    static StateVector on_simplex(Vector s, double i);

    int n() const
    {
        return static_cast<int>(s.size()) - 1;
    }
    double total() const
    {
        return s.sum() + i;
    }
    /// (S_0, .., S_n, I) as one vector.
    Vector flat() const;
    static StateVector from_flat(const Vector& y);
};

/// Rescales a non-negative state onto the simplex. Callers opt in explicitly.
StateVector normalize(const StateVector& state);

struct StateDerivative {
    Vector ds;
    double di = 0;

    double sum() const
    {
        return ds.sum() + di;
    }
};

/// Right-hand side of the model ODE at the given state.
StateDerivative vector_field(const ModelConfig& config, const StateVector& state);

/// Same vector field on a flat (S_0..S_n, I) vector; used by the integrator.
void vector_field_flat(const ModelConfig& config, const Vector& y, Vector& dy);

/// Diagonal coefficients d_k(I) = -(delta_k + omega_k + mu + beta_k I); all strictly negative.
Vector d_coefficients(const ModelConfig& config, double prevalence);

} // namespace waning

#endif // WANING_MODEL_HPP
