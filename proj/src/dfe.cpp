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
#include "waning/dfe.hpp"
#include "waning/errors.hpp"

#include <Eigen/LU>

#include <cmath>

namespace waning
{

Matrix DfeMatrix::lower() const
{
    Matrix l = a;
    l.row(0).tail(a.cols() - 1).setZero();
    return l;
}

Vector DfeMatrix::omega_row() const
{
    Vector w = a.row(0).transpose();
    w[0]     = 0;
    return w;
}

DfeMatrix assemble_A(const ModelConfig& config, double prevalence)
{
    const int n            = config.n();
    const DerivedRates& dr = config.rates();
    const Vector d         = d_coefficients(config, prevalence);

    Matrix a = Matrix::Zero(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
        a(k, k) = d[k];
        if (k > 0) {
            a(k, k - 1) = dr.delta_i[k - 1];
            a(0, k)     = dr.omega_i[k];
        }
    }
    return DfeMatrix{std::move(a)};
}

double det_A(const ModelConfig& config)
{
    // det A = det(lower) * (1 + omega lower^{-1} e_0); lower^{-1} e_0 has the explicit entries
    // -(1/|d_k|) prod_{i<k} delta_i/|d_i| (empty product = 1).
    const Vector d         = d_coefficients(config, 0.0);
    const DerivedRates& dr = config.rates();

    double diagonal = 1;
    double chain    = 1; // prod_{i<k} delta_i / |d_i|
    double lemma    = 0;
    for (int k = 0; k <= config.n(); ++k) {
        const double abs_d = -d[k];
        diagonal *= d[k];
        lemma += dr.omega_i[k] / abs_d * chain;
        chain *= dr.delta_i[k] / abs_d;
    }
    return diagonal * (1 - lemma);
}

DfeSolution solve_dfe_closed_form(const ModelConfig& config)
{
    const int n            = config.n();
    const double mu        = config.mu();
    const DerivedRates& dr = config.rates();
    const Vector abs_d     = -d_coefficients(config, 0.0);

    DfeSolution sol;
    sol.det_a = det_A(config);
    sol.c     = config.omega_n() * mu / std::abs(sol.det_a);

    // suffix[k] = prod_{i=k+1}^{n-1} |d_i|, empty product = 1
    Vector suffix(n);
    suffix[n - 1] = 1;
    for (int k = n - 2; k >= 0; --k) {
        suffix[k] = suffix[k + 1] * abs_d[k + 1];
    }

    sol.s.resize(n + 1);
    double waned = 1; // prod_{i<k} delta_i
    for (int k = 0; k < n; ++k) {
        sol.s[k] = sol.c * waned * suffix[k];
        waned *= dr.delta_i[k];
    }
    sol.s[n] = mu / abs_d[n] + sol.c / abs_d[n] * waned;
    return sol;
}

DfeSolution solve_dfe_numeric(const ModelConfig& config)
{
    const int n        = config.n();
    const DfeMatrix am = assemble_A(config, 0.0);

    Eigen::FullPivLU<Matrix> lu(am.a);
    if (!lu.isInvertible()) {
        throw SingularSystemError("disease-free system matrix is singular", 0.0);
    }
    Vector rhs = Vector::Zero(n + 1);
    rhs[n]     = -config.mu();

    DfeSolution sol;
    sol.s     = lu.solve(rhs);
    sol.det_a = lu.determinant();
    // S_0 = c prod_{i=1}^{n-1} |d_i|
    double scale = 1;
    for (int k = 1; k < n; ++k) {
        scale *= -am.a(k, k);
    }
    sol.c = sol.s[0] / scale;
    return sol;
}

const char* to_string(Regime regime)
{
    switch (regime) {
    case Regime::stable:
        return "stable";
    case Regime::unstable:
        return "unstable";
    case Regime::critical:
        return "critical";
    }
    return "unknown";
}

R0Report r0(const ModelConfig& config)
{
    const DfeSolution dfe   = solve_dfe_closed_form(config);
    const double removal    = config.r() + config.mu();
    R0Report report;
    report.threshold_sum = config.beta().dot(dfe.s);
    report.r0            = report.threshold_sum / removal;
    const double gap     = report.threshold_sum - removal;
    if (std::abs(gap) < critical_band * removal) {
        report.regime = Regime::critical;
    }
    else {
        report.regime = gap < 0 ? Regime::stable : Regime::unstable;
    }
    return report;
}

double threshold_T(const ModelConfig& config, double omega_n)
{
    if (config.scheme() != Scheme::last_only) {
        throw SchemeMismatch("threshold_T requires a last-only vaccination scheme");
    }
    if (!std::isfinite(omega_n) || omega_n < 0) {
        throw ConfigError("omega_n must be finite and >= 0");
    }
    const int n         = config.n();
    const double mu     = config.mu();
    const double delta  = config.delta();
    const Vector& beta  = config.beta();
    const double sigma  = delta / (delta + mu);
    const double xi     = omega_n / (omega_n + mu);
    const double sigman = std::pow(sigma, n);

    double weighted = 0; // sum_{i<n} beta_i sigma^i
    double power    = 1;
    for (int i = 0; i < n; ++i) {
        weighted += beta[i] * power;
        power *= sigma;
    }
    const double a = mu / (delta + mu) * weighted;
    return (a * xi + beta[n] * (1 - xi)) / (1 - sigman * xi);
}

} // namespace waning
