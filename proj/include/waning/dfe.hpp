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
#ifndef WANING_DFE_HPP
#define WANING_DFE_HPP

#include "waning/model.hpp"

namespace waning
{

/**
 * The (n+1)x(n+1) susceptible-block matrix A(I).
 *
 * Diagonal d_k(I), subdiagonal delta_0..delta_{n-1}, and the boosting rates omega_1..omega_n
 * along the first row. At I = 0 the disease-free equilibrium solves A S^T = -mu e_n^T;
 * for I > 0 the susceptibles of an endemic state solve A S^T = -(r I, 0, .., 0, mu)^T.
 */
struct DfeMatrix {
    Matrix a;

    /// Lower-bidiagonal part (A without the boosting row entries).
    Matrix lower() const;
    /// The boosting row vector (omega_0 = 0, omega_1, .., omega_n); A = lower() + e_0 * omega.
    Vector omega_row() const;
};

DfeMatrix assemble_A(const ModelConfig& config, double prevalence = 0.0);

/// det A(0) from the determinant-lemma product formula.
double det_A(const ModelConfig& config);

struct DfeSolution {
    Vector s;
    double c     = 0; ///< normalization constant of the Cramer form
    double det_a = 0;
};

/// Disease-free equilibrium from the explicit Cramer-rule solution.
DfeSolution solve_dfe_closed_form(const ModelConfig& config);

/// Disease-free equilibrium from a dense LU solve of A S^T = -mu e_n^T.
DfeSolution solve_dfe_numeric(const ModelConfig& config);

enum class Regime
{
    stable,
    unstable,
    critical,
};

const char* to_string(Regime regime);

struct R0Report {
    double r0            = 0;
    double threshold_sum = 0; ///< sum_k beta_k S_{k,D}
    Regime regime        = Regime::critical;
};

/// Relative width of the band around threshold_sum = r + mu reported as critical.
inline constexpr double critical_band = 1e-12;

R0Report r0(const ModelConfig& config);

/**
 * DFE stability threshold sum_k beta_k S_{k,D} for the last-only scheme, written as a
 * function of omega_n with the other parameters taken from `config`.
 *
 * Throws SchemeMismatch if `config` vaccinates any compartment other than S_n.
 */
double threshold_T(const ModelConfig& config, double omega_n);

} // namespace waning

#endif // WANING_DFE_HPP
