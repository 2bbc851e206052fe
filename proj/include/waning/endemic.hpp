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
#ifndef WANING_ENDEMIC_HPP
#define WANING_ENDEMIC_HPP

#include "waning/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace waning
{

/**
 * Susceptible profile S = A_delta(I)^{-1} R^T with R = -(r I, 0, .., 0, mu).
 *
 * Solved in O(n) by forward substitution through the bidiagonal part, parametrized by
 * S_0, then closing the system with the boosting row. Throws SingularSystemError if the
 * closing equation degenerates.
 */
Vector endemic_susceptibles(const ModelConfig& config, double prevalence);

/// beta . A_delta(I)^{-1} R^T. An endemic equilibrium satisfies F_delta(I*) = r + mu.
double F_delta(const ModelConfig& config, double prevalence);

/// The delta = 0 map, in closed form.
double F_0(const ModelConfig& config, double prevalence);

/// Q(x) = x^2 + a x + b, the numerator of r + mu - F_0(x) (requires beta_0 > 0).
struct QuadraticQ {
    double a = 0;
    double b = 0;
    bool real_roots = false;
    double y1 = 0; ///< smaller root, or real part when complex
    double y2 = 0; ///< larger root, or imaginary part magnitude when complex

    double operator()(double x) const
    {
        return (x + a) * x + b;
    }
};

QuadraticQ quadratic_Q(const ModelConfig& config);

/// beta_0 = 0 replacement for Q: the linear numerator beta_n (r+mu) x + (r+mu)(omega_n+mu) - mu beta_n.
struct LinearRoot {
    double slope     = 0;
    double intercept = 0;
    std::optional<double> root; ///< set iff the root lies in [0,1]
    bool boundary = false; ///< root exactly at 0
};

LinearRoot linear_case(const ModelConfig& config);

enum class Existence
{
    none,
    unique,
    indeterminate,
};

const char* to_string(Existence existence);

struct LocalizedInterval {
    double center = 0;
    double lo     = 0; ///< clipped to [0,1]
    double hi     = 0;
    bool meets_unit = false; ///< clipped interval intersects (0,1]
};

struct LocalizationResult {
    std::vector<LocalizedInterval> intervals; ///< one per real root of Q (or the linear root)
    double hat_c       = 0;
    double half_width  = 0;
    Existence exists   = Existence::none;
    bool validity      = false; ///< ||A_delta - A_0|| ||A_0^{-1}|| < 1/2 on [0,1]
    double contraction = 0; ///< the product above, evaluated where it is largest (I = 0)
    std::optional<std::size_t> selected; ///< interval holding the only root in (0,1]
    std::string diagnostic;
};

LocalizationResult localize(const ModelConfig& config);

enum class Certification
{
    certified_contraction,
    numeric_uncertified,
    none,
};

const char* to_string(Certification certification);

struct EndemicSolution {
    double i_star = 0;
    Vector s_star;
    double residual = 0; ///< |beta . S* - (r + mu)|
    int iterations  = 0;
    Certification certification = Certification::none;
};

struct RefineOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-13;
};

/**
 * Fixed-point refinement of the endemic prevalence inside the selected localization interval.
 *
 * With a valid contraction certificate iterates x <- y + G(x), where y is the selected root of
 * the unperturbed problem. Without one (large delta) falls back to a bracketing root search of
 * r + mu - F_delta on [0,1] and marks the result numeric_uncertified.
 *
 * Throws ConvergenceError when no realistic equilibrium is available, the root separation
 * |y1 - y2| >= delta^{1/3} fails, or the iteration does not converge.
 */
EndemicSolution refine(const ModelConfig& config, const LocalizationResult& localization,
                       const RefineOptions& options = {});

/// Operator-norm diagnostics for the perturbation argument at prevalence I.
struct NormDiagnostics {
    double diff_norm  = 0; ///< ||A_delta - A_0||_2
    double diff_schur = 0; ///< sqrt(||.||_1 ||.||_inf) of the same matrix
    double diff_bound = 0; ///< 2 delta
    double inv_norm   = 0; ///< ||A_0^{-1}||_2, from the explicit inverse
    double inv_schur  = 0;
    double inv_bound  = 0; ///< sqrt(n+1) / (beta_0 I + mu)
    double f_diff     = 0; ///< |F_delta(I) - F_0(I)|
    double f_bound    = 0; ///< 4 (n+1)^{3/2} beta_n (r+mu) delta / (beta_0 I + mu)^2
    bool contraction_ok = false; ///< diff_norm * inv_norm < 1/2
    bool within_bounds  = false; ///< every computed quantity below its bound
};

NormDiagnostics norm_bounds(const ModelConfig& config, double prevalence);

/// Explicit inverse of A_0(I) (the delta = 0 matrix): diagonal 1/d_k, first row -omega_k/(d_0 d_k).
Matrix explicit_A0_inverse(const ModelConfig& config, double prevalence);

} // namespace waning

#endif // WANING_ENDEMIC_HPP
