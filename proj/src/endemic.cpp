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
#include "waning/endemic.hpp"
#include "waning/dfe.hpp"
#include "waning/errors.hpp"

#include <Eigen/SVD>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace waning
{

namespace
{

double spectral_norm(const Matrix& m)
{
    if (m.isZero(0)) {
        return 0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double schur_norm(const Matrix& m)
{
    const double one = m.cwiseAbs().colwise().sum().maxCoeff();
    const double inf = m.cwiseAbs().rowwise().sum().maxCoeff();
    return std::sqrt(one * inf);
}

/// (beta_0 x + mu)(beta_n x + mu + omega_n)
double denominator_product(const ModelConfig& c, double x)
{
    return (c.beta_0() * x + c.mu()) * (c.beta_n() * x + c.mu() + c.omega_n());
}

EndemicSolution finish(const ModelConfig& config, double prevalence, int iterations, Certification cert)
{
    EndemicSolution sol;
    sol.i_star        = prevalence;
    sol.s_star        = endemic_susceptibles(config, prevalence);
    sol.residual      = std::abs(config.beta().dot(sol.s_star) - (config.r() + config.mu()));
    sol.iterations    = iterations;
    sol.certification = cert;
    return sol;
}

EndemicSolution bracket_search(const ModelConfig& config)
{
    const double removal = config.r() + config.mu();
    auto g               = [&](double x) {
        return removal - F_delta(config, x);
    };

    constexpr int samples = 400;
    double x_prev         = 0;
    double g_prev         = g(0);
    for (int k = 1; k <= samples; ++k) {
        const double x   = static_cast<double>(k) / samples;
        const double g_x = g(x);
        if (g_prev < 0 && g_x >= 0) {
            if (g_x == 0) {
                return finish(config, x, k, Certification::numeric_uncertified);
            }
            boost::uintmax_t max_iter = 200;
            const auto tol            = boost::math::tools::eps_tolerance<double>(52);
            const auto [lo, hi] = boost::math::tools::toms748_solve(g, x_prev, x, g_prev, g_x, tol, max_iter);
            return finish(config, 0.5 * (lo + hi), k + static_cast<int>(max_iter),
                          Certification::numeric_uncertified);
        }
        x_prev = x;
        g_prev = g_x;
    }
    throw ConvergenceError("no sign change of r + mu - F_delta on (0,1]: no endemic equilibrium found");
}

} // namespace

Vector endemic_susceptibles(const ModelConfig& config, double prevalence)
{
    const int n            = config.n();
    const DerivedRates& dr = config.rates();
    const Vector d         = d_coefficients(config, prevalence);

    // S_k = offset_k + slope_k S_0 for rows 1..n, then the boosting row fixes S_0.
    Vector offset(n + 1), slope(n + 1);
    offset[0] = 0;
    slope[0]  = 1;
    for (int k = 1; k <= n; ++k) {
        const double rhs = (k == n) ? -config.mu() : 0.0;
        offset[k]        = (rhs - dr.delta_i[k - 1] * offset[k - 1]) / d[k];
        slope[k]         = -dr.delta_i[k - 1] * slope[k - 1] / d[k];
    }
    double pivot = d[0];
    double rhs0  = -config.r() * prevalence;
    for (int k = 1; k <= n; ++k) {
        pivot += dr.omega_i[k] * slope[k];
        rhs0 -= dr.omega_i[k] * offset[k];
    }
    if (!(std::abs(pivot) > 64 * std::numeric_limits<double>::epsilon() * std::abs(d[0]))) {
        throw SingularSystemError("A_delta(I) is numerically singular", prevalence);
    }
    const double s0 = rhs0 / pivot;
    return offset + slope * s0;
}

double F_delta(const ModelConfig& config, double prevalence)
{
    return config.beta().dot(endemic_susceptibles(config, prevalence));
}

double F_0(const ModelConfig& config, double prevalence)
{
    if (prevalence < 0) {
        throw ConfigError("prevalence must be >= 0");
    }
    const double b0    = config.beta_0();
    const double bn    = config.beta_n();
    const double mu    = config.mu();
    const double wn    = config.omega_n();
    const double first = b0 * prevalence + mu;
    const double last  = bn * prevalence + mu + wn;
    return b0 * mu * wn / (first * last) + b0 * config.r() * prevalence / first + bn * mu / last;
}

QuadraticQ quadratic_Q(const ModelConfig& config)
{
    const double b0 = config.beta_0();
    const double bn = config.beta_n();
    if (!(b0 > 0)) {
        throw ConfigError("quadratic_Q requires beta_0 > 0; use linear_case for beta_0 = 0");
    }
    const double mu = config.mu();
    const double r  = config.r();
    const double wn = config.omega_n();

    QuadraticQ q;
    q.a = (b0 * (mu + wn) + bn * (mu + r - b0)) / (b0 * bn);
    q.b = ((wn + mu) * (mu + r) - (b0 * wn + bn * mu)) / (b0 * bn);

    const double disc = q.a * q.a - 4 * q.b;
    if (disc < 0) {
        q.real_roots = false;
        q.y1         = -q.a / 2;
        q.y2         = std::sqrt(-disc) / 2;
        return q;
    }
    q.real_roots       = true;
    const double root  = std::sqrt(disc);
    const double large = -0.5 * (q.a + std::copysign(root, q.a));
    const double small = large != 0 ? q.b / large : 0.0;
    q.y1               = std::min(large, small);
    q.y2               = std::max(large, small);
    return q;
}

LinearRoot linear_case(const ModelConfig& config)
{
    if (config.beta_0() != 0) {
        throw ConfigError("linear_case requires beta_0 = 0");
    }
    const double removal = config.r() + config.mu();
    LinearRoot lin;
    lin.slope     = config.beta_n() * removal;
    lin.intercept = removal * (config.omega_n() + config.mu()) - config.mu() * config.beta_n();
    if (lin.slope == 0) {
        return lin;
    }
    const double x = -lin.intercept / lin.slope;
    if (x >= 0 && x <= 1) {
        lin.root     = x;
        lin.boundary = (lin.intercept == 0);
    }
    return lin;
}

const char* to_string(Existence existence)
{
    switch (existence) {
    case Existence::none:
        return "none";
    case Existence::unique:
        return "unique";
    case Existence::indeterminate:
        return "indeterminate";
    }
    return "unknown";
}

const char* to_string(Certification certification)
{
    switch (certification) {
    case Certification::certified_contraction:
        return "certified-contraction";
    case Certification::numeric_uncertified:
        return "numeric-uncertified";
    case Certification::none:
        return "none";
    }
    return "unknown";
}

LocalizationResult localize(const ModelConfig& config)
{
    const int n          = config.n();
    const double delta   = config.delta();
    const double mu      = config.mu();
    const double removal = config.r() + mu;
    const double b0      = config.beta_0();
    const double bn      = config.beta_n();
    const double wn      = config.omega_n();
    const double dim     = n + 1.0;

    LocalizationResult loc;

    // ||A_0(I)^{-1}|| is largest at I = 0 (entrywise non-increasing magnitudes, fixed signs)
    const NormDiagnostics at_zero = norm_bounds(config, 0.0);
    loc.contraction              = at_zero.diff_norm * at_zero.inv_norm;
    loc.validity                 = loc.contraction < 0.5;

    std::vector<double> roots;
    bool q_sign_change = true;
    double min_abs_q   = 0;
    if (b0 > 0) {
        const double c_tilde = 4 * std::pow(dim, 1.5) * removal / (mu * mu * mu * b0);
        loc.hat_c            = c_tilde * denominator_product(config, 1.0);
        loc.half_width       = std::sqrt(2 * delta * loc.hat_c);

        const QuadraticQ q = quadratic_Q(config);
        if (!q.real_roots) {
            const double min_q = q.b - q.a * q.a / 4;
            if (min_q > loc.hat_c * delta) {
                loc.exists     = Existence::none;
                loc.diagnostic = "Q has no real roots";
            }
            else {
                loc.exists     = Existence::indeterminate;
                loc.diagnostic = "Q has complex roots but |Q| dips below the perturbation bound";
            }
            return loc;
        }
        roots = {q.y1, q.y2};
        q_sign_change = (q.y1 >= 0 && q.y1 <= 1) || (q.y2 >= 0 && q.y2 <= 1);
        const double vertex = std::clamp(-q.a / 2, 0.0, 1.0);
        min_abs_q           = std::min({std::abs(q(0.0)), std::abs(q(1.0)), std::abs(q(vertex))});
    }
    else {
        const LinearRoot lin = linear_case(config);
        if (lin.slope == 0) {
            loc.exists     = Existence::none;
            loc.diagnostic = "beta vanishes identically";
            return loc;
        }
        loc.hat_c      = 4 * std::pow(dim, 1.5) * bn * removal * (bn + mu + wn) / (mu * mu);
        loc.half_width = loc.hat_c * delta / lin.slope;
        roots          = {-lin.intercept / lin.slope};
    }

    std::size_t roots_inside = 0, meeting = 0;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        LocalizedInterval iv;
        iv.center     = roots[k];
        iv.lo         = std::max(0.0, roots[k] - loc.half_width);
        iv.hi         = std::min(1.0, roots[k] + loc.half_width);
        iv.meets_unit = iv.hi > 0 && iv.lo <= iv.hi && iv.lo <= 1;
        if (roots[k] > 0 && roots[k] <= 1) {
            ++roots_inside;
            loc.selected = k;
        }
        meeting += iv.meets_unit ? 1 : 0;
        loc.intervals.push_back(iv);
    }
    if (roots_inside != 1) {
        loc.selected.reset();
    }

    // F_delta(I) <= beta_n (1 - I) for every delta
    if (bn < removal) {
        loc.exists     = Existence::none;
        loc.diagnostic = "beta_n < r + mu bounds the force of infection below removal";
        loc.selected.reset();
        return loc;
    }
    if (meeting == 0) {
        loc.exists     = Existence::none;
        loc.diagnostic = "localization intervals miss (0,1]";
        return loc;
    }
    if (roots_inside == 2) {
        loc.exists     = Existence::indeterminate;
        loc.diagnostic = "both roots of Q lie in (0,1]";
        return loc;
    }
    if (roots_inside == 0 && !q_sign_change && min_abs_q > loc.hat_c * delta) {
        // Q keeps its sign on [0,1] and stays outside the perturbation band
        loc.exists     = Existence::none;
        loc.diagnostic = "|Q| exceeds the perturbation bound on all of [0,1]";
        return loc;
    }
    if (roots_inside == 0) {
        loc.exists     = Existence::indeterminate;
        loc.diagnostic = "no root in (0,1] but a localization interval reaches into it";
        return loc;
    }
    if (roots.size() == 2 && delta > 0 && std::abs(roots[1] - roots[0]) < std::cbrt(delta)) {
        loc.exists     = Existence::indeterminate;
        loc.diagnostic = "roots closer than delta^(1/3)";
        return loc;
    }
    if (meeting > 1) {
        loc.exists     = Existence::indeterminate;
        loc.diagnostic = "both localization intervals reach into (0,1]";
        return loc;
    }
    loc.exists = Existence::unique;
    return loc;
}

EndemicSolution refine(const ModelConfig& config, const LocalizationResult& localization,
                       const RefineOptions& options)
{
    if (!localization.validity) {
        return bracket_search(config);
    }
    if (!localization.selected) {
        throw ConvergenceError(std::string("no single localization root in (0,1] (") +
                               to_string(localization.exists) +
                               (localization.diagnostic.empty() ? "" : ": " + localization.diagnostic) + ")");
    }
    const std::size_t sel = *localization.selected;
    const double y        = localization.intervals[sel].center;
    const double delta    = config.delta();

    const bool quadratic = config.beta_0() > 0;
    double y_other       = 0;
    if (quadratic) {
        y_other = localization.intervals[1 - sel].center;
        if (delta > 0 && std::abs(y - y_other) < std::cbrt(delta)) {
            throw ConvergenceError("root separation |y1 - y2| < delta^(1/3)");
        }
    }
    const Certification cert = localization.exists == Existence::unique ? Certification::certified_contraction
                                                                         : Certification::numeric_uncertified;
    if (delta == 0) {
        if (!(y > 0 && y <= 1)) {
            throw ConvergenceError("root I*=" + std::to_string(y) + " lies outside (0,1]");
        }
        return finish(config, y, 0, cert);
    }

    const double bn      = config.beta_n();
    const double b0      = config.beta_0();
    const double mu      = config.mu();
    const double removal = config.r() + mu;

    auto shift = [&](double x) {
        const double gap = F_delta(config, x) - F_0(config, x);
        if (quadratic) {
            return denominator_product(config, x) / (b0 * bn * mu * (x - y_other)) * gap;
        }
        return (bn * x + mu + config.omega_n()) / (bn * removal) * gap;
    };

    double x = y;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const double next = y + shift(std::max(x, 0.0));
        if (!std::isfinite(next)) {
            throw ConvergenceError("fixed-point iteration produced a non-finite iterate");
        }
        const double step = std::abs(next - x);
        x                 = next;
        if (step < options.step_tolerance) {
            if (!(x > 0 && x <= 1)) {
                throw ConvergenceError("fixed point I*=" + std::to_string(x) +
                                       " lies outside (0,1]: no realistic endemic equilibrium");
            }
            return finish(config, x, it, cert);
        }
    }
    throw ConvergenceError("fixed-point iteration did not converge in " + std::to_string(options.max_iterations) +
                           " iterations; delta is too large for the contraction");
}

Matrix explicit_A0_inverse(const ModelConfig& config, double prevalence)
{
    const ModelConfig unperturbed = config.with_delta(0.0);
    const Vector d                = d_coefficients(unperturbed, prevalence);
    const Vector& omega           = unperturbed.rates().omega_i;
    const int n                   = config.n();

    Matrix inv = Matrix::Zero(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
        inv(k, k) = 1 / d[k];
        if (k > 0) {
            inv(0, k) = -omega[k] / (d[0] * d[k]);
        }
    }
    return inv;
}

NormDiagnostics norm_bounds(const ModelConfig& config, double prevalence)
{
    if (prevalence < 0 || prevalence > 1) {
        throw ConfigError("prevalence must lie in [0,1]");
    }
    const int n        = config.n();
    const double delta = config.delta();
    const double dim   = n + 1.0;
    const double base  = config.beta_0() * prevalence + config.mu();

    const Matrix diff = assemble_A(config, prevalence).a - assemble_A(config.with_delta(0.0), prevalence).a;
    const Matrix inv  = explicit_A0_inverse(config, prevalence);

    NormDiagnostics diag;
    diag.diff_norm  = spectral_norm(diff);
    diag.diff_schur = schur_norm(diff);
    diag.diff_bound = 2 * delta;
    diag.inv_norm   = spectral_norm(inv);
    diag.inv_schur  = schur_norm(inv);
    diag.inv_bound  = std::sqrt(dim) / base;
    diag.f_diff     = std::abs(F_delta(config, prevalence) - F_0(config, prevalence));
    diag.f_bound    = 4 * std::pow(dim, 1.5) * config.beta_n() * (config.r() + config.mu()) * delta / (base * base);

    diag.contraction_ok = diag.diff_norm * diag.inv_norm < 0.5;
    // relative slack absorbs rounding in the norm evaluations
    const auto below = [](double value, double bound) {
        return value <= bound * (1 + 1e-12) + 1e-300;
    };
    diag.within_bounds = below(diag.diff_norm, diag.diff_bound) && below(diag.diff_schur, diag.diff_bound) &&
                         below(diag.inv_norm, diag.inv_bound) && below(diag.inv_schur, diag.inv_bound) &&
                         (!diag.contraction_ok ||
                          diag.f_diff <= diag.f_bound + 1e-13 * (config.r() + config.mu()));
    return diag;
}

} // namespace waning
