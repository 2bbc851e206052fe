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
#ifndef WANING_TEST_SUPPORT_HPP
#define WANING_TEST_SUPPORT_HPP

// Independent oracles and random generators shared by the unit and acceptance tests.
// Nothing here calls the library's solvers.

#include "waning/model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace oracle
{

using waning::Matrix;
using waning::Vector;

/// Gaussian elimination with partial pivoting; returns the determinant and overwrites b with the solution.
inline double gauss_solve(Matrix a, Vector& b)
{
    const auto n = a.rows();
    double det   = 1;
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index piv = col;
        for (Eigen::Index row = col + 1; row < n; ++row) {
            if (std::abs(a(row, col)) > std::abs(a(piv, col))) {
                piv = row;
            }
        }
        if (a(piv, col) == 0) {
            throw std::runtime_error("oracle: singular matrix");
        }
        if (piv != col) {
            a.row(piv).swap(a.row(col));
            std::swap(b[piv], b[col]);
            det = -det;
        }
        det *= a(col, col);
        for (Eigen::Index row = col + 1; row < n; ++row) {
            const double factor = a(row, col) / a(col, col);
            for (Eigen::Index k = col; k < n; ++k) {
                a(row, k) -= factor * a(col, k);
            }
            b[row] -= factor * b[col];
        }
    }
    for (Eigen::Index row = n - 1; row >= 0; --row) {
        double acc = b[row];
        for (Eigen::Index k = row + 1; k < n; ++k) {
            acc -= a(row, k) * b[k];
        }
        b[row] = acc / a(row, row);
    }
    return det;
}

inline Vector solve(const Matrix& a, Vector b)
{
    gauss_solve(a, b);
    return b;
}

inline double det(const Matrix& a)
{
    Vector b = Vector::Zero(a.rows());
    return gauss_solve(a, b);
}

inline Matrix inverse(const Matrix& a)
{
    Matrix inv(a.rows(), a.cols());
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
        inv.col(k) = solve(a, Vector::Unit(a.rows(), k));
    }
    return inv;
}

/// Plain bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-15)
{
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm  = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo  = mid;
            flo = fm;
        }
        else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Model right-hand side written out term by term from the compartment equations.
inline Vector rhs(const waning::ModelConfig& c, const Vector& y)
{
    const int n        = c.n();
    const Vector& beta = c.beta();
    const double I     = y[n + 1];
    const double mu = c.mu(), r = c.r(), delta = c.delta(), omega = c.omega();
    Vector dy = Vector::Zero(n + 2);
    double boosted = 0, force = 0;
    for (int k = 1; k <= n; ++k) {
        boosted += c.p()[k] * omega * y[k];
    }
    for (int k = 0; k <= n; ++k) {
        force += beta[k] * y[k];
    }
    const auto waning_out = [&](int k) { return k < n ? (1 - c.p()[k]) * delta * y[k] : 0.0; };
    dy[0] = boosted - waning_out(0) + r * I - beta[0] * I * y[0] - mu * y[0];
    for (int k = 1; k <= n; ++k) {
        dy[k] = -c.p()[k] * omega * y[k] + waning_out(k - 1) - waning_out(k) - beta[k] * I * y[k] - mu * y[k];
    }
    dy[n] += mu;
    dy[n + 1] = I * (force - r - mu);
    return dy;
}

/// Susceptibles at prevalence I from a dense solve of the endemic balance equations.
inline Vector endemic_susceptibles(const waning::ModelConfig& c, double I)
{
    const int n = c.n();
    Matrix a    = Matrix::Zero(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
        const double delta_k = k < n ? (1 - c.p()[k]) * c.delta() : 0.0;
        a(k, k)              = -(delta_k + c.p()[k] * c.omega() + c.mu() + c.beta()[k] * I);
        if (k > 0) {
            a(k, k - 1) = k - 1 < n ? (1 - c.p()[k - 1]) * c.delta() : 0.0;
            a(0, k) += c.p()[k] * c.omega();
        }
    }
    Vector rhs = Vector::Zero(n + 1);
    rhs[0]     = -c.r() * I;
    rhs[n] -= c.mu();
    return solve(a, rhs);
}

/// Force of infection sum_k beta_k S_k at the endemic balance for prevalence I.
inline double force(const waning::ModelConfig& c, double I)
{
    return c.beta().dot(endemic_susceptibles(c, I));
}

/// Central finite-difference Jacobian of rhs.
inline Matrix fd_jacobian(const waning::ModelConfig& c, const Vector& y, double h = 1e-7)
{
    const auto dim = y.size();
    Matrix j(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        Vector yp = y, ym = y;
        yp[k] += h;
        ym[k] -= h;
        j.col(k) = (rhs(c, yp) - rhs(c, ym)) / (2 * h);
    }
    return j;
}

/// Scaling-and-squaring Pade exponential (Eigen unsupported module).
inline Matrix expm(const Matrix& a)
{
    return a.exp();
}

/// Fixed-step classical RK4 on rhs.
inline Vector rk4(const waning::ModelConfig& c, Vector y, double t_end, int steps)
{
    const double h = t_end / steps;
    for (int s = 0; s < steps; ++s) {
        const Vector k1 = rhs(c, y);
        const Vector k2 = rhs(c, y + 0.5 * h * k1);
        const Vector k3 = rhs(c, y + 0.5 * h * k2);
        const Vector k4 = rhs(c, y + h * k3);
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return y;
}

} // namespace oracle

namespace gen
{

using waning::ModelConfig;
using waning::Vector;

inline double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector sorted_betas(std::mt19937_64& rng, int n, double lo, double hi)
{
    Vector beta(n + 1);
    for (int k = 0; k <= n; ++k) {
        beta[k] = log_uniform(rng, lo, hi);
    }
    std::sort(beta.data(), beta.data() + beta.size());
    return beta;
}

inline Vector random_coverage(std::mt19937_64& rng, int n)
{
    Vector p(n + 1);
    p[0] = 0;
    for (int k = 1; k <= n; ++k) {
        p[k] = uniform(rng, 0, 1);
    }
    return p;
}

/// All rates log-uniform in [lo, hi], general coverage.
inline ModelConfig general(std::mt19937_64& rng, int n, double lo = 1e-3, double hi = 50)
{
    return waning::build_general(n, sorted_betas(rng, n, lo, hi), log_uniform(rng, lo, hi), log_uniform(rng, lo, hi),
                                 log_uniform(rng, lo, hi), log_uniform(rng, lo, hi), random_coverage(rng, n));
}

/// A random point of the simplex.
inline waning::StateVector simplex_point(std::mt19937_64& rng, int n)
{
    Vector y(n + 2);
    for (int k = 0; k < n + 2; ++k) {
        y[k] = -std::log(uniform(rng, 1e-12, 1));
    }
    y /= y.sum();
    return waning::StateVector::from_flat(y);
}

} // namespace gen

#endif // WANING_TEST_SUPPORT_HPP
