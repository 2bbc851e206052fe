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
#include "waning/stability.hpp"
#include "waning/dfe.hpp"
#include "waning/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace waning
{

namespace
{

std::vector<Complex> eigenvalues_of(const Matrix& m)
{
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw Error("eigenvalue computation did not converge");
    }
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

} // namespace

JacobianMatrix jacobian(const ModelConfig& config, const StateVector& state)
{
    const int n = config.n();
    if (state.n() != n) {
        throw ConfigError("state dimension does not match config");
    }
    const Vector& beta = config.beta();
    const Matrix a     = assemble_A(config, state.i).a;

    JacobianMatrix jm;
    jm.b = beta.dot(state.s);
    jm.j = Matrix::Zero(n + 2, n + 2);
    jm.j.topLeftCorner(n + 1, n + 1) = a;
    for (int k = 0; k <= n; ++k) {
        jm.j(k, n + 1) = -beta[k] * state.s[k];
        jm.j(n + 1, k) = beta[k] * state.i;
    }
    jm.j(0, n + 1) += config.r();
    jm.j(n + 1, n + 1) = jm.b - config.r() - config.mu();
    return jm;
}

const char* to_string(StabilityClass c)
{
    switch (c) {
    case StabilityClass::asymptotically_stable:
        return "asymptotically_stable";
    case StabilityClass::unstable:
        return "unstable";
    case StabilityClass::marginal:
        return "marginal";
    }
    return "unknown";
}

StabilityVerdict classify(std::vector<Complex> eigenvalues)
{
    StabilityVerdict v;
    v.max_real_part = -std::numeric_limits<double>::infinity();
    for (const Complex& z : eigenvalues) {
        v.max_real_part = std::max(v.max_real_part, z.real());
    }
    if (std::abs(v.max_real_part) < marginal_band) {
        v.classification = StabilityClass::marginal;
    }
    else {
        v.classification = v.max_real_part < 0 ? StabilityClass::asymptotically_stable : StabilityClass::unstable;
    }
    std::sort(eigenvalues.begin(), eigenvalues.end(), [](const Complex& x, const Complex& y) {
        return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });
    v.eigenvalues = std::move(eigenvalues);
    return v;
}

double pairing_distance(std::vector<Complex> a, std::vector<Complex> b)
{
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0;
    while (!a.empty()) {
        // pair off the globally closest couple first
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = 0; j < b.size(); ++j) {
                const double dist = std::abs(a[i] - b[j]);
                if (dist < best) {
                    best = dist;
                    bi   = i;
                    bj   = j;
                }
            }
        }
        worst = std::max(worst, best);
        a.erase(a.begin() + static_cast<std::ptrdiff_t>(bi));
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return worst;
}

Matrix dfe_block(const ModelConfig& config)
{
    return assemble_A(config, 0.0).a;
}

GershgorinCertificate gershgorin_certificate(const ModelConfig& config)
{
    const DerivedRates& dr = config.rates();
    const double mu        = config.mu();

    GershgorinCertificate cert;
    cert.certified = true;
    for (int k = 0; k <= config.n(); ++k) {
        const double spread = dr.omega_i[k] + dr.delta_i[k];
        cert.discs.push_back({-(spread + mu), spread});
        cert.certified = cert.certified && cert.discs.back().rightmost() <= -mu + 1e-12 * mu;
    }

    const Matrix m = dfe_block(config);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    cert.eigenvalues_contained = true;
    for (const Complex& z : eigenvalues_of(m)) {
        const bool inside = std::any_of(cert.discs.begin(), cert.discs.end(), [&](const GershgorinDisc& d) {
            return std::abs(z - Complex(d.center, 0)) <= d.radius + 1e-9 * scale;
        });
        cert.eigenvalues_contained = cert.eigenvalues_contained && inside;
    }
    return cert;
}

StabilityVerdict dfe_spectrum(const ModelConfig& config)
{
    const DfeSolution dfe = solve_dfe_closed_form(config);
    const StateVector at_dfe{dfe.s, 0.0};
    const JacobianMatrix jm = jacobian(config, at_dfe);

    std::vector<Complex> full = eigenvalues_of(jm.j);
    std::vector<Complex> factored = eigenvalues_of(dfe_block(config));
    const double distinguished = jm.b - config.r() - config.mu();
    factored.emplace_back(distinguished, 0.0);

    double nearest = std::numeric_limits<double>::infinity();
    for (const Complex& z : full) {
        nearest = std::min(nearest, std::abs(z - Complex(distinguished, 0)));
    }

    StabilityVerdict v         = classify(full);
    v.distinguished            = distinguished;
    v.distinguished_error      = nearest;
    v.pairing_error            = pairing_distance(full, factored);
    v.gershgorin_certified     = gershgorin_certificate(config).certified;
    return v;
}

StabilityVerdict endemic_spectrum(const ModelConfig& config, const EndemicSolution& solution)
{
    if (!(solution.residual < 1e-9)) {
        throw ConfigError("endemic solution is stale (residual " + std::to_string(solution.residual) + ")");
    }
    const int n = config.n();
    const StateVector state{solution.s_star, solution.i_star};
    const JacobianMatrix jm = jacobian(config, state);

    StabilityVerdict v = classify(eigenvalues_of(jm.j));

    if (config.delta() == 0) {
        const double b0 = config.beta_0();
        const double bn = config.beta_n();
        const double mu = config.mu();
        const double wn = config.omega_n();
        const double I  = solution.i_star;
        const double sn = solution.s_star[n];

        const double a = wn + mu + b0 * I + bn * I;
        const double b = b0 * I * wn + (mu + bn * I) * (b0 * I + bn * sn) - (mu + b0 * I) * bn * sn;
        v.reduced_a    = a;
        v.reduced_b    = b;

        // spectrum = interior diagonals, -mu, and the roots of z^2 + a z + b
        std::vector<Complex> predicted;
        const Vector d = d_coefficients(config, I);
        for (int k = 1; k < n; ++k) {
            predicted.emplace_back(d[k], 0.0);
        }
        predicted.emplace_back(-mu, 0.0);
        const Complex disc = std::sqrt(Complex(a * a - 4 * b, 0.0));
        predicted.push_back((-a + disc) / 2.0);
        predicted.push_back((-a - disc) / 2.0);
        v.reduced_pairing_error = pairing_distance(v.eigenvalues, predicted);
    }
    return v;
}

std::vector<double> characteristic_polynomial(const Matrix& m)
{
    const auto size = m.rows();
    std::vector<double> coeffs(static_cast<std::size_t>(size) + 1);
    coeffs[0] = 1;
    Matrix aux = Matrix::Zero(size, size);
    for (Eigen::Index k = 1; k <= size; ++k) {
        aux = m * aux + coeffs[static_cast<std::size_t>(k - 1)] * Matrix::Identity(size, size);
        coeffs[static_cast<std::size_t>(k)] = -(m * aux).trace() / static_cast<double>(k);
    }
    return coeffs;
}

SignCheckReport characteristic_sign_check(const ModelConfig& config, const EndemicSolution& solution)
{
    if (config.n() > 6) {
        throw ConfigError("characteristic_sign_check supports n <= 6");
    }
    const StateVector state{solution.s_star, solution.i_star};
    SignCheckReport report;
    report.coefficients = characteristic_polynomial(jacobian(config, state).j);

    report.all_positive = true;
    double previous     = report.coefficients.front();
    for (std::size_t k = 1; k < report.coefficients.size(); ++k) {
        const double c = report.coefficients[k];
        if (!(c > 0)) {
            report.all_positive = false;
        }
        if (c != 0 && (c > 0) != (previous > 0)) {
            ++report.sign_changes;
        }
        if (c != 0) {
            previous = c;
        }
    }
    return report;
}

} // namespace waning
