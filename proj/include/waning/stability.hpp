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
#ifndef WANING_STABILITY_HPP
#define WANING_STABILITY_HPP

#include "waning/endemic.hpp"
#include "waning/model.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace waning
{

using Complex = std::complex<double>;

/// Dense (n+2)x(n+2) Jacobian of the vector field; rows/columns ordered S_0..S_n, I.
struct JacobianMatrix {
    Matrix j;
    double b = 0; ///< sum_k beta_k S_k at the evaluation point
};

JacobianMatrix jacobian(const ModelConfig& config, const StateVector& state);

enum class StabilityClass
{
    asymptotically_stable,
    unstable,
    marginal,
};

const char* to_string(StabilityClass c);

/// |max real part| below this is reported as marginal.
inline constexpr double marginal_band = 1e-10;

struct StabilityVerdict {
    std::vector<Complex> eigenvalues;
    double max_real_part = 0;
    StabilityClass classification = StabilityClass::marginal;

    // DFE only
    std::optional<bool> gershgorin_certified;
    std::optional<double> distinguished; ///< sum beta_k S_{k,D} - r - mu
    std::optional<double> distinguished_error; ///< distance from it to the nearest eigenvalue
    std::optional<double> pairing_error; ///< spectrum(J) vs spectrum(M) + {distinguished}

    // delta = 0 endemic only: z^2 + a z + b from the reduced 3x3 block
    std::optional<double> reduced_a;
    std::optional<double> reduced_b;
    std::optional<double> reduced_pairing_error;
};

struct GershgorinDisc {
    double center = 0;
    double radius = 0;
    double rightmost() const
    {
        return center + radius;
    }
};

struct GershgorinCertificate {
    bool certified = false; ///< every disc lies in Re z <= -mu
    std::vector<GershgorinDisc> discs;
    bool eigenvalues_contained = false; ///< computed eigenvalues of M fall inside the union
};

/// The susceptible block M of the DFE Jacobian (equal to A(0)).
Matrix dfe_block(const ModelConfig& config);

StabilityVerdict classify(std::vector<Complex> eigenvalues);

/// Spectrum of the Jacobian at the disease-free equilibrium, with the factorization cross-check.
StabilityVerdict dfe_spectrum(const ModelConfig& config);

/// Column discs of M: center -(omega_k + delta_k + mu), radius omega_k + delta_k.
GershgorinCertificate gershgorin_certificate(const ModelConfig& config);

/// Spectrum of the Jacobian at an endemic equilibrium. Throws ConfigError if the solution is stale.
StabilityVerdict endemic_spectrum(const ModelConfig& config, const EndemicSolution& solution);

struct SignCheckReport {
    std::vector<double> coefficients; ///< det(zI - J) = z^N + c_1 z^{N-1} + .. + c_N, leading 1 included
    int sign_changes  = 0;
    bool all_positive = false;
};

/// Characteristic polynomial coefficients at the endemic equilibrium (n <= 6).
SignCheckReport characteristic_sign_check(const ModelConfig& config, const EndemicSolution& solution);

/// Coefficients of det(zI - m), leading coefficient first (Faddeev-LeVerrier).
std::vector<double> characteristic_polynomial(const Matrix& m);

/// Largest distance in a greedy nearest-neighbour pairing of two equally sized spectra.
double pairing_distance(std::vector<Complex> a, std::vector<Complex> b);

} // namespace waning

#endif // WANING_STABILITY_HPP
