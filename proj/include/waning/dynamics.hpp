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
#ifndef WANING_DYNAMICS_HPP
#define WANING_DYNAMICS_HPP

#include "waning/model.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace waning
{

enum class TerminalStatus
{
    converged_dfe,
    converged_endemic,
    max_time,
};

const char* to_string(TerminalStatus status);

struct IntegrationOptions {
    double atol = 1e-12;
    double rtol = 1e-10;
    double h_max = 0; ///< 0 selects t_end / 100
    long max_steps = 2'000'000;
    /// Output times in (0, t_end]; the integrator lands on each exactly. Empty: every accepted step.
    std::vector<double> sample_times;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    TerminalStatus terminal_status = TerminalStatus::max_time;
    long accepted_steps = 0;
    long rejected_steps = 0;

    const StateVector& terminal() const
    {
        return states.back();
    }
};

/// S_n = 1 - i0, I = i0, everything else 0.
StateVector default_initial_state(int n, double i0 = 1e-6);

/**
 * Adaptive Dormand-Prince 5(4) integration of the model from t = 0 to t_end.
 *
 * Steps that push a component below -1e-12 are rejected and retried with a smaller step; tiny
 * negative prevalence is clamped to 0. The initial state is stored at t = 0.
 *
 * Throws IntegrationError on step-size underflow or when the step budget runs out.
 */
Trajectory integrate(const ModelConfig& config, const StateVector& initial, double t_end,
                     const IntegrationOptions& options = {});

/// Evenly spaced sample times count points in (0, t_end], ending at t_end.
std::vector<double> uniform_samples(double t_end, int count);

/// Closed-form solution of the model with no vaccination and no infection.
class InfectionFreeSolution
{
public:
    explicit InfectionFreeSolution(const ModelConfig& config);

    /// e_n 1^T: the spectral projector of the simple eigenvalue -mu.
    const Matrix& projector() const
    {
        return projector_;
    }
    /// Guaranteed exponential rate of approach to e_n.
    double decay_rate() const
    {
        return mu_;
    }
    /// Rate of the transient modes, delta + mu.
    double transient_rate() const
    {
        return delta_ + mu_;
    }
    /// exp(J t) for the lower-bidiagonal infection-free Jacobian.
    Matrix exp_j(double t) const;
    /// S(t) from S(0) = s0.
    Vector evaluate(const Vector& s0, double t) const;

private:
    int n_;
    double delta_;
    double mu_;
    Matrix projector_;
};

/// Throws SchemeMismatch when any coverage p_k is nonzero.
InfectionFreeSolution infection_free_solution(const ModelConfig& config);

struct RateFit {
    double kappa = 0;
    int points = 0;
    bool envelope = false; ///< the tail was not monotone; fitted through local maxima
};

/**
 * Least-squares decay rate of log ||state(t) - target|| over the trajectory tail.
 *
 * The tail is the later half (in time) of the samples whose distance exceeds 1e-11. Throws
 * ConvergenceError if fewer than five usable points remain.
 */
RateFit convergence_rate(const Trajectory& trajectory, const Vector& target);

struct EquilibriumDetection {
    TerminalStatus status = TerminalStatus::max_time;
    std::optional<StateVector> point;
    std::optional<double> time; ///< start of the quiescent run
};

/// Converged when ||f|| < 1e-10 holds on 50 consecutive stored states; DFE if I < 1e-10 there.
EquilibriumDetection detect_equilibrium(const Trajectory& trajectory, const ModelConfig& config);

inline constexpr double equilibrium_field_tolerance = 1e-10;
inline constexpr int equilibrium_run_length         = 50;
inline constexpr double extinction_threshold        = 1e-10;

/// CSV with header t,S_0,..,S_n,I and 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

} // namespace waning

#endif // WANING_DYNAMICS_HPP
