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
#include "waning/dynamics.hpp"
#include "waning/errors.hpp"
#include "waning/io.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

namespace waning
{

namespace
{

// Dormand-Prince 5(4) tableau (the field is autonomous, so the nodes c_i are not needed)
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double negativity_floor = -1e-12;

class Stepper
{
public:
    Stepper(const ModelConfig& config, const IntegrationOptions& options, int dim)
        : config_(config)
        , options_(options)
        , k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim), next(dim), err(dim)
    {
    }

    void prime(const Vector& y)
    {
        vector_field_flat(config_, y, k1);
    }

    /// One trial step from y with size h. Fills `next` and returns the scaled error norm.
    double trial(const Vector& y, double h)
    {
        tmp = y + h * a21 * k1;
        vector_field_flat(config_, tmp, k2);
        tmp = y + h * (a31 * k1 + a32 * k2);
        vector_field_flat(config_, tmp, k3);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        vector_field_flat(config_, tmp, k4);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        vector_field_flat(config_, tmp, k5);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        vector_field_flat(config_, tmp, k6);
        next = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        vector_field_flat(config_, next, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double sum = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double scale = options_.atol + options_.rtol * std::max(std::abs(y[i]), std::abs(next[i]));
            const double ratio = err[i] / scale;
            sum += ratio * ratio;
        }
        return std::sqrt(sum / static_cast<double>(y.size()));
    }

    /// Accept the last trial; `next` becomes the current state.
    void accept(Vector& y)
    {
        y.swap(next);
        k1.swap(k7);
    }

private:
    const ModelConfig& config_;
    const IntegrationOptions& options_;

public:
    Vector k1, k2, k3, k4, k5, k6, k7, tmp, next, err;
};

double initial_step(const Vector& y, const Vector& f, double h_max, const IntegrationOptions& options)
{
    const double scale = options.atol + options.rtol * y.cwiseAbs().maxCoeff();
    const double fnorm = f.cwiseAbs().maxCoeff();
    double h           = fnorm > 0 ? 0.01 * std::pow(scale / fnorm, 0.2) : h_max;
    return std::clamp(h, 1e-10, h_max);
}

} // namespace

const char* to_string(TerminalStatus status)
{
    switch (status) {
    case TerminalStatus::converged_dfe:
        return "converged_dfe";
    case TerminalStatus::converged_endemic:
        return "converged_endemic";
    case TerminalStatus::max_time:
        return "max_time";
    }
    return "unknown";
}

StateVector default_initial_state(int n, double i0)
{
    if (n < 1) {
        throw ConfigError("n must be >= 1");
    }
    if (!(i0 >= 0 && i0 <= 1)) {
        throw ConfigError("initial prevalence must lie in [0,1]");
    }
    Vector s = Vector::Zero(n + 1);
    s[n]     = 1 - i0;
    return StateVector{s, i0};
}

std::vector<double> uniform_samples(double t_end, int count)
{
    if (!(t_end > 0) || count < 1) {
        throw ConfigError("uniform_samples needs t_end > 0 and count >= 1");
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 1; k <= count; ++k) {
        out[static_cast<std::size_t>(k - 1)] = t_end * k / count;
    }
    out.back() = t_end;
    return out;
}

Trajectory integrate(const ModelConfig& config, const StateVector& initial, double t_end,
                     const IntegrationOptions& options)
{
    if (!(t_end > 0) || !std::isfinite(t_end)) {
        throw ConfigError("t_end must be positive and finite");
    }
    const StateVector start = StateVector::on_simplex(initial.s, initial.i);
    if (start.n() != config.n()) {
        throw ConfigError("initial state dimension does not match config");
    }
    const auto& samples = options.sample_times;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (!(samples[k] > 0 && samples[k] <= t_end) || (k > 0 && !(samples[k] > samples[k - 1]))) {
            throw ConfigError("sample times must be strictly increasing in (0, t_end]");
        }
    }

    const int dim      = config.n() + 2;
    const double h_max = options.h_max > 0 ? options.h_max : t_end / 100;

    Trajectory traj;
    Vector y = start.flat();
    traj.times.push_back(0.0);
    traj.states.push_back(start);

    Stepper stepper(config, options, dim);
    stepper.prime(y);

    double t = 0;
    double h = initial_step(y, stepper.k1, h_max, options);
    std::size_t next_sample = 0;
    int quiet_run           = 0;

    while (t < t_end) {
        if (traj.accepted_steps + traj.rejected_steps >= options.max_steps) {
            throw IntegrationError("step budget exhausted", t);
        }
        const double target = samples.empty() ? t_end : samples[next_sample];
        bool lands          = false;
        double step         = std::min(h, h_max);
        if (t + step >= target || target - (t + step) < 1e-12 * std::max(1.0, target)) {
            step  = target - t;
            lands = true;
        }
        if (step < 1e-14 * std::max(1.0, std::abs(t))) {
            throw IntegrationError("step-size underflow", t);
        }

        const double error = stepper.trial(y, step);
        bool ok            = std::isfinite(error) && error <= 1.0;
        if (ok) {
            for (Eigen::Index i = 0; i < dim; ++i) {
                if (stepper.next[i] < negativity_floor) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok) {
            ++traj.rejected_steps;
            const double shrink = std::isfinite(error) && error > 1.0 ? std::max(0.2, 0.9 * std::pow(error, -0.2)) : 0.5;
            h = step * shrink;
            continue;
        }

        ++traj.accepted_steps;
        const bool clamp = stepper.next[dim - 1] < 0;
        if (clamp) {
            stepper.next[dim - 1] = 0;
        }
        stepper.accept(y);
        if (clamp) {
            stepper.prime(y);
        }
        t = lands ? target : t + step;

        // a step shortened to hit a sample time says nothing about the next one
        if (!(lands && step < h)) {
            const double grow = error > 0 ? std::min(5.0, 0.9 * std::pow(error, -0.2)) : 5.0;
            h                 = std::min(h_max, step * grow);
        }

        if (stepper.k1.norm() < equilibrium_field_tolerance) {
            ++quiet_run;
        }
        else {
            quiet_run = 0;
        }
        if (quiet_run >= equilibrium_run_length) {
            traj.terminal_status =
                y[dim - 1] < extinction_threshold ? TerminalStatus::converged_dfe : TerminalStatus::converged_endemic;
        }
        else {
            traj.terminal_status = TerminalStatus::max_time;
        }

        if (samples.empty() || lands) {
            traj.times.push_back(t);
            traj.states.push_back(StateVector::from_flat(y));
            if (!samples.empty()) {
                ++next_sample;
                if (next_sample == samples.size()) {
                    break;
                }
            }
        }
    }
    return traj;
}

InfectionFreeSolution::InfectionFreeSolution(const ModelConfig& config)
    : n_(config.n())
    , delta_(config.delta())
    , mu_(config.mu())
    , projector_(Matrix::Zero(config.n() + 1, config.n() + 1))
{
    if ((config.p().array() != 0).any()) {
        throw SchemeMismatch("the infection-free closed form requires zero vaccination coverage");
    }
    projector_.row(n_).setOnes();
}

Matrix InfectionFreeSolution::exp_j(double t) const
{
    if (!(t >= 0)) {
        throw ConfigError("time must be >= 0");
    }
    const double x     = delta_ * t;
    const double decay = std::exp(-mu_ * t);
    Matrix e           = Matrix::Zero(n_ + 1, n_ + 1);
    for (int j = 0; j < n_; ++j) {
        for (int i = j; i < n_; ++i) {
            const int m = i - j;
            // e^{-(delta+mu)t} x^m / m!, in log space for large x
            e(i, j) = m == 0 ? std::exp(-(delta_ + mu_) * t)
                             : (x > 0 ? std::exp(-(delta_ + mu_) * t + m * std::log(x) - std::lgamma(m + 1.0)) : 0.0);
        }
        e(n_, j) = x > 0 ? decay * boost::math::gamma_p(static_cast<double>(n_ - j), x) : 0.0;
    }
    e(n_, n_) = decay;
    return e;
}

Vector InfectionFreeSolution::evaluate(const Vector& s0, double t) const
{
    if (s0.size() != n_ + 1) {
        throw ConfigError("initial susceptible vector has the wrong dimension");
    }
    Vector s = exp_j(t) * s0;
    s[n_] += -std::expm1(-mu_ * t);
    return s;
}

InfectionFreeSolution infection_free_solution(const ModelConfig& config)
{
    return InfectionFreeSolution(config);
}

RateFit convergence_rate(const Trajectory& trajectory, const Vector& target)
{
    std::vector<double> ts, logs;
    for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
        const double dist = (trajectory.states[k].flat() - target).norm();
        if (dist > 1e-11) {
            ts.push_back(trajectory.times[k]);
            logs.push_back(std::log(dist));
        }
    }
    if (ts.size() < 5) {
        throw ConvergenceError("trajectory tail too short for a rate fit");
    }
    const double t_mid = 0.5 * (ts.front() + ts.back());
    std::vector<double> tail_t, tail_l;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (ts[k] >= t_mid) {
            tail_t.push_back(ts[k]);
            tail_l.push_back(logs[k]);
        }
    }
    if (tail_t.size() < 5) {
        throw ConvergenceError("trajectory tail too short for a rate fit");
    }

    RateFit fit;
    for (std::size_t k = 1; k < tail_l.size(); ++k) {
        if (tail_l[k] > tail_l[k - 1]) {
            fit.envelope = true;
            break;
        }
    }
    if (fit.envelope) {
        std::vector<double> env_t, env_l;
        for (std::size_t k = 1; k + 1 < tail_l.size(); ++k) {
            if (tail_l[k] >= tail_l[k - 1] && tail_l[k] >= tail_l[k + 1]) {
                env_t.push_back(tail_t[k]);
                env_l.push_back(tail_l[k]);
            }
        }
        if (env_t.size() < 3) {
            throw ConvergenceError("oscillatory tail has too few peaks for an envelope fit");
        }
        tail_t.swap(env_t);
        tail_l.swap(env_l);
    }

    const auto count = static_cast<double>(tail_t.size());
    double mt = 0, ml = 0;
    for (std::size_t k = 0; k < tail_t.size(); ++k) {
        mt += tail_t[k];
        ml += tail_l[k];
    }
    mt /= count;
    ml /= count;
    double stt = 0, stl = 0;
    for (std::size_t k = 0; k < tail_t.size(); ++k) {
        stt += (tail_t[k] - mt) * (tail_t[k] - mt);
        stl += (tail_t[k] - mt) * (tail_l[k] - ml);
    }
    fit.kappa  = -stl / stt;
    fit.points = static_cast<int>(tail_t.size());
    return fit;
}

EquilibriumDetection detect_equilibrium(const Trajectory& trajectory, const ModelConfig& config)
{
    EquilibriumDetection out;
    int run           = 0;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
        const StateDerivative f = vector_field(config, trajectory.states[k]);
        const double norm       = std::sqrt(f.ds.squaredNorm() + f.di * f.di);
        if (norm < equilibrium_field_tolerance) {
            if (run == 0) {
                begin = k;
            }
            ++run;
        }
        else {
            run = 0;
        }
    }
    if (run >= equilibrium_run_length) {
        const StateVector& last = trajectory.states.back();
        out.status = last.i < extinction_threshold ? TerminalStatus::converged_dfe : TerminalStatus::converged_endemic;
        out.point  = last;
        out.time   = trajectory.times[begin];
    }
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory)
{
    const int n = trajectory.states.empty() ? 0 : trajectory.states.front().n();
    out << 't';
    for (int k = 0; k <= n; ++k) {
        out << ",S_" << k;
    }
    out << ",I\n";
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        out << format_double(trajectory.times[k]);
        const StateVector& st = trajectory.states[k];
        for (int j = 0; j <= n; ++j) {
            out << ',' << format_double(st.s[j]);
        }
        out << ',' << format_double(st.i) << '\n';
    }
}

} // namespace waning
