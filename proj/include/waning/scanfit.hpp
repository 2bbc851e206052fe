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
#ifndef WANING_SCANFIT_HPP
#define WANING_SCANFIT_HPP

#include "waning/dynamics.hpp"
#include "waning/io.hpp"
#include "waning/model.hpp"
#include "waning/nelder_mead.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace waning
{

enum class SweepParameter
{
    beta0,
    omega,
    delta,
    omega_n, ///< realized as omega = value / p_n
    p_n,
    p_k, ///< one interior coverage entry, selected by SweepSpec::p_index
    beta_scale, ///< multiplies the base beta vector
};

enum class Observable
{
    terminal_prevalence,
    r0,
    endemic_I,
    max_real_part,
};

const char* to_string(SweepParameter parameter);
const char* to_string(Observable observable);
SweepParameter parse_sweep_parameter(const std::string& name);
Observable parse_observable(const std::string& name);

struct SweepSpec {
    explicit SweepSpec(ModelConfig base_config)
        : base(std::move(base_config))
    {
    }

    ModelConfig base;
    SweepParameter parameter = SweepParameter::delta;
    int p_index              = -1;
    std::vector<double> grid; ///< strictly increasing
    Observable observable = Observable::r0;
    double t_end          = 2000; ///< horizon for terminal_prevalence
    double i0             = 1e-6;
    int jobs              = 1;
};

struct SweepPoint {
    double value = 0;
    std::optional<double> observable;
    std::string classification; ///< disease_free, endemic, critical, or a terminal status
    std::optional<double> r0;
    std::string error; ///< per-point failure, empty on success
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

/// Copy of config with one parameter replaced. Throws ConfigError when the result is invalid.
ModelConfig apply_parameter(const ModelConfig& config, SweepParameter parameter, int p_index, double value);

/// Evaluates every grid point independently; results are ordered by grid index for any job count.
SweepResult sweep(const SweepSpec& spec);

/// Parses {"config": {...} | "config_path": "...", "parameter", "grid": [...] | {"from","to","count"},
/// "observable", "t_end", "i0", "p_index"}. Relative config paths resolve against base_dir.
SweepSpec sweep_spec_from_json(const Json& j, const std::string& base_dir = ".");

void write_sweep_csv(std::ostream& out, const SweepResult& result);
Json sweep_to_json(const SweepSpec& spec, const SweepResult& result);

/// beta_0 omega_n + beta_n mu - (omega_n + mu)(mu + r): positive iff an endemic state exists at delta = 0.
double existence_condition(const ModelConfig& config);

/// True when an endemic equilibrium with I* > 1e-10 is found by localization and refinement.
bool endemic_exists(const ModelConfig& config);

struct BifurcationResult {
    double value = 0; ///< R0 = 1 crossing
    double lo    = 0;
    double hi    = 0;
    std::size_t grid_index = 0; ///< left end of the bracketing grid interval
    std::optional<double> condition_crossing; ///< sign change of existence_condition, if any
    std::optional<double> existence_crossing; ///< flip of endemic_exists, if any
};

/// Brackets R0 - 1 on the grid and bisects to width < 1e-8. Throws ConvergenceError without a sign change.
BifurcationResult find_bifurcation(const SweepSpec& spec);

struct TimeSeries {
    std::vector<int> years;
    std::vector<double> prevalence;
};

/// CSV with header year,cases,population or year,prevalence; '#' lines and blank lines are skipped.
TimeSeries ingest_timeseries(std::istream& in);
TimeSeries ingest_timeseries_file(const std::string& path);

enum class FitParameter
{
    beta_scale,
    delta,
    mu,
    r,
    omega,
    p,
    i0,
};

struct FreeParameter {
    FitParameter kind = FitParameter::beta_scale;
    int index         = -1; ///< coverage entry for FitParameter::p
    double lower      = 0;
    double upper      = 1;
    std::optional<double> initial; ///< defaults to the template value (1 for beta_scale), clipped to the bounds
};

/// "name:lower:upper[:initial]" with name in beta_scale, delta, mu, r, omega, i0, p<k>.
FreeParameter parse_free_parameter(const std::string& text);
std::string to_string(const FreeParameter& parameter);

struct FitOptions {
    std::optional<int> start_year; ///< defaults to the first observed year
    bool log_sse     = false;
    double log_floor = 1e-12;
    double i0        = 1e-6;
    NelderMeadOptions optimizer;
    IntegrationOptions integration;
};

struct FitResult {
    explicit FitResult(ModelConfig config)
        : fitted_config(std::move(config))
    {
    }

    ModelConfig fitted_config;
    std::vector<double> parameters; ///< fitted values in free-parameter order
    double i0 = 0;
    double sse = 0;
    Vector residuals; ///< simulated - observed (log scale when log_sse)
    bool converged  = false;
    int evaluations = 0;
};

/// Year-end prevalence I(year - start_year + 1) from S_n = 1 - i0, I = i0.
Vector simulate_annual(const ModelConfig& config, double i0, const std::vector<int>& years, int start_year,
                       const IntegrationOptions& integration = {});

FitResult fit(const ModelConfig& config_template, const std::vector<FreeParameter>& free_parameters,
              const TimeSeries& series, const FitOptions& options = {});

Json fit_to_json(const std::vector<FreeParameter>& free_parameters, const FitResult& result);

} // namespace waning

#endif // WANING_SCANFIT_HPP
