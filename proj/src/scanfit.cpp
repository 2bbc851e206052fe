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
#include "waning/scanfit.hpp"
#include "waning/dfe.hpp"
#include "waning/endemic.hpp"
#include "waning/errors.hpp"
#include "waning/stability.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

namespace waning
{

namespace
{

const char* regime_class(Regime regime)
{
    switch (regime) {
    case Regime::stable:
        return "disease_free";
    case Regime::unstable:
        return "endemic";
    case Regime::critical:
        return "critical";
    }
    return "unknown";
}

std::optional<EndemicSolution> try_endemic(const ModelConfig& config)
{
    try {
        EndemicSolution sol = refine(config, localize(config));
        if (sol.i_star > extinction_threshold) {
            return sol;
        }
    }
    catch (const ConvergenceError&) {
    }
    catch (const SingularSystemError&) {
    }
    return std::nullopt;
}

SweepPoint evaluate_point(const SweepSpec& spec, double value)
{
    SweepPoint point;
    point.value = value;
    try {
        const ModelConfig config = apply_parameter(spec.base, spec.parameter, spec.p_index, value);
        const R0Report report    = r0(config);
        point.r0                 = report.r0;
        point.classification     = regime_class(report.regime);

        switch (spec.observable) {
        case Observable::r0:
            point.observable = report.r0;
            break;
        case Observable::endemic_I: {
            const auto sol   = try_endemic(config);
            point.observable = sol ? sol->i_star : 0.0;
            point.classification = sol ? "endemic" : "disease_free";
            break;
        }
        case Observable::max_real_part: {
            const auto sol = try_endemic(config);
            const StabilityVerdict v =
                sol && sol->residual < 1e-9 ? endemic_spectrum(config, *sol) : dfe_spectrum(config);
            point.observable     = v.max_real_part;
            point.classification = std::string(sol ? "endemic_" : "dfe_") + to_string(v.classification);
            break;
        }
        case Observable::terminal_prevalence: {
            IntegrationOptions opts;
            opts.sample_times      = {spec.t_end};
            const Trajectory traj  = integrate(config, default_initial_state(config.n(), spec.i0), spec.t_end, opts);
            point.observable       = traj.terminal().i;
            point.classification   = to_string(traj.terminal_status);
            break;
        }
        }
    }
    catch (const Error& e) {
        point.observable.reset();
        point.error = e.what();
    }
    return point;
}

std::vector<double> grid_from_json(const Json& g)
{
    std::vector<double> grid;
    if (g.is_array()) {
        for (const auto& v : g) {
            grid.push_back(v.get<double>());
        }
        return grid;
    }
    if (g.is_object()) {
        const double from = g.at("from").get<double>();
        const double to   = g.at("to").get<double>();
        const int count   = g.at("count").get<int>();
        if (count < 2) {
            throw ConfigError("grid count must be >= 2");
        }
        for (int k = 0; k < count; ++k) {
            grid.push_back(k == count - 1 ? to : from + (to - from) * k / (count - 1));
        }
        return grid;
    }
    throw ConfigError("grid must be an array or {from, to, count}");
}

// Bisection on a sign/flag predicate between lo (value a) and hi (value !a).
template <typename Pred>
double bisect(Pred pred, double lo, double hi)
{
    const bool at_lo = pred(lo);
    while (hi - lo >= 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (pred(mid) == at_lo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) {
            return out;
        }
        start = pos + 1;
    }
}

template <typename T>
T parse_number(const std::string& text, int line, const char* what)
{
    T value{};
    const char* first = text.data();
    const char* last  = text.data() + text.size();
    const auto res    = std::from_chars(first, last, value);
    if (text.empty() || res.ec != std::errc() || res.ptr != last) {
        throw DataError(std::string("cannot parse ") + what + " '" + text + "'", line);
    }
    return value;
}

double parameter_value(const ModelConfig& config, const FreeParameter& fp, double i0)
{
    switch (fp.kind) {
    case FitParameter::beta_scale:
        return 1.0;
    case FitParameter::delta:
        return config.delta();
    case FitParameter::mu:
        return config.mu();
    case FitParameter::r:
        return config.r();
    case FitParameter::omega:
        return config.omega();
    case FitParameter::p:
        return config.p()[fp.index];
    case FitParameter::i0:
        return i0;
    }
    return 0;
}

} // namespace

const char* to_string(SweepParameter parameter)
{
    switch (parameter) {
    case SweepParameter::beta0:
        return "beta0";
    case SweepParameter::omega:
        return "omega";
    case SweepParameter::delta:
        return "delta";
    case SweepParameter::omega_n:
        return "omega_n";
    case SweepParameter::p_n:
        return "p_n";
    case SweepParameter::p_k:
        return "p_k";
    case SweepParameter::beta_scale:
        return "beta_scale";
    }
    return "unknown";
}

const char* to_string(Observable observable)
{
    switch (observable) {
    case Observable::terminal_prevalence:
        return "terminal_prevalence";
    case Observable::r0:
        return "r0";
    case Observable::endemic_I:
        return "endemic_I";
    case Observable::max_real_part:
        return "max_real_part";
    }
    return "unknown";
}

SweepParameter parse_sweep_parameter(const std::string& name)
{
    for (auto p : {SweepParameter::beta0, SweepParameter::omega, SweepParameter::delta, SweepParameter::omega_n,
                   SweepParameter::p_n, SweepParameter::p_k, SweepParameter::beta_scale}) {
        if (name == to_string(p)) {
            return p;
        }
    }
    throw ConfigError("unknown sweep parameter '" + name + "'");
}

Observable parse_observable(const std::string& name)
{
    for (auto o : {Observable::terminal_prevalence, Observable::r0, Observable::endemic_I, Observable::max_real_part}) {
        if (name == to_string(o)) {
            return o;
        }
    }
    throw ConfigError("unknown observable '" + name + "'");
}

ModelConfig apply_parameter(const ModelConfig& config, SweepParameter parameter, int p_index, double value)
{
    const int n = config.n();
    switch (parameter) {
    case SweepParameter::beta0: {
        Vector beta = config.beta();
        beta[0]     = value;
        return config.with_beta(beta);
    }
    case SweepParameter::omega:
        return config.with_omega(value);
    case SweepParameter::delta:
        return config.with_delta(value);
    case SweepParameter::omega_n:
        if (!(config.p()[n] > 0)) {
            throw ConfigError("omega_n sweep needs p_n > 0");
        }
        return config.with_omega(value / config.p()[n]);
    case SweepParameter::p_n: {
        Vector p = config.p();
        p[n]     = value;
        return config.with_p(p);
    }
    case SweepParameter::p_k: {
        if (p_index < 1 || p_index > n) {
            throw ConfigError("p_index must lie in 1..n");
        }
        Vector p  = config.p();
        p[p_index] = value;
        return config.with_p(p);
    }
    case SweepParameter::beta_scale:
        if (!(value >= 0)) {
            throw ConfigError("beta_scale must be >= 0");
        }
        return config.with_beta(config.beta() * value);
    }
    throw ConfigError("unknown sweep parameter");
}

SweepResult sweep(const SweepSpec& spec)
{
    for (std::size_t k = 1; k < spec.grid.size(); ++k) {
        if (!(spec.grid[k] > spec.grid[k - 1])) {
            throw ConfigError("sweep grid must be strictly increasing");
        }
    }
    SweepResult result;
    result.points.resize(spec.grid.size());

    const auto jobs = static_cast<std::size_t>(std::max(1, spec.jobs));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < spec.grid.size(); k = next++) {
            result.points[k] = evaluate_point(spec, spec.grid[k]);
        }
    };
    if (jobs == 1) {
        worker();
        return result;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(jobs, spec.grid.size()); ++w) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    return result;
}

SweepSpec sweep_spec_from_json(const Json& j, const std::string& base_dir)
{
    static const std::vector<std::string> known{"config", "config_path", "parameter", "grid",
                                                "observable", "t_end", "i0", "p_index"};
    for (const auto& item : j.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw ConfigError("unknown sweep key '" + item.key() + "'");
        }
    }
    try {
        ModelConfig base = [&] {
            if (j.contains("config")) {
                return config_from_json(j.at("config"));
            }
            if (j.contains("config_path")) {
                std::filesystem::path path(j.at("config_path").get<std::string>());
                if (path.is_relative()) {
                    path = std::filesystem::path(base_dir) / path;
                }
                return load_config(path.string());
            }
            throw ConfigError("sweep spec needs 'config' or 'config_path'");
        }();
        SweepSpec spec(base);
        spec.parameter  = parse_sweep_parameter(j.at("parameter").get<std::string>());
        spec.grid       = grid_from_json(j.at("grid"));
        spec.observable = parse_observable(j.value("observable", std::string("r0")));
        spec.t_end      = j.value("t_end", spec.t_end);
        spec.i0         = j.value("i0", spec.i0);
        spec.p_index    = j.value("p_index", spec.p_index);
        return spec;
    }
    catch (const Json::exception& e) {
        throw ConfigError(std::string("sweep spec: ") + e.what());
    }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result)
{
    out << "param_value,observable,classification\n";
    for (const auto& p : result.points) {
        out << format_double(p.value) << ',' << (p.observable ? format_double(*p.observable) : std::string("nan"))
            << ',' << (p.error.empty() ? p.classification : std::string("error")) << '\n';
    }
}

Json sweep_to_json(const SweepSpec& spec, const SweepResult& result)
{
    Json points = Json::array();
    for (const auto& p : result.points) {
        Json jp{{"value", p.value},
                {"observable", p.observable ? Json(*p.observable) : Json(nullptr)},
                {"classification", p.classification},
                {"r0", p.r0 ? Json(*p.r0) : Json(nullptr)}};
        if (!p.error.empty()) {
            jp["error"] = p.error;
        }
        points.push_back(jp);
    }
    Json out{{"config", config_to_json(spec.base)},
             {"parameter", to_string(spec.parameter)},
             {"observable", to_string(spec.observable)},
             {"points", points}};
    if (spec.parameter == SweepParameter::p_k) {
        out["p_index"] = spec.p_index;
    }
    return out;
}

double existence_condition(const ModelConfig& config)
{
    const double mu = config.mu();
    const double wn = config.omega_n();
    return config.beta_0() * wn + config.beta_n() * mu - (wn + mu) * (mu + config.r());
}

bool endemic_exists(const ModelConfig& config)
{
    return try_endemic(config).has_value();
}

BifurcationResult find_bifurcation(const SweepSpec& spec)
{
    const auto at = [&](double v) { return apply_parameter(spec.base, spec.parameter, spec.p_index, v); };
    const auto gap = [&](double v) { return r0(at(v)).r0 - 1.0; };

    std::optional<std::size_t> bracket;
    for (std::size_t k = 0; k + 1 < spec.grid.size() && !bracket; ++k) {
        try {
            const double ga = gap(spec.grid[k]);
            const double gb = gap(spec.grid[k + 1]);
            if ((ga < 0) != (gb < 0)) {
                bracket = k;
            }
        }
        catch (const ConfigError&) {
        }
    }
    if (!bracket) {
        throw ConvergenceError("R0 - 1 has no sign change on the sweep grid");
    }

    BifurcationResult out;
    out.grid_index = *bracket;
    out.lo         = spec.grid[*bracket];
    out.hi         = spec.grid[*bracket + 1];
    out.value      = bisect([&](double v) { return gap(v) < 0; }, out.lo, out.hi);

    // cross-checks, each on the grid interval nearest the R0 crossing where it changes state
    std::optional<double> best_cond, best_exist;
    for (std::size_t k = 0; k + 1 < spec.grid.size(); ++k) {
        const double a = spec.grid[k], b = spec.grid[k + 1];
        try {
            if ((existence_condition(at(a)) > 0) != (existence_condition(at(b)) > 0)) {
                const double c = bisect([&](double v) { return existence_condition(at(v)) > 0; }, a, b);
                if (!best_cond || std::abs(c - out.value) < std::abs(*best_cond - out.value)) {
                    best_cond = c;
                }
            }
            if (endemic_exists(at(a)) != endemic_exists(at(b))) {
                const double c = bisect([&](double v) { return endemic_exists(at(v)); }, a, b);
                if (!best_exist || std::abs(c - out.value) < std::abs(*best_exist - out.value)) {
                    best_exist = c;
                }
            }
        }
        catch (const ConfigError&) {
        }
    }
    out.condition_crossing = best_cond;
    out.existence_crossing = best_exist;
    return out;
}

TimeSeries ingest_timeseries(std::istream& in)
{
    TimeSeries ts;
    std::string raw;
    int line_no       = 0;
    int columns       = 0; // 2: year,prevalence; 3: year,cases,population
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto fields = split(line, ',');
        if (columns == 0) {
            if (fields == std::vector<std::string>{"year", "cases", "population"}) {
                columns = 3;
            }
            else if (fields == std::vector<std::string>{"year", "prevalence"}) {
                columns = 2;
            }
            else {
                throw DataError("expected header 'year,cases,population' or 'year,prevalence'", line_no);
            }
            continue;
        }
        if (static_cast<int>(fields.size()) != columns) {
            throw DataError("expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()),
                            line_no);
        }
        const int year = parse_number<int>(fields[0], line_no, "year");
        double prevalence;
        if (columns == 3) {
            const double cases      = parse_number<double>(fields[1], line_no, "cases");
            const double population = parse_number<double>(fields[2], line_no, "population");
            if (!(population > 0)) {
                throw DataError("population must be positive", line_no);
            }
            prevalence = cases / population;
        }
        else {
            prevalence = parse_number<double>(fields[1], line_no, "prevalence");
        }
        if (!(prevalence >= 0 && prevalence <= 1)) {
            throw DataError("prevalence outside [0,1]", line_no);
        }
        if (!ts.years.empty() && year <= ts.years.back()) {
            throw DataError("years must be strictly increasing", line_no);
        }
        ts.years.push_back(year);
        ts.prevalence.push_back(prevalence);
    }
    if (columns == 0) {
        throw DataError("missing header", line_no);
    }
    if (ts.years.empty()) {
        throw DataError("no data rows", line_no);
    }
    return ts;
}

TimeSeries ingest_timeseries_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    return ingest_timeseries(in);
}

FreeParameter parse_free_parameter(const std::string& text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3 && parts.size() != 4) {
        throw ConfigError("free parameter must be name:lower:upper[:initial], got '" + text + "'");
    }
    FreeParameter fp;
    const std::string& name = parts[0];
    if (name == "beta_scale") {
        fp.kind = FitParameter::beta_scale;
    }
    else if (name == "delta") {
        fp.kind = FitParameter::delta;
    }
    else if (name == "mu") {
        fp.kind = FitParameter::mu;
    }
    else if (name == "r") {
        fp.kind = FitParameter::r;
    }
    else if (name == "omega") {
        fp.kind = FitParameter::omega;
    }
    else if (name == "i0") {
        fp.kind = FitParameter::i0;
    }
    else if (name.size() > 1 && name[0] == 'p') {
        fp.kind  = FitParameter::p;
        fp.index = parse_number<int>(name.substr(1), 0, "coverage index");
    }
    else {
        throw ConfigError("unknown free parameter '" + name + "'");
    }
    fp.lower = parse_number<double>(parts[1], 0, "lower bound");
    fp.upper = parse_number<double>(parts[2], 0, "upper bound");
    if (parts.size() == 4) {
        fp.initial = parse_number<double>(parts[3], 0, "initial value");
    }
    if (!(fp.lower < fp.upper)) {
        throw ConfigError("free parameter bounds must satisfy lower < upper");
    }
    return fp;
}

std::string to_string(const FreeParameter& parameter)
{
    switch (parameter.kind) {
    case FitParameter::beta_scale:
        return "beta_scale";
    case FitParameter::delta:
        return "delta";
    case FitParameter::mu:
        return "mu";
    case FitParameter::r:
        return "r";
    case FitParameter::omega:
        return "omega";
    case FitParameter::p:
        return "p" + std::to_string(parameter.index);
    case FitParameter::i0:
        return "i0";
    }
    return "unknown";
}

Vector simulate_annual(const ModelConfig& config, double i0, const std::vector<int>& years, int start_year,
                       const IntegrationOptions& integration)
{
    IntegrationOptions opts = integration;
    opts.sample_times.clear();
    for (int y : years) {
        if (y < start_year) {
            throw ConfigError("observation year precedes the start year");
        }
        opts.sample_times.push_back(y - start_year + 1.0);
    }
    const Trajectory traj = integrate(config, default_initial_state(config.n(), i0), opts.sample_times.back(), opts);
    Vector out(static_cast<Eigen::Index>(years.size()));
    for (std::size_t k = 0; k < years.size(); ++k) {
        out[static_cast<Eigen::Index>(k)] = traj.states[k + 1].i;
    }
    return out;
}

FitResult fit(const ModelConfig& config_template, const std::vector<FreeParameter>& free_parameters,
              const TimeSeries& series, const FitOptions& options)
{
    if (free_parameters.empty()) {
        throw ConfigError("fit needs at least one free parameter");
    }
    if (series.years.empty()) {
        throw ConfigError("fit needs a non-empty time series");
    }
    for (const auto& fp : free_parameters) {
        if (fp.kind == FitParameter::p && (fp.index < 1 || fp.index > config_template.n())) {
            throw ConfigError("coverage index out of range in free parameter " + to_string(fp));
        }
    }
    const int start_year = options.start_year.value_or(series.years.front());
    const auto dim       = static_cast<Eigen::Index>(free_parameters.size());
    Vector observed(static_cast<Eigen::Index>(series.prevalence.size()));
    for (std::size_t k = 0; k < series.prevalence.size(); ++k) {
        observed[static_cast<Eigen::Index>(k)] = series.prevalence[k];
    }

    const auto to_value = [&](const Vector& u, Eigen::Index k) {
        const auto& fp = free_parameters[static_cast<std::size_t>(k)];
        return fp.lower + (fp.upper - fp.lower) * std::clamp(u[k], 0.0, 1.0);
    };
    struct Candidate {
        ModelConfig config;
        double i0;
    };
    const auto build = [&](const Vector& u) {
        ModelConfig config = config_template;
        double i0          = options.i0;
        for (Eigen::Index k = 0; k < dim; ++k) {
            const auto& fp = free_parameters[static_cast<std::size_t>(k)];
            const double v = to_value(u, k);
            switch (fp.kind) {
            case FitParameter::beta_scale:
                config = config.with_beta(config_template.beta() * v);
                break;
            case FitParameter::delta:
                config = config.with_delta(v);
                break;
            case FitParameter::mu:
                config = config.with_mu(v);
                break;
            case FitParameter::r:
                config = config.with_r(v);
                break;
            case FitParameter::omega:
                config = config.with_omega(v);
                break;
            case FitParameter::p: {
                Vector p       = config.p();
                p[fp.index]    = v;
                config         = config.with_p(p);
                break;
            }
            case FitParameter::i0:
                i0 = v;
                break;
            }
        }
        return Candidate{config, i0};
    };
    const auto residuals_of = [&](const Candidate& c) {
        const Vector sim = simulate_annual(c.config, c.i0, series.years, start_year, options.integration);
        if (options.log_sse) {
            return Vector((sim.array() + options.log_floor).log() - (observed.array() + options.log_floor).log());
        }
        return Vector(sim - observed);
    };

    const auto objective = [&](const Vector& u) {
        double penalty = 0;
        for (Eigen::Index k = 0; k < dim; ++k) {
            const double excess = u[k] < 0 ? -u[k] : (u[k] > 1 ? u[k] - 1 : 0.0);
            penalty += excess * excess;
        }
        try {
            const Vector res = residuals_of(build(u));
            return res.squaredNorm() + penalty;
        }
        catch (const Error&) {
            return 1e100 + penalty;
        }
    };

    Vector u0(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const auto& fp     = free_parameters[static_cast<std::size_t>(k)];
        const double start = fp.initial.value_or(parameter_value(config_template, fp, options.i0));
        u0[k]              = std::clamp((start - fp.lower) / (fp.upper - fp.lower), 0.0, 1.0);
    }

    const NelderMeadResult nm = nelder_mead(objective, u0, options.optimizer);
    const Candidate best      = build(nm.x);

    FitResult result(best.config);
    result.i0 = best.i0;
    for (Eigen::Index k = 0; k < dim; ++k) {
        result.parameters.push_back(to_value(nm.x, k));
    }
    result.residuals   = residuals_of(best);
    result.sse         = result.residuals.squaredNorm();
    result.converged   = nm.converged;
    result.evaluations = nm.evaluations;
    return result;
}

Json fit_to_json(const std::vector<FreeParameter>& free_parameters, const FitResult& result)
{
    Json params = Json::object();
    for (std::size_t k = 0; k < free_parameters.size(); ++k) {
        params[to_string(free_parameters[k])] = result.parameters[k];
    }
    return Json{{"fitted_config", config_to_json(result.fitted_config)},
                {"parameters", params},
                {"i0", result.i0},
                {"sse", result.sse},
                {"residuals", vector_to_json(result.residuals)},
                {"converged", result.converged},
                {"evaluations", result.evaluations}};
}

} // namespace waning
