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
#include "waning/cli.hpp"
#include "waning/analysis.hpp"
#include "waning/dfe.hpp"
#include "waning/dynamics.hpp"
#include "waning/errors.hpp"
#include "waning/io.hpp"
#include "waning/scanfit.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>

namespace waning
{

namespace
{

struct GlobalFlags {
    std::string config_path;
    std::string out_path;
    int jobs = 1;
    std::string format;
    std::uint64_t seed = 1;
};

class Sink
{
public:
    Sink(const std::string& path, std::ostream& fallback)
        : stream_(&fallback)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw ConfigError("cannot write '" + path + "'");
            }
            stream_ = &file_;
        }
    }
    std::ostream& get()
    {
        return *stream_;
    }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

std::string format_or(const GlobalFlags& g, const char* fallback)
{
    return g.format.empty() ? fallback : g.format;
}

ModelConfig require_config(const GlobalFlags& g)
{
    if (g.config_path.empty()) {
        throw ConfigError("--config is required");
    }
    return load_config(g.config_path);
}

void emit_json(std::ostream& out, Json body, const RunManifest& manifest)
{
    body["manifest"] = manifest.to_json();
    out << body.dump(2) << '\n';
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"n-compartment waning-immunity epidemic model toolkit", "waning"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--config", g.config_path, "model config (JSON)");
    app.add_option("--out", g.out_path, "output file (default: standard output)");
    app.add_option("--jobs", g.jobs, "parallel sweep workers")->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", g.seed, "optimizer seed");

    std::string options_text;
    for (int k = 1; k < argc; ++k) {
        options_text += (k > 1 ? " " : "") + std::string(argv[k]);
    }

    // simulate
    double t_end = 100, i0 = 1e-6, atol = 1e-12, rtol = 1e-10;
    int samples  = 1000;
    auto* simulate = app.add_subcommand("simulate", "integrate the model and write the trajectory");
    simulate->add_option("--t-end", t_end, "final time in years")->check(CLI::PositiveNumber);
    simulate->add_option("--i0", i0, "initial prevalence (rest in S_n)");
    simulate->add_option("--samples", samples, "uniform output samples; 0 stores every accepted step");
    simulate->add_option("--atol", atol, "absolute tolerance");
    simulate->add_option("--rtol", rtol, "relative tolerance");

    auto* analyze_cmd = app.add_subcommand("analyze", "equilibria, R0, localization and stability report");
    auto* dfe_cmd     = app.add_subcommand("dfe", "disease-free equilibrium");
    auto* r0_cmd      = app.add_subcommand("r0", "basic reproduction number");

    std::string spec_path;
    bool bifurcation = false;
    auto* sweep_cmd  = app.add_subcommand("sweep", "parameter sweep");
    sweep_cmd->add_option("--spec", spec_path, "sweep spec (JSON)")->required();
    sweep_cmd->add_flag("--bifurcation", bifurcation, "also locate the R0 = 1 crossing");

    std::string data_path;
    std::vector<std::string> free_specs;
    bool log_sse = false;
    int max_evaluations = 4000;
    std::optional<int> start_year;
    auto* fit_cmd = app.add_subcommand("fit", "least-squares fit to a prevalence time series");
    fit_cmd->add_option("--data", data_path, "time-series CSV")->required();
    fit_cmd->add_option("--free", free_specs, "name:lower:upper[:initial], repeatable")->required();
    fit_cmd->add_flag("--log-sse", log_sse, "fit log prevalence");
    fit_cmd->add_option("--max-evals", max_evaluations, "optimizer evaluation budget");
    fit_cmd->add_option("--start-year", start_year, "year mapped to t = 0");
    fit_cmd->add_option("--i0", i0, "initial prevalence when not free");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_success;
    }
    catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (simulate->parsed()) {
            const ModelConfig config = require_config(g);
            IntegrationOptions opts;
            opts.atol = atol;
            opts.rtol = rtol;
            if (samples > 0) {
                opts.sample_times = uniform_samples(t_end, samples);
            }
            const Trajectory traj = integrate(config, default_initial_state(config.n(), i0), t_end, opts);
            const RunManifest manifest = make_manifest("simulate", options_text, config_hash(config));
            Sink sink(g.out_path, out);
            if (format_or(g, "csv") == "json") {
                Json states = Json::array();
                for (const auto& st : traj.states) {
                    states.push_back(vector_to_json(st.flat()));
                }
                emit_json(sink.get(),
                          Json{{"times", traj.times},
                               {"states", states},
                               {"terminal_status", to_string(traj.terminal_status)},
                               {"tolerances", {{"atol", atol}, {"rtol", rtol}}}},
                          manifest);
            }
            else {
                sink.get() << manifest.comment_line() << '\n';
                write_trajectory_csv(sink.get(), traj);
            }
            return exit_success;
        }

        if (analyze_cmd->parsed()) {
            const ModelConfig config    = require_config(g);
            const AnalysisReport report = analyze(config);
            if (!report.consistent()) {
                for (const auto& v : report.violations) {
                    err << "theory violation: " << v << '\n';
                }
                return exit_theory_violation;
            }
            Sink sink(g.out_path, out);
            emit_json(sink.get(), to_json(report), make_manifest("analyze", options_text, config_hash(config)));
            return exit_success;
        }

        if (dfe_cmd->parsed()) {
            const ModelConfig config = require_config(g);
            const DfeSolution closed = solve_dfe_closed_form(config);
            const DfeSolution dense  = solve_dfe_numeric(config);
            const RunManifest manifest = make_manifest("dfe", options_text, config_hash(config));
            Sink sink(g.out_path, out);
            if (format_or(g, "json") == "csv") {
                sink.get() << manifest.comment_line() << "\nk,S_closed_form,S_dense\n";
                for (Eigen::Index k = 0; k < closed.s.size(); ++k) {
                    sink.get() << k << ',' << format_double(closed.s[k]) << ',' << format_double(dense.s[k]) << '\n';
                }
            }
            else {
                emit_json(sink.get(),
                          Json{{"closed_form", to_json(closed)},
                               {"dense", to_json(dense)},
                               {"discrepancy", (closed.s - dense.s).cwiseAbs().maxCoeff()}},
                          manifest);
            }
            return exit_success;
        }

        if (r0_cmd->parsed()) {
            const ModelConfig config = require_config(g);
            const R0Report report    = r0(config);
            const RunManifest manifest = make_manifest("r0", options_text, config_hash(config));
            Sink sink(g.out_path, out);
            if (format_or(g, "json") == "csv") {
                sink.get() << manifest.comment_line() << "\nr0,threshold_sum,regime\n"
                           << format_double(report.r0) << ',' << format_double(report.threshold_sum) << ','
                           << to_string(report.regime) << '\n';
            }
            else {
                Json body = to_json(report);
                if (config.scheme() == Scheme::last_only) {
                    body["threshold_T"] = threshold_T(config, config.omega_n());
                }
                emit_json(sink.get(), body, manifest);
            }
            return exit_success;
        }

        if (sweep_cmd->parsed()) {
            const Json spec_json = load_json_file(spec_path);
            SweepSpec spec       = sweep_spec_from_json(
                spec_json, std::filesystem::path(spec_path).parent_path().string().empty()
                               ? "."
                               : std::filesystem::path(spec_path).parent_path().string());
            spec.jobs                  = g.jobs;
            const SweepResult result   = sweep(spec);
            const RunManifest manifest = make_manifest("sweep", options_text, config_hash(spec.base));
            std::optional<BifurcationResult> bif;
            if (bifurcation) {
                bif = find_bifurcation(spec);
            }
            Sink sink(g.out_path, out);
            if (format_or(g, "csv") == "json") {
                Json body = sweep_to_json(spec, result);
                if (bif) {
                    body["bifurcation"] = Json{{"value", bif->value},
                                               {"lo", bif->lo},
                                               {"hi", bif->hi},
                                               {"condition_crossing", bif->condition_crossing
                                                                          ? Json(*bif->condition_crossing)
                                                                          : Json(nullptr)},
                                               {"existence_crossing", bif->existence_crossing
                                                                          ? Json(*bif->existence_crossing)
                                                                          : Json(nullptr)}};
                }
                emit_json(sink.get(), body, manifest);
            }
            else {
                sink.get() << manifest.comment_line() << '\n';
                if (bif) {
                    sink.get() << "# bifurcation " << format_double(bif->value) << '\n';
                }
                write_sweep_csv(sink.get(), result);
            }
            return exit_success;
        }

        if (fit_cmd->parsed()) {
            const ModelConfig config = require_config(g);
            const TimeSeries series  = ingest_timeseries_file(data_path);
            std::vector<FreeParameter> free;
            for (const auto& s : free_specs) {
                free.push_back(parse_free_parameter(s));
            }
            FitOptions opts;
            opts.log_sse                   = log_sse;
            opts.start_year                = start_year;
            opts.i0                        = i0;
            opts.optimizer.seed            = g.seed;
            opts.optimizer.max_evaluations = max_evaluations;
            const FitResult result         = fit(config, free, series, opts);
            const RunManifest manifest     = make_manifest("fit", options_text, config_hash(config));
            Sink sink(g.out_path, out);
            if (format_or(g, "json") == "csv") {
                const int first = start_year.value_or(series.years.front());
                const Vector sim = simulate_annual(result.fitted_config, result.i0, series.years, first);
                sink.get() << manifest.comment_line() << "\nyear,observed,simulated\n";
                for (std::size_t k = 0; k < series.years.size(); ++k) {
                    sink.get() << series.years[k] << ',' << format_double(series.prevalence[k]) << ','
                               << format_double(sim[static_cast<Eigen::Index>(k)]) << '\n';
                }
            }
            else {
                emit_json(sink.get(), fit_to_json(free, result), manifest);
            }
            return exit_success;
        }
    }
    catch (const IntegrationError& e) {
        err << "integration error: " << e.what() << '\n';
        return exit_integration;
    }
    catch (const ConfigError& e) {
        err << "input error: " << e.what() << '\n';
        return exit_input;
    }
    catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    }
    return exit_usage;
}

} // namespace waning
