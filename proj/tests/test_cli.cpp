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
#include "waning/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace waning;

namespace
{

const std::string data_dir = WANING_DATA_DIR;

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "waning");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out  = out.str();
    r.err  = err.str();
    return r;
}

std::string scratch(const std::string& name, const std::string& contents)
{
    const auto dir = std::filesystem::temp_directory_path() / "waning_cli_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path) << contents;
    return path.string();
}

/// Drops '#' lines so outputs can be compared without their manifests.
std::string data_section(const std::string& text)
{
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() != '#') {
            out += line + '\n';
        }
    }
    return out;
}

Json body(const Run& r)
{
    Json j = Json::parse(r.out);
    j.erase("manifest");
    return j;
}

} // namespace

TEST_CASE("simulate writes a CSV trajectory with a manifest")
{
    const Run r = run({"--config", data_dir + "/pertussis_reconstructed.json", "simulate", "--t-end", "219",
                       "--samples", "219"});
    CHECK(r.code == exit_success);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# manifest {", 0) == 0);
    std::getline(in, line);
    CHECK(line == "t,S_0,S_1,S_2,I");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == 220);
}

TEST_CASE("simulate writes to --out and supports JSON")
{
    const std::string out = scratch("traj.json", "");
    const Run r = run({"--config", data_dir + "/synthetic_config.json", "--out", out, "--format", "json", "simulate",
                       "--t-end", "5", "--samples", "5"});
    CHECK(r.code == exit_success);
    CHECK(r.out.empty());
    std::ifstream in(out);
    const Json j = Json::parse(in);
    CHECK(j.at("times").size() == 6);
    CHECK(j.at("manifest").at("command") == "simulate");
}

TEST_CASE("malformed config JSON is an input error with its position")
{
    const std::string path = scratch("broken.json", "{\n  \"n\": 2,\n  \"beta\": [1, 2 3]\n}\n");
    const Run r = run({"--config", path, "simulate"});
    CHECK(r.code == exit_input);
    CHECK(r.err.find("line 3") != std::string::npos);
    CHECK(r.err.find("column") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected")
{
    const std::string path = scratch(
        "extra.json", R"({"n":1,"beta":[1,2],"delta":0.1,"mu":0.1,"r":1,"omega":1,"p":[0,0.5],"gamma":3})");
    CHECK(run({"--config", path, "r0"}).code == exit_input);
}

TEST_CASE("absurdly stiff rates are an integration failure")
{
    const std::string path =
        scratch("stiff.json", R"({"n":2,"beta":[1,3,6],"delta":1e9,"mu":0.1,"r":1,"omega":1e9,"p":[0,0,0.5]})");
    const Run r = run({"--config", path, "simulate", "--t-end", "100"});
    CHECK(r.code == exit_integration);
    CHECK(r.err.find("integration error") != std::string::npos);
}

TEST_CASE("analyze: all-but-last boosting below threshold")
{
    const std::string path =
        scratch("abl.json", R"({"n":2,"beta":[0.2,0.5,0.9],"delta":0.2,"mu":0.1,"r":1,"omega":3,"p":[0,0.4,0]})");
    const Run r = run({"--config", path, "analyze"});
    REQUIRE(r.code == exit_success);
    const Json j = body(r);
    CHECK(j.at("r0").at("regime") == "stable");
    CHECK(j.at("dfe_stability").at("classification") == "asymptotically_stable");
    CHECK(j.at("localization").at("exists") == "none");
    CHECK(j.at("endemic").is_null());
    CHECK(j.at("consistent") == true);
}

TEST_CASE("analyze: last-only boosting above threshold has a certified stable endemic state")
{
    const std::string path =
        scratch("lo.json", R"({"n":2,"beta":[0.5,2,4],"delta":1e-7,"mu":0.1,"r":1,"omega":0.4,"p":[0,0,0.5]})");
    const Run r = run({"--config", path, "analyze"});
    REQUIRE(r.code == exit_success);
    const Json j = body(r);
    CHECK(j.at("r0").at("regime") == "unstable");
    CHECK(j.at("localization").at("validity") == true);
    CHECK(j.at("localization").at("exists") == "unique");
    CHECK(j.at("endemic").at("certification") == "certified-contraction");
    CHECK(j.at("endemic_stability").at("classification") == "asymptotically_stable");
}

TEST_CASE("analyze: large waning flags the uncertified numeric equilibrium")
{
    const std::string path =
        scratch("big.json", R"({"n":2,"beta":[2,6,10],"delta":3,"mu":0.1,"r":1,"omega":2,"p":[0,0,0.5]})");
    const Run r = run({"--config", path, "analyze"});
    REQUIRE(r.code == exit_success);
    const Json j = body(r);
    CHECK(j.at("localization").at("validity") == false);
    CHECK(j.at("endemic").at("certification") == "numeric-uncertified");
}

TEST_CASE("dfe and r0 report the closed form")
{
    const std::string cfg = data_dir + "/pertussis_reconstructed.json";
    const Run d = run({"--config", cfg, "dfe"});
    REQUIRE(d.code == exit_success);
    CHECK(body(d).at("discrepancy").get<double>() < 1e-10);
    const Run r = run({"--config", cfg, "r0"});
    REQUIRE(r.code == exit_success);
    CHECK(body(r).at("regime") == "stable");
    const Run csv = run({"--config", cfg, "--format", "csv", "r0"});
    CHECK(csv.out.find("r0,threshold_sum,regime") != std::string::npos);
}

TEST_CASE("sweep output is reproducible and order-stable across job counts")
{
    const std::string spec = data_dir + "/delta_sweep.json";
    const Run a = run({"sweep", "--spec", spec});
    const Run b = run({"sweep", "--spec", spec});
    const Run c = run({"--jobs", "4", "sweep", "--spec", spec});
    REQUIRE(a.code == exit_success);
    REQUIRE(c.code == exit_success);
    CHECK(data_section(a.out) == data_section(b.out));
    CHECK(data_section(a.out) == data_section(c.out));
    CHECK(data_section(a.out).rfind("param_value,observable,classification\n", 0) == 0);

    const Run bif = run({"--format", "json", "sweep", "--spec", spec, "--bifurcation"});
    REQUIRE(bif.code == exit_success);
    const double value = body(bif).at("bifurcation").at("value").get<double>();
    CHECK(value > 0.15);
    CHECK(value < 0.3);
}

TEST_CASE("fit on the shipped synthetic dataset converges")
{
    const Run r = run({"--config", data_dir + "/synthetic_config.json", "fit", "--data",
                       data_dir + "/synthetic_prevalence.csv", "--free", "beta_scale:0.5:2:0.9", "--free",
                       "delta:0.01:2:0.4", "--i0", "1e-3"});
    REQUIRE(r.code == exit_success);
    const Json j = body(r);
    CHECK(j.at("converged") == true);
    CHECK(j.at("sse").get<double>() < 1e-16);
}

TEST_CASE("fit with a missing data file is an input error")
{
    const Run r = run({"--config", data_dir + "/synthetic_config.json", "fit", "--data", "/nonexistent.csv", "--free",
                       "delta:0:1"});
    CHECK(r.code == exit_input);
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == exit_usage);
    CHECK(run({"frobnicate"}).code == exit_usage);
    CHECK(run({"simulate", "--t-end", "-1"}).code == exit_usage);
    CHECK(run({"--format", "xml", "r0"}).code == exit_usage);
    CHECK(run({"simulate"}).code == exit_input);
    CHECK(run({"--help"}).code == exit_success);
}

TEST_CASE("manifest hash depends only on the config")
{
    const std::string cfg = data_dir + "/pertussis_reconstructed.json";
    const Json a = Json::parse(run({"--config", cfg, "r0"}).out).at("manifest");
    const Json b = Json::parse(run({"--config", cfg, "dfe"}).out).at("manifest");
    CHECK(a.at("config_hash") == b.at("config_hash"));
    CHECK(a.at("tool_version") == "0.1.0");
}
