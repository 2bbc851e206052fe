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
#include "waning/io.hpp"
#include "waning/analysis.hpp"
#include "waning/errors.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace waning
{

namespace
{

Vector array_of(const Json& j, const char* key)
{
    const Json& arr = j.at(key);
    if (!arr.is_array()) {
        throw ConfigError(std::string("config key '") + key + "' must be an array");
    }
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t k = 0; k < arr.size(); ++k) {
        if (!arr[k].is_number()) {
            throw ConfigError(std::string("config key '") + key + "' must hold numbers");
        }
        v[static_cast<Eigen::Index>(k)] = arr[k].get<double>();
    }
    return v;
}

double number_of(const Json& j, const char* key)
{
    const Json& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError(std::string("config key '") + key + "' must be a number");
    }
    return v.get<double>();
}

Json complex_list(const std::vector<Complex>& zs)
{
    Json out = Json::array();
    for (const Complex& z : zs) {
        out.push_back(Json::array({z.real(), z.imag()}));
    }
    return out;
}

template <typename T>
Json optional_json(const std::optional<T>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

} // namespace

std::string format_double(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

Json vector_to_json(const Vector& v)
{
    Json out = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out.push_back(v[k]);
    }
    return out;
}

ModelConfig config_from_json(const Json& j)
{
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static const std::set<std::string> known{"n", "beta", "delta", "mu", "r", "omega", "p"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) {
            throw ConfigError("unknown config key '" + item.key() + "'");
        }
    }
    for (const auto& key : known) {
        if (!j.contains(key)) {
            throw ConfigError("missing config key '" + key + "'");
        }
    }
    if (!j.at("n").is_number_integer()) {
        throw ConfigError("config key 'n' must be an integer");
    }
    return build_general(j.at("n").get<int>(), array_of(j, "beta"), number_of(j, "delta"),
                         number_of(j, "mu"), number_of(j, "r"), number_of(j, "omega"), array_of(j, "p"));
}

Json config_to_json(const ModelConfig& config)
{
    return Json{{"n", config.n()},
                {"beta", vector_to_json(config.beta())},
                {"delta", config.delta()},
                {"mu", config.mu()},
                {"r", config.r()},
                {"omega", config.omega()},
                {"p", vector_to_json(config.p())}};
}

Json parse_json_text(const std::string& text)
{
    try {
        return Json::parse(text);
    }
    catch (const Json::parse_error& e) {
        // locate the failing byte as line/column
        std::size_t line = 1, column = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                column = 1;
            }
            else {
                ++column;
            }
        }
        throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": " + e.what());
    }
}

Json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_json_text(buffer.str());
}

ModelConfig load_config(const std::string& path)
{
    try {
        return config_from_json(load_json_file(path));
    }
    catch (const Json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string config_hash(const ModelConfig& config)
{
    const Json j            = config_to_json(config);
    std::string canonical   = "n=" + std::to_string(config.n());
    for (const char* key : {"beta", "p"}) {
        canonical += std::string(";") + key + "=";
        for (const auto& v : j.at(key)) {
            canonical += format_double(v.get<double>()) + ",";
        }
    }
    for (const char* key : {"delta", "mu", "r", "omega"}) {
        canonical += std::string(";") + key + "=" + format_double(j.at(key).get<double>());
    }

    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char ch : canonical) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
    return buf;
}

Json RunManifest::to_json() const
{
    return Json{{"config_hash", config_hash},
                {"command", command},
                {"options", options},
                {"tool_version", tool_version},
                {"timestamp", timestamp}};
}

std::string RunManifest::comment_line() const
{
    return "# manifest " + to_json().dump();
}

RunManifest make_manifest(const std::string& command, const std::string& options, const std::string& hash)
{
    const auto now     = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return RunManifest{hash, command, options, WANING_VERSION, stamp};
}

Json to_json(const DfeSolution& dfe)
{
    return Json{{"s", vector_to_json(dfe.s)}, {"c", dfe.c}, {"det_a", dfe.det_a}};
}

Json to_json(const R0Report& report)
{
    return Json{{"r0", report.r0}, {"threshold_sum", report.threshold_sum}, {"regime", to_string(report.regime)}};
}

Json to_json(const LocalizationResult& loc)
{
    Json intervals = Json::array();
    for (const auto& iv : loc.intervals) {
        intervals.push_back(Json{{"center", iv.center}, {"lo", iv.lo}, {"hi", iv.hi}, {"meets_unit", iv.meets_unit}});
    }
    return Json{{"intervals", intervals},
                {"hat_c", loc.hat_c},
                {"half_width", loc.half_width},
                {"exists", to_string(loc.exists)},
                {"validity", loc.validity},
                {"contraction", loc.contraction},
                {"selected", optional_json(loc.selected)},
                {"diagnostic", loc.diagnostic}};
}

Json to_json(const EndemicSolution& sol)
{
    return Json{{"i_star", sol.i_star},
                {"s_star", vector_to_json(sol.s_star)},
                {"residual", sol.residual},
                {"iterations", sol.iterations},
                {"certification", to_string(sol.certification)}};
}

Json to_json(const StabilityVerdict& verdict)
{
    Json out{{"eigenvalues", complex_list(verdict.eigenvalues)},
             {"max_real_part", verdict.max_real_part},
             {"classification", to_string(verdict.classification)}};
    if (verdict.gershgorin_certified) {
        out["gershgorin_certified"] = *verdict.gershgorin_certified;
    }
    if (verdict.distinguished) {
        out["distinguished"]       = *verdict.distinguished;
        out["distinguished_error"] = optional_json(verdict.distinguished_error);
        out["pairing_error"]       = optional_json(verdict.pairing_error);
    }
    if (verdict.reduced_a) {
        out["reduced_a"]             = *verdict.reduced_a;
        out["reduced_b"]             = optional_json(verdict.reduced_b);
        out["reduced_pairing_error"] = optional_json(verdict.reduced_pairing_error);
    }
    return out;
}

Json to_json(const GershgorinCertificate& cert)
{
    Json discs = Json::array();
    for (const auto& d : cert.discs) {
        discs.push_back(Json{{"center", d.center}, {"radius", d.radius}});
    }
    return Json{{"certified", cert.certified}, {"eigenvalues_contained", cert.eigenvalues_contained}, {"discs", discs}};
}

Json to_json(const SignCheckReport& report)
{
    return Json{{"coefficients", report.coefficients},
                {"sign_changes", report.sign_changes},
                {"all_positive", report.all_positive}};
}

Json to_json(const AnalysisReport& report)
{
    Json out{{"config", config_to_json(report.config)},
             {"dfe", to_json(report.dfe)},
             {"dfe_discrepancy", report.dfe_discrepancy},
             {"r0", to_json(report.r0)},
             {"gershgorin", to_json(report.gershgorin)},
             {"dfe_stability", to_json(report.dfe_verdict)},
             {"localization", to_json(report.localization)},
             {"endemic", report.endemic ? to_json(*report.endemic) : Json(nullptr)},
             {"endemic_stability", report.endemic_verdict ? to_json(*report.endemic_verdict) : Json(nullptr)},
             {"sign_check", report.sign_check ? to_json(*report.sign_check) : Json(nullptr)},
             {"consistent", report.consistent()},
             {"violations", report.violations}};
    if (!report.endemic_note.empty()) {
        out["endemic_note"] = report.endemic_note;
    }
    return out;
}

} // namespace waning
