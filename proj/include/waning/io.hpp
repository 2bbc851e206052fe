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
#ifndef WANING_IO_HPP
#define WANING_IO_HPP

#include "waning/model.hpp"

#include <json.hpp>

#include <string>

namespace waning
{

struct AnalysisReport;
struct DfeSolution;
struct R0Report;
struct LocalizationResult;
struct EndemicSolution;
struct StabilityVerdict;
struct GershgorinCertificate;
struct SignCheckReport;

using Json = nlohmann::json;

/// 17 significant digits, "%.17g".
std::string format_double(double value);

/// Strict reader: keys n, beta, delta, mu, r, omega, p; anything else is a ConfigError.
ModelConfig config_from_json(const Json& j);
Json config_to_json(const ModelConfig& config);

/// Parses JSON text; syntax errors become ConfigError carrying line and column.
Json parse_json_text(const std::string& text);
Json load_json_file(const std::string& path);
ModelConfig load_config(const std::string& path);

/// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string config_hash(const ModelConfig& config);

struct RunManifest {
    std::string config_hash;
    std::string command;
    std::string options; ///< canonical "key=value" list
    std::string tool_version;
    std::string timestamp; ///< UTC, ISO 8601

    Json to_json() const;
    /// Single "# manifest {...}" line for CSV outputs.
    std::string comment_line() const;
};

RunManifest make_manifest(const std::string& command, const std::string& options, const std::string& hash);

Json to_json(const DfeSolution& dfe);
Json to_json(const R0Report& report);
Json to_json(const LocalizationResult& loc);
Json to_json(const EndemicSolution& sol);
Json to_json(const StabilityVerdict& verdict);
Json to_json(const GershgorinCertificate& cert);
Json to_json(const SignCheckReport& report);
Json to_json(const AnalysisReport& report);

Json vector_to_json(const Vector& v);

} // namespace waning

#endif // WANING_IO_HPP
