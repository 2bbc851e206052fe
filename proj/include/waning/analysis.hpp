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
#ifndef WANING_ANALYSIS_HPP
#define WANING_ANALYSIS_HPP

#include "waning/dfe.hpp"
#include "waning/endemic.hpp"
#include "waning/stability.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace waning
{

/// Everything known about the equilibria of one configuration.
struct AnalysisReport {
    explicit AnalysisReport(ModelConfig c)
        : config(std::move(c))
    {
    }

    ModelConfig config;
    DfeSolution dfe;
    double dfe_discrepancy = 0; ///< max |closed form - dense solve|
    R0Report r0;
    GershgorinCertificate gershgorin;
    StabilityVerdict dfe_verdict;
    LocalizationResult localization;
    std::optional<EndemicSolution> endemic;
    std::string endemic_note; ///< why no endemic solution is reported
    std::optional<StabilityVerdict> endemic_verdict;
    std::optional<SignCheckReport> sign_check;
    std::vector<std::string> violations; ///< regime-consistency failures

    bool consistent() const
    {
        return violations.empty();
    }
};

AnalysisReport analyze(const ModelConfig& config);

/**
 * Cross-checks the threshold dichotomy against the computed equilibria.
 *
 * Only applies when the contraction certificate holds and R0 is outside the critical band:
 * R0 < 1 admits no certified endemic equilibrium, R0 > 1 requires one and it must be
 * asymptotically stable, and the DFE spectrum must agree with the R0 regime.
 */
std::vector<std::string> regime_violations(const AnalysisReport& report);

} // namespace waning

#endif // WANING_ANALYSIS_HPP
