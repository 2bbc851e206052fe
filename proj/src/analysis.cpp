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
#include "waning/analysis.hpp"
#include "waning/errors.hpp"

namespace waning
{

AnalysisReport analyze(const ModelConfig& config)
{
    AnalysisReport report(config);
    report.dfe             = solve_dfe_closed_form(config);
    report.dfe_discrepancy = (report.dfe.s - solve_dfe_numeric(config).s).cwiseAbs().maxCoeff();
    report.r0              = r0(config);
    report.gershgorin      = gershgorin_certificate(config);
    report.dfe_verdict     = dfe_spectrum(config);
    report.localization    = localize(config);

    try {
        report.endemic = refine(config, report.localization);
    }
    catch (const ConvergenceError& e) {
        report.endemic_note = e.what();
    }
    catch (const SingularSystemError& e) {
        report.endemic_note = e.what();
    }

    if (report.endemic) {
        if (report.endemic->residual < 1e-9) {
            report.endemic_verdict = endemic_spectrum(config, *report.endemic);
        }
        else {
            report.endemic_note = "endemic residual too large for a spectral verdict";
        }
        if (config.n() <= 6) {
            report.sign_check = characteristic_sign_check(config, *report.endemic);
        }
    }
    report.violations = regime_violations(report);
    return report;
}

std::vector<std::string> regime_violations(const AnalysisReport& report)
{
    std::vector<std::string> out;
    if (report.r0.regime == Regime::critical) {
        return out;
    }
    const bool above = report.r0.regime == Regime::unstable;

    const StabilityClass dfe_class = report.dfe_verdict.classification;
    if (dfe_class != StabilityClass::marginal &&
        (dfe_class == StabilityClass::unstable) != above) {
        out.push_back(std::string("DFE spectrum is ") + to_string(dfe_class) + " but R0 regime is " +
                      to_string(report.r0.regime));
    }

    if (!report.localization.validity) {
        return out;
    }
    const bool certified = report.endemic && report.endemic->certification == Certification::certified_contraction;
    if (!above && certified) {
        out.push_back("R0 < 1 but a certified endemic equilibrium was found");
    }
    if (above) {
        if (report.localization.exists == Existence::none) {
            out.push_back("R0 > 1 but localization reports no endemic equilibrium");
        }
        else if (report.localization.exists == Existence::unique && !report.endemic) {
            out.push_back("R0 > 1 and a unique endemic root is localized, but refinement failed: " +
                          report.endemic_note);
        }
        if (certified && report.endemic_verdict &&
            report.endemic_verdict->classification != StabilityClass::asymptotically_stable) {
            out.push_back(std::string("certified endemic equilibrium is ") +
                          to_string(report.endemic_verdict->classification));
        }
    }
    return out;
}

} // namespace waning
