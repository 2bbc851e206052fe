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
#ifndef WANING_CLI_HPP
#define WANING_CLI_HPP

#include <ostream>

namespace waning
{

enum ExitCode : int
{
    exit_success          = 0,
    exit_usage            = 1,
    exit_input            = 2,
    exit_integration      = 3,
    exit_theory_violation = 4,
};

/// Runs the command line. Output goes to --out when given, otherwise to out; diagnostics to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace waning

#endif // WANING_CLI_HPP
