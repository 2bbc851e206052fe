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
#ifndef WANING_ERRORS_HPP
#define WANING_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace waning
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model parameters, state, or input file contents.
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// An operation that requires a particular vaccination scheme got another one.
class SchemeMismatch : public ConfigError
{
public:
    using ConfigError::ConfigError;
};

/// Malformed time-series input. Carries the 1-based line number (0 if unknown).
class DataError : public ConfigError
{
public:
    DataError(const std::string& what, int line)
        : ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + what : what)
        , line_(line)
    {
    }
    int line() const
    {
        return line_;
    }

private:
    int line_;
};

/// The ODE integrator could not proceed (step-size underflow, step budget, blow-up).
class IntegrationError : public Error
{
public:
    IntegrationError(const std::string& what, double time)
        : Error(what + " at t=" + std::to_string(time))
        , time_(time)
    {
    }
    double time() const
    {
        return time_;
    }

private:
    double time_;
};

/// A_delta(I) could not be solved at the given prevalence.
class SingularSystemError : public Error
{
public:
    SingularSystemError(const std::string& what, double prevalence)
        : Error(what + " (I=" + std::to_string(prevalence) + ")")
        , prevalence_(prevalence)
    {
    }
    double prevalence() const
    {
        return prevalence_;
    }

private:
    double prevalence_;
};

/// Iterative procedure failed to converge or its preconditions do not hold.
class ConvergenceError : public Error
{
public:
    using Error::Error;
};

} // namespace waning

#endif // WANING_ERRORS_HPP
