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
#ifndef WANING_NELDER_MEAD_HPP
#define WANING_NELDER_MEAD_HPP

#include "waning/model.hpp"

#include <cstdint>
#include <functional>

namespace waning
{

struct NelderMeadOptions {
    int max_evaluations = 4000;
    int max_restarts    = 6;
    double initial_step = 0.1;
    double x_tolerance  = 1e-10; ///< simplex diameter
    double f_tolerance  = 1e-22; ///< absolute spread of vertex values
    double f_relative   = 1e-12; ///< spread relative to the best value
    std::uint64_t seed  = 1;
};

struct NelderMeadResult {
    Vector x;
    double f        = 0;
    int evaluations = 0;
    int restarts    = 0;
    bool converged  = false;
};

/**
 * Derivative-free simplex minimization with restarts.
 *
 * Each restart rebuilds the simplex around the incumbent along seeded random orthogonal
 * directions. Stops once a restart fails to improve the incumbent after collapsing.
 */
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const NelderMeadOptions& options = {});

} // namespace waning

#endif // WANING_NELDER_MEAD_HPP
