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
#include "waning/nelder_mead.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace waning
{

namespace
{

Matrix random_rotation(int dim, std::mt19937_64& rng, bool identity)
{
    if (identity) {
        return Matrix::Identity(dim, dim);
    }
    std::normal_distribution<double> normal;
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            g(i, j) = normal(rng);
        }
    }
    return Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(dim, dim);
}

} // namespace

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const NelderMeadOptions& options)
{
    const int dim = static_cast<int>(x0.size());
    std::mt19937_64 rng(options.seed);

    NelderMeadResult best;
    best.x = x0;
    best.f = f(x0);
    best.evaluations = 1;

    double step = options.initial_step;
    for (int restart = 0; restart <= options.max_restarts; ++restart) {
        best.restarts = restart;
        const Matrix dirs = random_rotation(dim, rng, restart == 0);

        std::vector<Vector> xs(static_cast<std::size_t>(dim) + 1, best.x);
        std::vector<double> fs(static_cast<std::size_t>(dim) + 1, best.f);
        for (int k = 0; k < dim; ++k) {
            xs[static_cast<std::size_t>(k) + 1] = best.x + step * dirs.col(k);
            fs[static_cast<std::size_t>(k) + 1] = f(xs[static_cast<std::size_t>(k) + 1]);
            ++best.evaluations;
        }
        const double start_f = best.f;

        std::vector<std::size_t> order(xs.size());
        bool collapsed = false;
        while (best.evaluations < options.max_evaluations) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
            const std::size_t lo = order.front(), hi = order.back(), second = order[order.size() - 2];

            double diameter = 0;
            for (const Vector& x : xs) {
                diameter = std::max(diameter, (x - xs[lo]).cwiseAbs().maxCoeff());
            }
            if (diameter < options.x_tolerance ||
                fs[hi] - fs[lo] < options.f_tolerance + options.f_relative * std::abs(fs[lo])) {
                collapsed = true;
                break;
            }

            Vector centroid = Vector::Zero(dim);
            for (std::size_t k = 0; k < xs.size(); ++k) {
                if (k != hi) {
                    centroid += xs[k];
                }
            }
            centroid /= dim;

            const Vector xr = centroid + (centroid - xs[hi]);
            const double fr = f(xr);
            ++best.evaluations;
            if (fr < fs[lo]) {
                const Vector xe = centroid + 2.0 * (centroid - xs[hi]);
                const double fe = f(xe);
                ++best.evaluations;
                if (fe < fr) {
                    xs[hi] = xe;
                    fs[hi] = fe;
                }
                else {
                    xs[hi] = xr;
                    fs[hi] = fr;
                }
                continue;
            }
            if (fr < fs[second]) {
                xs[hi] = xr;
                fs[hi] = fr;
                continue;
            }
            const bool outside = fr < fs[hi];
            const Vector xc    = centroid + 0.5 * ((outside ? xr : xs[hi]) - centroid);
            const double fc    = f(xc);
            ++best.evaluations;
            if (fc < std::min(fr, fs[hi])) {
                xs[hi] = xc;
                fs[hi] = fc;
                continue;
            }
            for (std::size_t k = 0; k < xs.size(); ++k) {
                if (k != lo) {
                    xs[k] = xs[lo] + 0.5 * (xs[k] - xs[lo]);
                    fs[k] = f(xs[k]);
                    ++best.evaluations;
                }
            }
        }

        const auto arg = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
        const bool improved = fs[arg] < start_f;
        if (improved) {
            best.x = xs[arg];
            best.f = fs[arg];
        }
        if (!collapsed) {
            best.converged = false;
            return best;
        }
        if (restart > 0 && !(start_f - best.f > options.f_tolerance + options.f_relative * std::abs(best.f))) {
            best.converged = true;
            return best;
        }
        step = std::max(options.initial_step * 1e-3, 0.5 * step);
    }
    best.converged = true;
    return best;
}

} // namespace waning
