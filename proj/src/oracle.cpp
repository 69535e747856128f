// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "isac/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "isac/errors.hpp"

namespace isac::oracle
{

namespace
{

std::size_t lattice_units(const GridSpec &grid, double work_exponent, const char *who)
{
    if (grid.n_modes == 0 || grid.n_modes > kMaxModes)
        throw InvalidParameter(std::string(who) + ": n_modes must be in [1, 6]");
    if (!(grid.step > 0.0 && grid.step <= 1.0))
        throw InvalidParameter(std::string(who) + ": step must lie in (0, 1]");
    if (!(grid.budget > 0.0) || !std::isfinite(grid.budget))
        throw InvalidParameter(std::string(who) + ": budget must be positive");
    const double units = std::round(1.0 / grid.step);
    if (std::abs(units * grid.step - 1.0) > 1e-9)
        throw InvalidParameter(std::string(who) + ": 1/step must be an integer");
    const double n = static_cast<double>(grid.n_modes);
    const double points = n * units;
    const double work = n * std::pow(units + 1.0, work_exponent);
    if (points >= kMaxPoints || work > kMaxWork)
    {
        std::ostringstream msg;
        msg << who << ": grid too large (" << points << " mode-points, about " << work
            << " objective steps); reduce n_modes or increase step";
        throw InvalidParameter(msg.str());
    }
    return static_cast<std::size_t>(units);
}

// C(units + n - 1, n - 1) in floating point.
double simplex_count(std::size_t units, std::size_t n)
{
    double c = 1.0;
    for (std::size_t k = 1; k < n; ++k)
        c = c * static_cast<double>(units + k) / static_cast<double>(k);
    return c;
}

std::vector<std::vector<double>> tabulate(const ModeObjective &f, std::size_t n, std::size_t units, double unit)
{
    std::vector<std::vector<double>> table(n, std::vector<double>(units + 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k <= units; ++k)
            table[i][k] = f(i, static_cast<double>(k) * unit);
    return table;
}

} // namespace

GridResult grid_search_allocation(const ModeObjective &objective, const GridSpec &grid)
{
    const std::size_t units = lattice_units(grid, 2.0, "grid_search_allocation");
    const std::size_t n = grid.n_modes;
    const double unit = grid.budget / static_cast<double>(units);
    const auto table = tabulate(objective, n, units, unit);

    // tail[i][r]: best value of modes i..n-1 using exactly r units.
    // choice[i][r]: units given to mode i in that optimum.
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> tail(n + 1, std::vector<double>(units + 1, ninf));
    std::vector<std::vector<std::size_t>> choice(n, std::vector<std::size_t>(units + 1, 0));
    tail[n][0] = 0.0;
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t r = 0; r <= units; ++r)
        {
            double best = ninf;
            std::size_t arg = 0;
            // The last mode must absorb the remainder.
            const std::size_t lo = (i + 1 == n) ? r : 0;
            for (std::size_t k = lo; k <= r; ++k)
            {
                const double rest = tail[i + 1][r - k];
                if (rest == ninf)
                    continue;
                const double v = table[i][k] + rest;
                if (v > best)
                {
                    best = v;
                    arg = k;
                }
            }
            tail[i][r] = best;
            choice[i][r] = arg;
        }

    GridResult out;
    out.powers.resize(n);
    std::size_t remaining = units;
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::size_t k = choice[i][remaining];
        out.powers[i] = static_cast<double>(k) * unit;
        remaining -= k;
    }
    out.objective = tail[0][units];
    out.lattice_points = simplex_count(units, n);
    return out;
}

GridResult enumerate_simplex_allocation(const ModeObjective &objective, const GridSpec &grid)
{
    const std::size_t units = lattice_units(grid, 1.0, "enumerate_simplex_allocation");
    const std::size_t n = grid.n_modes;
    const double count = simplex_count(units, n);
    if (count > 1e7)
        throw InvalidParameter("enumerate_simplex_allocation: " + std::to_string(count) +
                               " lattice points exceed the 1e7 limit");
    const double unit = grid.budget / static_cast<double>(units);
    const auto table = tabulate(objective, n, units, unit);

    // Lexicographic enumeration of compositions k_0 + ... + k_{n-1} = units.
    // Values are folded right to left, the same order the dynamic program uses.
    std::vector<std::size_t> k(n, 0);
    std::vector<std::size_t> best_k(n, 0);
    GridResult out;
    out.objective = -std::numeric_limits<double>::infinity();
    out.lattice_points = count;
    std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t i, std::size_t remaining) {
        if (i + 1 == n)
        {
            k[i] = remaining;
            double v = 0.0;
            for (std::size_t j = n; j-- > 0;)
                v = table[j][k[j]] + v;
            if (v > out.objective)
            {
                out.objective = v;
                best_k = k;
            }
            return;
        }
        for (std::size_t c = 0; c <= remaining; ++c)
        {
            k[i] = c;
            visit(i + 1, remaining - c);
        }
    };
    visit(0, units);

    out.powers.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.powers[i] = static_cast<double>(best_k[i]) * unit;
    return out;
}

double mi_bruteforce_smallcase(const cmat &x, const cmat &sigma, double noise_var)
{
    if (x.rows() > Eigen::Index(kMaxBruteDim) || x.cols() > Eigen::Index(kMaxBruteDim) ||
        sigma.rows() > Eigen::Index(kMaxBruteDim))
        throw InvalidParameter("mi_bruteforce_smallcase: dimension " +
                               std::to_string(std::max({x.rows(), x.cols(), sigma.rows()})) +
                               " exceeds the limit of 64");
    if (sigma.rows() != sigma.cols() || sigma.rows() != x.cols())
        throw InvalidInput("mi_bruteforce_smallcase: shape mismatch");
    if (!(noise_var > 0.0))
        throw InvalidParameter("mi_bruteforce_smallcase: noise variance must be positive");

    const std::size_t n = static_cast<std::size_t>(x.rows());
    const std::size_t m = static_cast<std::size_t>(x.cols());

    // A = X Sigma X^H + sigma^2 I with explicit loops, row-major.
    std::vector<cplx> xs(n * m, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < m; ++j)
                xs[i * m + j] += x(Eigen::Index(i), Eigen::Index(k)) * sigma(Eigen::Index(k), Eigen::Index(j));
    std::vector<cplx> a(n * n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
        {
            cplx s(0.0, 0.0);
            for (std::size_t k = 0; k < m; ++k)
                s += xs[i * m + k] * std::conj(x(Eigen::Index(j), Eigen::Index(k)));
            a[i * n + j] = s + (i == j ? cplx(noise_var, 0.0) : cplx(0.0, 0.0));
        }

    // log|det A| from the pivots of LU with partial pivoting.
    double log_abs_det = 0.0;
    for (std::size_t c = 0; c < n; ++c)
    {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c]))
                piv = r;
        if (std::abs(a[piv * n + c]) == 0.0)
            throw InvalidInput("mi_bruteforce_smallcase: singular matrix");
        if (piv != c)
            for (std::size_t j = 0; j < n; ++j)
                std::swap(a[c * n + j], a[piv * n + j]);
        const cplx d = a[c * n + c];
        log_abs_det += std::log2(std::abs(d));
        for (std::size_t r = c + 1; r < n; ++r)
        {
            const cplx factor = a[r * n + c] / d;
            if (factor == cplx(0.0, 0.0))
                continue;
            for (std::size_t j = c; j < n; ++j)
                a[r * n + j] -= factor * a[c * n + j];
        }
    }
    return log_abs_det - static_cast<double>(n) * std::log2(noise_var);
}

} // namespace isac::oracle
