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


#ifndef ISAC_ORACLE_HPP
#define ISAC_ORACLE_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "isac/linalg.hpp"

namespace isac::oracle
{

// Simplex lattice with spacing step * budget.
struct GridSpec
{
    std::size_t n_modes = 0; // <= 6
    double step = 0.0;       // fraction of the budget; 1 / step must be an integer
    double budget = 0.0;
};

// Objective contribution of one mode at a given power. Must be defined on [0, budget].
using ModeObjective = std::function<double(std::size_t mode, double power)>;

struct GridResult
{
    std::vector<double> powers;
    double objective = 0.0;
    double lattice_points = 0.0; // number of lattice allocations covered
};

inline constexpr std::size_t kMaxModes = 6;
inline constexpr double kMaxPoints = 1e8;    // n_modes * (1 / step)
inline constexpr double kMaxWork = 1e10;     // n_modes * (1 / step)^2
inline constexpr std::size_t kMaxBruteDim = 64;

// Exact maximizer of sum_i f(i, x_i) over the lattice {x : x_i = k_i step E, sum k_i = 1/step}.
// Uses dynamic programming over modes, which is exact for separable objectives.
// Ties resolve to the lexicographically smallest allocation of the leading modes' units.
// Throws InvalidParameter with a size estimate when the grid exceeds the bounds above.
GridResult grid_search_allocation(const ModeObjective &objective, const GridSpec &grid);

// Plain enumeration of every lattice point. Same tie rule as above. Refuses more than 1e7 points.
GridResult enumerate_simplex_allocation(const ModeObjective &objective, const GridSpec &grid);

// log2 det(X Sigma X^H + sigma^2 I) - n log2 sigma^2 by dense complex Gaussian
// elimination with partial pivoting. No receive-antenna factor. Throws
// InvalidParameter for dimensions above kMaxBruteDim.
double mi_bruteforce_smallcase(const cmat &x, const cmat &sigma, double noise_var);

} // namespace isac::oracle

#endif
