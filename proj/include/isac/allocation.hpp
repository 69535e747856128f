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


#ifndef ISAC_ALLOCATION_HPP
#define ISAC_ALLOCATION_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace isac
{

// Waveform design schemes compared by the simulator.
enum class Scheme
{
    OPC,  // maximize communication MI
    OPS,  // maximize sensing MI
    ISAC, // maximize normalized weighted MI
    EA,   // equal allocation
    RA,   // uniformly random allocation on the power simplex
};

inline constexpr Scheme kAllSchemes[] = {Scheme::OPC, Scheme::OPS, Scheme::ISAC, Scheme::EA, Scheme::RA};

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

// Diagonal eigen-domain power loading (xi_ii, q_ii or s_ii) under a sum-power budget.
struct PowerAllocation
{
    std::vector<double> powers;
    double budget = 0.0;
    // Active Lagrange multiplier: alpha / beta for water-filling, gamma for the
    // weighted problem. Zero for EA and RA.
    double multiplier = 0.0;
    Scheme scheme = Scheme::EA;

    double total() const;
};

} // namespace isac

#endif
