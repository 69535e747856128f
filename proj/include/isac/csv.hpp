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


#ifndef ISAC_CSV_HPP
#define ISAC_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

#include "isac/simulator.hpp"

namespace isac::cli
{

inline constexpr std::string_view kCsvHeader =
    "sweep_var,sweep_value,scheme,spectral_efficiency,sensing_rate,weighted_mi,se_stderr,sr_stderr,wmi_stderr";

// Header plus one row per (sweep point, scheme); 9 significant digits; LF endings.
std::string format_csv(const SweepResult &result);

// Writes format_csv(result) to `path`. Throws std::runtime_error naming the path on failure.
void emit_csv(const SweepResult &result, const std::string &path);

// Inverse of format_csv. Throws InvalidInput on schema violations.
SweepResult parse_csv(std::string_view text);

} // namespace isac::cli

#endif
