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


#ifndef ISAC_CONFIG_HPP
#define ISAC_CONFIG_HPP

#include <string>
#include <string_view>
#include <vector>

#include "isac/errors.hpp"
#include "isac/simulator.hpp"

namespace isac::cli
{

// Malformed configuration text. The message carries line and column.
class ConfigParseError : public InvalidInput
{
  public:
    using InvalidInput::InvalidInput;
};

struct ParsedConfig
{
    ExperimentConfig config;
    std::vector<std::string> warnings;
};

// Parses JSON configuration text. Empty text yields the default configuration.
// Throws ConfigParseError on malformed text and InvalidParameter naming the
// field on invalid values.
ParsedConfig parse_config_text(std::string_view text);
ParsedConfig parse_config_file(const std::string &path);

// JSON text accepted by parse_config_text that reproduces `config`.
std::string config_to_json(const ExperimentConfig &config, int indent = 2);

// Default configuration at desk scale (400 trials).
ExperimentConfig desk_defaults();

struct FigureRun
{
    std::string label; // output file stem
    ExperimentConfig config;
};

// Preset runs for one figure. Throws InvalidParameter listing the valid names.
std::vector<FigureRun> figure_recipes(std::string_view name);
std::vector<std::string> figure_names();

} // namespace isac::cli

#endif
