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


#include "isac/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace isac::cli
{

std::string manifest_to_json(const RunManifest &m)
{
    nlohmann::json root;
    root["tool_version"] = m.tool_version;
    root["master_seed"] = m.master_seed;
    root["wall_seconds"] = m.wall_seconds;
    nlohmann::json runs = nlohmann::json::array();
    for (const auto &r : m.runs)
        runs.push_back({{"label", r.label}, {"config", nlohmann::json::parse(r.config_json)}, {"output", r.output_path}});
    root["runs"] = runs;
    return root.dump(2) + "\n";
}

void write_manifest(const RunManifest &m, const std::string &path)
{
    for (const auto &r : m.runs)
        if (!std::filesystem::exists(r.output_path))
            throw std::runtime_error("manifest references missing output " + r.output_path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << manifest_to_json(m);
    if (!out)
        throw std::runtime_error("failed writing " + path);
}

} // namespace isac::cli
