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


#ifndef ISAC_MANIFEST_HPP
#define ISAC_MANIFEST_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace isac::cli
{

inline constexpr const char *kToolVersion = "1.0.0";

struct ManifestEntry
{
    std::string label;
    std::string config_json;
    std::string output_path;
};

struct RunManifest
{
    std::string tool_version = kToolVersion;
    std::uint64_t master_seed = 0;
    double wall_seconds = 0.0;
    std::vector<ManifestEntry> runs;
};

std::string manifest_to_json(const RunManifest &manifest);

// Writes the manifest after checking that every referenced output exists.
void write_manifest(const RunManifest &manifest, const std::string &path);

} // namespace isac::cli

#endif
