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


#include "isac/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "isac/errors.hpp"

namespace isac::cli
{

namespace
{

void append_number(std::string &out, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out += buf;
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;)
    {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos)
        {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double to_double(std::string_view s, std::size_t line_no)
{
    const std::string tmp(s);
    char *end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size())
        throw InvalidInput("csv line " + std::to_string(line_no) + ": bad number '" + tmp + "'");
    return v;
}

} // namespace

std::string format_csv(const SweepResult &result)
{
    std::string out(kCsvHeader);
    out += '\n';
    const std::string var(to_string(result.var));
    for (const auto &r : result.rows)
    {
        out += var;
        out += ',';
        append_number(out, r.sweep_value);
        out += ',';
        out += to_string(r.scheme);
        for (double v : {r.spectral_efficiency, r.sensing_rate, r.weighted_mi, r.se_stderr, r.sr_stderr,
                         r.wmi_stderr})
        {
            out += ',';
            append_number(out, v);
        }
        out += '\n';
    }
    return out;
}

void emit_csv(const SweepResult &result, const std::string &path)
{
    const std::string text = format_csv(result);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing: " + std::strerror(errno));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out)
        throw std::runtime_error("failed writing " + path);
}

SweepResult parse_csv(std::string_view text)
{
    SweepResult result;
    std::size_t line_no = 0;
    bool seen_header = false;
    bool seen_var = false;
    while (!text.empty())
    {
        const std::size_t nl = text.find('\n');
        const std::string_view line = text.substr(0, nl);
        text = (nl == std::string_view::npos) ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!seen_header)
        {
            if (line != kCsvHeader)
                throw InvalidInput("csv: unexpected header");
            seen_header = true;
            continue;
        }
        if (line.empty())
            continue;
        const auto f = split(line, ',');
        if (f.size() != 9)
            throw InvalidInput("csv line " + std::to_string(line_no) + ": expected 9 fields");
        const auto var = parse_sweep_var(f[0]);
        const auto scheme = parse_scheme(f[2]);
        if (!var || !scheme)
            throw InvalidInput("csv line " + std::to_string(line_no) + ": unknown sweep variable or scheme");
        if (seen_var && *var != result.var)
            throw InvalidInput("csv line " + std::to_string(line_no) + ": mixed sweep variables");
        result.var = *var;
        seen_var = true;
        SweepRow r;
        r.sweep_value = to_double(f[1], line_no);
        r.scheme = *scheme;
        r.spectral_efficiency = to_double(f[3], line_no);
        r.sensing_rate = to_double(f[4], line_no);
        r.weighted_mi = to_double(f[5], line_no);
        r.se_stderr = to_double(f[6], line_no);
        r.sr_stderr = to_double(f[7], line_no);
        r.wmi_stderr = to_double(f[8], line_no);
        result.rows.push_back(r);
    }
    if (!seen_header)
        throw InvalidInput("csv: missing header");
    return result;
}

} // namespace isac::cli
