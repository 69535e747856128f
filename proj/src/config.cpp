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


#include "isac/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace isac::cli
{

namespace
{

using json = nlohmann::json;

// 1-based line and column of a byte offset.
std::string position_of(std::string_view text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
            ++col;
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void check_keys(const json &obj, std::initializer_list<std::string_view> allowed, const std::string &where)
{
    if (!obj.is_object())
        throw InvalidParameter(where + ": expected a JSON object");
    for (const auto &[key, value] : obj.items())
    {
        bool known = false;
        for (auto a : allowed)
            known = known || key == a;
        if (!known)
            throw InvalidParameter(where + (where.empty() ? "" : ".") + key + ": unknown field");
    }
}

double get_real(const json &obj, const char *key, double fallback, const std::string &field)
{
    if (!obj.contains(key))
        return fallback;
    const json &v = obj.at(key);
    if (!v.is_number())
        throw InvalidParameter(field + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw InvalidParameter(field + ": must be finite");
    return d;
}

long long get_int(const json &obj, const char *key, long long fallback, const std::string &field)
{
    if (!obj.contains(key))
        return fallback;
    const json &v = obj.at(key);
    if (!v.is_number_integer())
        throw InvalidParameter(field + ": expected an integer");
    return v.get<long long>();
}

std::size_t get_count(const json &obj, const char *key, std::size_t fallback, const std::string &field,
                      long long minimum)
{
    const long long v = get_int(obj, key, static_cast<long long>(fallback), field);
    if (v < minimum)
        throw InvalidParameter(field + ": must be >= " + std::to_string(minimum) + ", got " + std::to_string(v));
    return static_cast<std::size_t>(v);
}

std::vector<double> get_real_list(const json &v, const std::string &field)
{
    if (!v.is_array())
        throw InvalidParameter(field + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto &e : v)
    {
        if (!e.is_number())
            throw InvalidParameter(field + ": expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// Resolves the path count and tap powers of one channel side.
std::vector<double> resolve_taps(const json &dims, const char *paths_key, const json &channel,
                                 const char *powers_key, std::size_t &n_paths, std::vector<std::string> &warnings)
{
    const std::string powers_field = std::string("channel.") + powers_key;
    const std::string paths_field = std::string("dims.") + paths_key;
    std::vector<double> powers;
    if (channel.contains(powers_key))
    {
        powers = get_real_list(channel.at(powers_key), powers_field);
        if (powers.empty())
            throw InvalidParameter(powers_field + ": at least one tap is required");
        if (dims.contains(paths_key) && n_paths != powers.size())
            throw InvalidParameter(paths_field + ": " + std::to_string(n_paths) + " paths but " +
                                   std::to_string(powers.size()) + " tap powers");
        n_paths = powers.size();
    }
    else
        powers.assign(n_paths, 1.0 / static_cast<double>(n_paths));

    double sum = 0.0;
    for (double p : powers)
    {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw InvalidParameter(powers_field + ": powers must be finite and nonnegative");
        sum += p;
    }
    if (!(sum > 0.0))
        throw InvalidParameter(powers_field + ": powers must not all be zero");
    if (std::abs(sum - 1.0) > 1e-12)
    {
        std::ostringstream msg;
        msg << powers_field << ": tap powers sum to " << sum << "; renormalized to 1";
        warnings.push_back(msg.str());
        for (double &p : powers)
            p /= sum;
    }
    return powers;
}

std::vector<double> parse_sweep_values(const json &sweep)
{
    if (sweep.contains("values"))
    {
        if (sweep.contains("start") || sweep.contains("stop") || sweep.contains("step"))
            throw InvalidParameter("sweep: give either values or start/stop/step, not both");
        return get_real_list(sweep.at("values"), "sweep.values");
    }
    if (!(sweep.contains("start") && sweep.contains("stop") && sweep.contains("step")))
        throw InvalidParameter("sweep: needs values or all of start, stop, step");
    const double start = get_real(sweep, "start", 0.0, "sweep.start");
    const double stop = get_real(sweep, "stop", 0.0, "sweep.stop");
    const double step = get_real(sweep, "step", 0.0, "sweep.step");
    if (!(step > 0.0))
        throw InvalidParameter("sweep.step: must be positive");
    if (stop < start)
        throw InvalidParameter("sweep.stop: must not be below sweep.start");
    const double span = (stop - start) / step;
    if (span > 1e5)
        throw InvalidParameter("sweep.step: too many sweep points");
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k)
        out[k] = start + static_cast<double>(k) * step;
    return out;
}

} // namespace

ParsedConfig parse_config_text(std::string_view text)
{
    ParsedConfig parsed;
    ExperimentConfig &c = parsed.config;

    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
    {
        c.validate();
        return parsed;
    }

    json root;
    try
    {
        root = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error &e)
    {
        std::string what = e.what();
        // Drop the library's own "[json.exception.parse_error.101] parse error at line..." prefix.
        if (const auto pos = what.find(": "); pos != std::string::npos)
            what = what.substr(pos + 2);
        throw ConfigParseError("config parse error at " + position_of(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                               what);
    }

    check_keys(root, {"dims", "channel", "snr_db", "omega_r", "n_trials", "seed", "schemes", "est_err_var",
                      "n_workers", "sweep"},
               "");

    const json empty = json::object();
    const json &dims = root.contains("dims") ? root.at("dims") : empty;
    const json &channel = root.contains("channel") ? root.at("channel") : empty;
    check_keys(dims, {"n_subcarriers", "n_tx", "n_rx", "n_symbols", "n_paths_comm", "n_paths_sense", "noise_var"},
               "dims");
    check_keys(channel, {"rho_comm", "rho_sense", "tap_powers_comm", "tap_powers_sense"}, "channel");

    SystemDims &d = c.dims;
    d.n_subcarriers = get_count(dims, "n_subcarriers", d.n_subcarriers, "dims.n_subcarriers", 1);
    d.n_tx = get_count(dims, "n_tx", d.n_tx, "dims.n_tx", 1);
    d.n_rx = get_count(dims, "n_rx", d.n_rx, "dims.n_rx", 1);
    d.n_symbols = get_count(dims, "n_symbols", d.n_symbols, "dims.n_symbols", 1);
    d.n_paths_comm = get_count(dims, "n_paths_comm", d.n_paths_comm, "dims.n_paths_comm", 1);
    d.n_paths_sense = get_count(dims, "n_paths_sense", d.n_paths_sense, "dims.n_paths_sense", 1);
    d.noise_var = get_real(dims, "noise_var", d.noise_var, "dims.noise_var");
    if (!(d.noise_var > 0.0))
        throw InvalidParameter("dims.noise_var: must be positive");

    c.channel.rho_comm = get_real(channel, "rho_comm", c.channel.rho_comm, "channel.rho_comm");
    c.channel.rho_sense = get_real(channel, "rho_sense", c.channel.rho_sense, "channel.rho_sense");
    c.channel.tap_powers_comm =
        resolve_taps(dims, "n_paths_comm", channel, "tap_powers_comm", d.n_paths_comm, parsed.warnings);
    c.channel.tap_powers_sense =
        resolve_taps(dims, "n_paths_sense", channel, "tap_powers_sense", d.n_paths_sense, parsed.warnings);

    c.snr_db = get_real(root, "snr_db", c.snr_db, "snr_db");
    c.omega_r = get_real(root, "omega_r", c.omega_r, "omega_r");
    c.n_trials = get_count(root, "n_trials", c.n_trials, "n_trials", 1);
    {
        const long long seed = get_int(root, "seed", static_cast<long long>(c.master_seed), "seed");
        if (seed < 0)
            throw InvalidParameter("seed: must be nonnegative");
        c.master_seed = static_cast<std::uint64_t>(seed);
    }
    c.est_err_var = get_real(root, "est_err_var", c.est_err_var, "est_err_var");
    c.n_workers = get_count(root, "n_workers", c.n_workers, "n_workers", 0);

    if (root.contains("schemes"))
    {
        const json &s = root.at("schemes");
        if (!s.is_array() || s.empty())
            throw InvalidParameter("schemes: expected a nonempty array of scheme names");
        c.schemes.clear();
        for (const auto &e : s)
        {
            const auto scheme = e.is_string() ? parse_scheme(e.get<std::string>()) : std::nullopt;
            if (!scheme)
                throw InvalidParameter("schemes: unknown scheme " + e.dump() + " (valid: OPC, OPS, ISAC, EA, RA)");
            c.schemes.push_back(*scheme);
        }
    }

    if (root.contains("sweep"))
    {
        const json &sweep = root.at("sweep");
        check_keys(sweep, {"var", "values", "start", "stop", "step"}, "sweep");
        if (sweep.contains("var"))
        {
            const json &v = sweep.at("var");
            const auto var = v.is_string() ? parse_sweep_var(v.get<std::string>()) : std::nullopt;
            if (!var)
                throw InvalidParameter("sweep.var: unknown sweep variable " + v.dump() +
                                       " (valid: snr_db, omega_r, n_subcarriers, spatial_rho, antenna_pairs)");
            c.sweep_var = *var;
        }
        if (sweep.contains("values") || sweep.contains("start") || sweep.contains("stop") || sweep.contains("step"))
            c.sweep_values = parse_sweep_values(sweep);
        else if (c.sweep_var != SweepVar::snr_db)
            throw InvalidParameter("sweep.values: required when sweep.var is not snr_db");
    }

    c.validate();
    return parsed;
}

ParsedConfig parse_config_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try
    {
        return parse_config_text(buf.str());
    }
    catch (const ConfigParseError &e)
    {
        throw ConfigParseError(path + ": " + e.what());
    }
}

std::string config_to_json(const ExperimentConfig &c, int indent)
{
    json root;
    root["dims"] = {{"n_subcarriers", c.dims.n_subcarriers}, {"n_tx", c.dims.n_tx},
                    {"n_rx", c.dims.n_rx},                   {"n_symbols", c.dims.n_symbols},
                    {"n_paths_comm", c.dims.n_paths_comm},   {"n_paths_sense", c.dims.n_paths_sense},
                    {"noise_var", c.dims.noise_var}};
    root["channel"] = {{"rho_comm", c.channel.rho_comm},
                       {"rho_sense", c.channel.rho_sense},
                       {"tap_powers_comm", c.channel.tap_powers_comm},
                       {"tap_powers_sense", c.channel.tap_powers_sense}};
    root["snr_db"] = c.snr_db;
    root["omega_r"] = c.omega_r;
    root["n_trials"] = c.n_trials;
    root["seed"] = c.master_seed;
    json schemes = json::array();
    for (Scheme s : c.schemes)
        schemes.push_back(std::string(to_string(s)));
    root["schemes"] = schemes;
    root["est_err_var"] = c.est_err_var;
    root["n_workers"] = c.n_workers;
    root["sweep"] = {{"var", std::string(to_string(c.sweep_var))}, {"values", c.sweep_values}};
    return root.dump(indent);
}

ExperimentConfig desk_defaults()
{
    ExperimentConfig c;
    c.n_trials = 400;
    return c;
}

namespace
{

std::vector<double> range(double start, double stop, double step)
{
    std::vector<double> v;
    for (std::size_t k = 0;; ++k)
    {
        const double x = start + static_cast<double>(k) * step;
        if (x > stop + 1e-9 * step)
            break;
        v.push_back(x);
    }
    return v;
}

ExperimentConfig sweep_config(SweepVar var, std::vector<double> values, std::vector<Scheme> schemes)
{
    ExperimentConfig c = desk_defaults();
    c.sweep_var = var;
    c.sweep_values = std::move(values);
    c.schemes = std::move(schemes);
    return c;
}

std::vector<FigureRun> with_imperfect(const std::string &label, const ExperimentConfig &base)
{
    ExperimentConfig imperfect = base;
    imperfect.est_err_var = 0.01;
    imperfect.schemes = {Scheme::ISAC};
    return {{label, base}, {label + "_imperfect", imperfect}};
}

} // namespace

std::vector<std::string> figure_names()
{
    return {"fig3", "fig4", "fig5", "fig6a", "fig6b", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13"};
}

std::vector<FigureRun> figure_recipes(std::string_view name)
{
    const std::vector<Scheme> all(std::begin(kAllSchemes), std::end(kAllSchemes));
    const std::vector<Scheme> four{Scheme::OPC, Scheme::OPS, Scheme::ISAC, Scheme::EA};
    const std::vector<double> snr_grid = range(-5.0, 20.0, 5.0);
    const std::vector<double> omega_grid = range(0.0, 1.0, 0.1);

    if (name == "fig3" || name == "fig4")
        return with_imperfect(std::string(name), sweep_config(SweepVar::snr_db, snr_grid, all));
    if (name == "fig5")
    {
        std::vector<FigureRun> runs;
        runs.push_back({"fig5_reference", sweep_config(SweepVar::snr_db, snr_grid, {Scheme::OPC, Scheme::OPS})});
        for (double w : {0.2, 0.5, 0.8})
        {
            ExperimentConfig c = sweep_config(SweepVar::snr_db, snr_grid, {Scheme::ISAC});
            c.omega_r = w;
            std::ostringstream label;
            label << "fig5_w" << w;
            runs.push_back({label.str(), c});
        }
        return runs;
    }
    if (name == "fig6a" || name == "fig6b")
    {
        ExperimentConfig c = sweep_config(SweepVar::omega_r, omega_grid, four);
        c.snr_db = (name == "fig6a") ? 1.0 : 10.0;
        return with_imperfect(std::string(name), c);
    }
    if (name == "fig7")
    {
        std::vector<FigureRun> runs;
        for (double snr : {1.0, 10.0, 20.0})
        {
            ExperimentConfig c = sweep_config(SweepVar::omega_r, omega_grid, {Scheme::ISAC});
            c.snr_db = snr;
            std::ostringstream label;
            label << "fig7_snr" << snr;
            runs.push_back({label.str(), c});
        }
        return runs;
    }
    if (name == "fig8" || name == "fig9")
    {
        ExperimentConfig c = sweep_config(SweepVar::n_subcarriers, range(5.0, 50.0, 5.0), four);
        c.snr_db = 1.0;
        return {{std::string(name), c}};
    }
    if (name == "fig10" || name == "fig11")
        return {{std::string(name), sweep_config(SweepVar::spatial_rho, range(0.0, 0.9, 0.1), four)}};
    if (name == "fig12" || name == "fig13")
    {
        std::vector<FigureRun> runs;
        for (std::size_t n : {2, 4, 8})
        {
            ExperimentConfig c = sweep_config(SweepVar::snr_db, snr_grid, {Scheme::ISAC});
            c.dims.n_tx = n;
            c.dims.n_rx = n;
            runs.push_back({std::string(name) + "_" + std::to_string(n) + "x" + std::to_string(n), c});
        }
        return runs;
    }

    std::string valid;
    for (const auto &n : figure_names())
        valid += (valid.empty() ? "" : ", ") + n;
    throw InvalidParameter("unknown figure '" + std::string(name) + "'; valid names: " + valid);
}

} // namespace isac::cli
