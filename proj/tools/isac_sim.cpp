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


// Batch driver: runs configured or preset sweeps and writes one CSV per run
// plus manifest.json into the output directory.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isac/config.hpp"
#include "isac/csv.hpp"
#include "isac/errors.hpp"
#include "isac/manifest.hpp"
#include "isac/simulator.hpp"

namespace
{

void report_error(const char *type, const std::string &message)
{
    nlohmann::json j = {{"error", {{"type", type}, {"message", message}}}};
    std::cerr << j.dump() << '\n';
}

std::vector<isac::Scheme> parse_scheme_list(const std::string &list)
{
    std::vector<isac::Scheme> out;
    std::size_t start = 0;
    while (start <= list.size())
    {
        const std::size_t comma = list.find(',', start);
        const std::string name = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto s = isac::parse_scheme(name);
        if (!s)
            throw isac::InvalidParameter("--schemes: unknown scheme '" + name + "' (valid: OPC, OPS, ISAC, EA, RA)");
        out.push_back(*s);
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Monte Carlo sweeps of MIMO-OFDM sensing/communication waveform designs.\n"
                 "SNR convention: noise variance is fixed and the sum-power budget is\n"
                 "E = 10^(SNR/10) * N_t * N_c * noise_var, so equal allocation puts the nominal\n"
                 "linear SNR on every eigenmode. Worker threads are capped by ISAC_THREADS."};

    std::optional<std::string> config_path, figure, schemes;
    std::optional<std::size_t> trials, workers;
    std::optional<std::uint64_t> seed;
    std::optional<double> est_err;
    std::string out_dir = ".";
    bool list_figures = false;

    auto *cfg_opt = app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--figure", figure, "Preset figure recipe (see --list-figures)")->excludes(cfg_opt);
    app.add_option("--trials", trials, "Monte Carlo trials per sweep point")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--schemes", schemes, "Comma-separated subset of OPC,OPS,ISAC,EA,RA");
    app.add_option("--est-err", est_err, "Channel estimation error variance")->check(CLI::NonNegativeNumber);
    app.add_option("--workers", workers, "Worker threads (0: all cores)");
    app.add_flag("--list-figures", list_figures, "Print preset figure names and exit");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        report_error("usage", e.what());
        return 2;
    }

    if (list_figures)
    {
        for (const auto &n : isac::cli::figure_names())
            std::cout << n << '\n';
        return 0;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try
    {
        std::vector<isac::cli::FigureRun> runs;
        if (figure)
            runs = isac::cli::figure_recipes(*figure);
        else if (config_path)
        {
            auto parsed = isac::cli::parse_config_file(*config_path);
            for (const auto &w : parsed.warnings)
                std::cerr << nlohmann::json{{"warning", w}}.dump() << '\n';
            runs.push_back({std::filesystem::path(*config_path).stem().string(), parsed.config});
        }
        else
            runs.push_back({"sweep", isac::ExperimentConfig{}});

        for (auto &r : runs)
        {
            if (trials)
                r.config.n_trials = *trials;
            if (seed)
                r.config.master_seed = *seed;
            if (schemes)
                r.config.schemes = parse_scheme_list(*schemes);
            if (est_err)
                r.config.est_err_var = *est_err;
            if (workers)
                r.config.n_workers = *workers;
            r.config.validate();
        }

        std::filesystem::create_directories(out_dir);
        isac::cli::RunManifest manifest;
        manifest.master_seed = runs.front().config.master_seed;
        for (const auto &r : runs)
        {
            const isac::SweepResult result = isac::run_sweep(r.config);
            const std::string path = (std::filesystem::path(out_dir) / (r.label + ".csv")).string();
            isac::cli::emit_csv(result, path);
            manifest.runs.push_back({r.label, isac::cli::config_to_json(r.config, -1), path});
            std::cerr << nlohmann::json{{"wrote", path}, {"failed_trials", result.failed_trials}}.dump() << '\n';
        }
        manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        isac::cli::write_manifest(manifest, (std::filesystem::path(out_dir) / "manifest.json").string());
    }
    catch (const isac::InvalidParameter &e)
    {
        report_error("invalid_parameter", e.what());
        return 2;
    }
    catch (const isac::InvalidInput &e)
    {
        report_error("invalid_input", e.what());
        return 2;
    }
    catch (const isac::SolverFailure &e)
    {
        report_error("solver_failure", e.what());
        return 1;
    }
    catch (const std::exception &e)
    {
        report_error("runtime", e.what());
        return 1;
    }
    return 0;
}
