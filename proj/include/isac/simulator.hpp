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


#ifndef ISAC_SIMULATOR_HPP
#define ISAC_SIMULATOR_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isac/allocation.hpp"
#include "isac/channel.hpp"
#include "isac/optimizer.hpp"

namespace isac
{

enum class SweepVar
{
    snr_db,
    omega_r,
    n_subcarriers,
    spatial_rho,   // communication-channel rho only
    antenna_pairs, // N_t = N_r = value
};

std::string_view to_string(SweepVar v);
std::optional<SweepVar> parse_sweep_var(std::string_view name);

struct ChannelProfile
{
    double rho_comm = 0.5;
    double rho_sense = 0.5;
    std::vector<double> tap_powers_comm{0.25, 0.25, 0.25, 0.25};
    std::vector<double> tap_powers_sense{0.25, 0.25, 0.25, 0.25};
};

struct ExperimentConfig
{
    SystemDims dims;
    ChannelProfile channel;
    double snr_db = 10.0; // used unless the sweep is over SNR
    SweepVar sweep_var = SweepVar::snr_db;
    std::vector<double> sweep_values{-5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
    double omega_r = 0.5;
    std::size_t n_trials = 4000;
    std::uint64_t master_seed = 1;
    std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
    double est_err_var = 0.0;
    std::size_t n_workers = 0; // 0: hardware concurrency

    // Throws InvalidParameter naming the offending field.
    void validate() const;
};

// Sum-power budget for a nominal SNR: E = 10^(snr/10) N_t N_c sigma_n^2.
double budget_for_snr(double snr_db, const SystemDims &dims);

// Config with the sweep variable set to `value`.
ExperimentConfig config_at(const ExperimentConfig &config, double value);

struct SchemeOutcome
{
    double comm_bits = 0.0;
    double sensing_bits = 0.0;
    double weighted = 0.0;
};

struct TrialOutcome
{
    std::size_t trial_index = 0;
    bool ok = false;
    std::string error;
    double f_r = 0.0; // maximum sensing MI
    double f_c = 0.0; // maximum communication MI on the true channel
    std::vector<SchemeOutcome> schemes; // parallel to config.schemes
};

// Quantities shared by all trials of one sweep point. The sensing side is
// deterministic given the tap profile, so OPS and F_r are solved once here.
struct PointContext
{
    ExperimentConfig config; // sweep variable already applied
    std::size_t sweep_index = 0;
    double budget = 0.0;
    TapSet comm_taps;
    SensingCorrelation sensing;
    Eigenstructure sensing_eig;
    PowerAllocation ops;
    double f_r = 0.0;
};

PointContext prepare_point(const ExperimentConfig &config, std::size_t sweep_index);

// Per-trial seed from (master_seed, sweep_index, trial_index).
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t sweep_index, std::size_t trial_index);

// One Monte Carlo trial. Errors are captured in the outcome rather than thrown.
TrialOutcome run_trial(const PointContext &ctx, std::size_t trial_index);
TrialOutcome run_trial(const ExperimentConfig &config, std::size_t sweep_index, std::size_t trial_index);

struct SweepRow
{
    double sweep_value = 0.0;
    Scheme scheme = Scheme::EA;
    double spectral_efficiency = 0.0; // bit/s/Hz
    double sensing_rate = 0.0;        // bit/s/Hz
    double weighted_mi = 0.0;
    double se_stderr = 0.0;
    double sr_stderr = 0.0;
    double wmi_stderr = 0.0;
};

struct SweepResult
{
    SweepVar var = SweepVar::snr_db;
    std::vector<SweepRow> rows;
    std::size_t failed_trials = 0;
};

// Worker count after applying config.n_workers and the ISAC_THREADS cap.
std::size_t resolve_workers(std::size_t requested);

// All trials of one sweep point, ordered by trial index. Fails when more than
// 0.1% of trials fail.
std::vector<TrialOutcome> run_point_trials(const ExperimentConfig &config, std::size_t sweep_index);

SweepResult run_sweep(const ExperimentConfig &config);

struct TradeoffPoint
{
    double omega_r = 0.0;
    double sensing_rate = 0.0;
    double spectral_efficiency = 0.0;
    double sr_stderr = 0.0;
    double se_stderr = 0.0;
};

struct TradeoffCurve
{
    double snr_db = 0.0;
    std::vector<TradeoffPoint> points;
};

// ISAC operating points over the omega grid in config.sweep_values, one curve per SNR.
std::vector<TradeoffCurve> tradeoff_curve(const ExperimentConfig &config, std::span<const double> snrs_db);

} // namespace isac

#endif
