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


#include "isac/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include "isac/errors.hpp"
#include "isac/mi.hpp"

namespace isac
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::size_t as_count(double v, const char *field)
{
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e6)
        throw InvalidParameter(std::string(field) + ": sweep value must be a positive integer");
    return static_cast<std::size_t>(v);
}

struct Moments
{
    double mean = 0.0;
    double stderr_ = 0.0;
};

Moments moments(const std::vector<double> &v)
{
    Moments m;
    if (v.empty())
        return m;
    const double n = static_cast<double>(v.size());
    m.mean = pairwise_sum(v.data(), v.size()) / n;
    if (v.size() > 1)
    {
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            sq[i] = (v[i] - m.mean) * (v[i] - m.mean);
        m.stderr_ = std::sqrt(pairwise_sum(sq.data(), sq.size()) / (n - 1.0) / n);
    }
    return m;
}

double max_sensing_bits(const Eigenstructure &eig, double budget, const SystemDims &dims, PowerAllocation *out)
{
    PowerAllocation a = waterfill(eig.eigenvalues, budget, dims.noise_var);
    a.scheme = Scheme::OPS;
    const double bits = sensing_mi_eigen(eig.eigenvalues, a, dims).total_bits;
    if (out)
        *out = std::move(a);
    return bits;
}

} // namespace

std::string_view to_string(SweepVar v)
{
    switch (v)
    {
    case SweepVar::snr_db:
        return "snr_db";
    case SweepVar::omega_r:
        return "omega_r";
    case SweepVar::n_subcarriers:
        return "n_subcarriers";
    case SweepVar::spatial_rho:
        return "spatial_rho";
    case SweepVar::antenna_pairs:
        return "antenna_pairs";
    }
    return "unknown";
}

std::optional<SweepVar> parse_sweep_var(std::string_view name)
{
    for (SweepVar v : {SweepVar::snr_db, SweepVar::omega_r, SweepVar::n_subcarriers, SweepVar::spatial_rho,
                       SweepVar::antenna_pairs})
        if (to_string(v) == name)
            return v;
    return std::nullopt;
}

void ExperimentConfig::validate() const
{
    dims.validate();
    if (n_trials < 1)
        throw InvalidParameter("n_trials: must be >= 1");
    if (sweep_values.empty())
        throw InvalidParameter("sweep: at least one sweep value is required");
    if (!(omega_r >= 0.0 && omega_r <= 1.0))
        throw InvalidParameter("omega_r: must lie in [0, 1]");
    if (schemes.empty())
        throw InvalidParameter("schemes: at least one scheme is required");
    if (!(est_err_var >= 0.0) || !std::isfinite(est_err_var))
        throw InvalidParameter("est_err_var: must be nonnegative");
    if (!std::isfinite(snr_db))
        throw InvalidParameter("snr_db: must be finite");
    if (channel.tap_powers_comm.size() != dims.n_paths_comm)
        throw InvalidParameter("channel.tap_powers_comm: length must equal dims.n_paths_comm");
    if (channel.tap_powers_sense.size() != dims.n_paths_sense)
        throw InvalidParameter("channel.tap_powers_sense: length must equal dims.n_paths_sense");
    for (double p : channel.tap_powers_comm)
        if (!(p >= 0.0))
            throw InvalidParameter("channel.tap_powers_comm: powers must be nonnegative");
    for (double p : channel.tap_powers_sense)
        if (!(p >= 0.0))
            throw InvalidParameter("channel.tap_powers_sense: powers must be nonnegative");
    if (!(channel.rho_comm >= 0.0 && channel.rho_comm < 1.0))
        throw InvalidParameter("channel.rho_comm: must lie in [0, 1)");
    if (!(channel.rho_sense >= 0.0 && channel.rho_sense < 1.0))
        throw InvalidParameter("channel.rho_sense: must lie in [0, 1)");
    for (double v : sweep_values)
    {
        if (!std::isfinite(v))
            throw InvalidParameter("sweep: values must be finite");
        (void)config_at(*this, v);
    }
}

double budget_for_snr(double snr_db, const SystemDims &dims)
{
    return std::pow(10.0, snr_db / 10.0) * static_cast<double>(dims.n_modes()) * dims.noise_var;
}

ExperimentConfig config_at(const ExperimentConfig &config, double value)
{
    ExperimentConfig c = config;
    switch (config.sweep_var)
    {
    case SweepVar::snr_db:
        c.snr_db = value;
        break;
    case SweepVar::omega_r:
        if (!(value >= 0.0 && value <= 1.0))
            throw InvalidParameter("sweep: omega_r values must lie in [0, 1]");
        c.omega_r = value;
        break;
    case SweepVar::n_subcarriers:
        c.dims.n_subcarriers = as_count(value, "n_subcarriers");
        if (c.dims.n_subcarriers < c.dims.n_paths_comm || c.dims.n_subcarriers < c.dims.n_paths_sense)
            throw InvalidParameter("sweep: n_subcarriers must be at least the number of paths");
        break;
    case SweepVar::spatial_rho:
        if (!(value >= 0.0 && value < 1.0))
            throw InvalidParameter("sweep: spatial_rho values must lie in [0, 1)");
        c.channel.rho_comm = value;
        break;
    case SweepVar::antenna_pairs:
        c.dims.n_tx = as_count(value, "antenna_pairs");
        c.dims.n_rx = c.dims.n_tx;
        break;
    }
    return c;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t sweep_index, std::size_t trial_index)
{
    std::uint64_t s = splitmix64(master_seed);
    s = splitmix64(s ^ static_cast<std::uint64_t>(sweep_index));
    return splitmix64(s ^ static_cast<std::uint64_t>(trial_index));
}

PointContext prepare_point(const ExperimentConfig &config, std::size_t sweep_index)
{
    if (sweep_index >= config.sweep_values.size())
        throw InvalidParameter("prepare_point: sweep index out of range");
    PointContext ctx;
    ctx.config = config_at(config, config.sweep_values[sweep_index]);
    ctx.sweep_index = sweep_index;
    const SystemDims &dims = ctx.config.dims;
    ctx.budget = budget_for_snr(ctx.config.snr_db, dims);
    ctx.comm_taps = TapSet::exponential(dims.n_tx, ctx.config.channel.rho_comm, ctx.config.channel.tap_powers_comm);
    ctx.comm_taps.validate(dims.n_tx, dims.n_subcarriers);
    const TapSet sense_taps =
        TapSet::exponential(dims.n_tx, ctx.config.channel.rho_sense, ctx.config.channel.tap_powers_sense);
    ctx.sensing = sensing_correlation_matrix(sense_taps, dims);
    ctx.sensing_eig = eig_sensing(ctx.sensing);
    ctx.f_r = max_sensing_bits(ctx.sensing_eig, ctx.budget, dims, &ctx.ops);
    return ctx;
}

TrialOutcome run_trial(const PointContext &ctx, std::size_t trial_index)
{
    TrialOutcome out;
    out.trial_index = trial_index;
    try
    {
        const ExperimentConfig &cfg = ctx.config;
        const SystemDims &dims = cfg.dims;
        const std::size_t n = dims.n_modes();
        const std::vector<double> &lambda = ctx.sensing_eig.eigenvalues;
        std::mt19937_64 rng(trial_seed(cfg.master_seed, ctx.sweep_index, trial_index));

        // Draw order is fixed so perfect and imperfect runs share H and the RA draw.
        const ChannelRealization chan = draw_taps(ctx.comm_taps, dims, rng);
        const PowerAllocation ra = random_allocation(ctx.budget, n, rng);
        const bool imperfect = cfg.est_err_var > 0.0;
        const Eigenstructure eig_true = eig_comm(chan, dims);
        const Eigenstructure eig_est =
            imperfect ? eig_comm(add_estimation_error(chan, cfg.est_err_var, rng), dims) : eig_true;
        const std::vector<double> &mu = eig_true.eigenvalues;

        PowerAllocation best_comm = waterfill(mu, ctx.budget, dims.noise_var);
        out.f_c = comm_mi_eigen(mu, best_comm, dims).total_bits;
        out.f_r = ctx.f_r;

        // Communication MI of U_est diag(p) U_est^H on the true channel.
        auto comm_on_true = [&](const PowerAllocation &a) {
            if (!imperfect)
                return comm_mi_eigen(mu, a, dims).total_bits;
            return cross_evaluate(a, eig_est, chan, dims).total_bits;
        };
        auto weighted = [&](const PowerAllocation &a) {
            return weighted_mi(a, lambda, mu, out.f_r, out.f_c, cfg.omega_r, dims).total_bits;
        };

        for (Scheme s : cfg.schemes)
        {
            SchemeOutcome o;
            PowerAllocation a;
            switch (s)
            {
            case Scheme::OPC:
                a = imperfect ? waterfill(eig_est.eigenvalues, ctx.budget, dims.noise_var) : best_comm;
                a.scheme = Scheme::OPC;
                o.comm_bits = imperfect ? comm_on_true(a) : out.f_c;
                o.sensing_bits = cross_evaluate(a, eig_est, ctx.sensing, dims).total_bits;
                break;
            case Scheme::OPS:
                a = ctx.ops;
                o.sensing_bits = ctx.f_r;
                o.comm_bits = cross_evaluate(a, ctx.sensing_eig, chan, dims).total_bits;
                break;
            case Scheme::ISAC: {
                const double f_c_est =
                    imperfect ? comm_mi_eigen(eig_est.eigenvalues,
                                              waterfill(eig_est.eigenvalues, ctx.budget, dims.noise_var), dims)
                                    .total_bits
                              : out.f_c;
                const WeightedProblem prob = WeightedProblem::from_eigenvalues(
                    lambda, eig_est.eigenvalues, ctx.f_r, f_c_est, cfg.omega_r, ctx.budget, dims);
                a = weighted_allocate(prob);
                o.sensing_bits = sensing_mi_eigen(lambda, a, dims).total_bits;
                o.comm_bits = comm_on_true(a);
                break;
            }
            case Scheme::EA:
                a = equal_allocation(ctx.budget, n);
                o.sensing_bits = sensing_mi_eigen(lambda, a, dims).total_bits;
                o.comm_bits = comm_mi_eigen(mu, a, dims).total_bits;
                break;
            case Scheme::RA:
                a = ra;
                o.sensing_bits = sensing_mi_eigen(lambda, a, dims).total_bits;
                o.comm_bits = comm_on_true(a);
                break;
            }
            o.weighted = weighted(a);
            out.schemes.push_back(o);
        }
        out.ok = true;
    }
    catch (const std::exception &e)
    {
        out.ok = false;
        out.schemes.clear();
        out.error = e.what();
    }
    return out;
}

TrialOutcome run_trial(const ExperimentConfig &config, std::size_t sweep_index, std::size_t trial_index)
{
    return run_trial(prepare_point(config, sweep_index), trial_index);
}

std::size_t resolve_workers(std::size_t requested)
{
    std::size_t n = requested;
    if (n == 0)
        n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char *cap = std::getenv("ISAC_THREADS"))
    {
        char *end = nullptr;
        const unsigned long long v = std::strtoull(cap, &end, 10);
        if (end != cap && *end == '\0' && v > 0)
            n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    }
    return std::max<std::size_t>(n, 1);
}

namespace
{

std::vector<TrialOutcome> run_trials(const PointContext &ctx, std::size_t n_trials, std::size_t n_workers)
{
    std::vector<TrialOutcome> results(n_trials);
    const std::size_t workers = std::min(n_workers, n_trials);
    if (workers <= 1)
    {
        for (std::size_t t = 0; t < n_trials; ++t)
            results[t] = run_trial(ctx, t);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t t = next.fetch_add(1); t < n_trials; t = next.fetch_add(1))
                results[t] = run_trial(ctx, t);
        });
    for (auto &th : pool)
        th.join();
    return results;
}

void check_failures(const std::vector<TrialOutcome> &trials, std::size_t sweep_index)
{
    std::size_t failed = 0;
    const TrialOutcome *first = nullptr;
    for (const auto &t : trials)
        if (!t.ok)
        {
            ++failed;
            if (!first)
                first = &t;
        }
    if (static_cast<double>(failed) > 1e-3 * static_cast<double>(trials.size()))
    {
        std::ostringstream msg;
        msg << "sweep point " << sweep_index << ": " << failed << " of " << trials.size()
            << " trials failed; first failure at trial " << first->trial_index << ": " << first->error;
        throw SolverFailure(msg.str());
    }
}

} // namespace

std::vector<TrialOutcome> run_point_trials(const ExperimentConfig &config, std::size_t sweep_index)
{
    config.validate();
    const PointContext ctx = prepare_point(config, sweep_index);
    auto trials = run_trials(ctx, config.n_trials, resolve_workers(config.n_workers));
    check_failures(trials, sweep_index);
    return trials;
}

SweepResult run_sweep(const ExperimentConfig &config)
{
    config.validate();
    const std::size_t workers = resolve_workers(config.n_workers);
    SweepResult result;
    result.var = config.sweep_var;
    for (std::size_t k = 0; k < config.sweep_values.size(); ++k)
    {
        const PointContext ctx = prepare_point(config, k);
        const auto trials = run_trials(ctx, config.n_trials, workers);
        check_failures(trials, k);
        const SystemDims &dims = ctx.config.dims;
        const double scale = 1.0 / static_cast<double>(dims.n_symbols * dims.n_subcarriers);

        for (std::size_t s = 0; s < config.schemes.size(); ++s)
        {
            std::vector<double> se, sr, wmi;
            for (const auto &t : trials)
            {
                if (!t.ok)
                    continue;
                se.push_back(t.schemes[s].comm_bits * scale);
                sr.push_back(t.schemes[s].sensing_bits * scale);
                wmi.push_back(t.schemes[s].weighted);
            }
            const Moments mse = moments(se), msr = moments(sr), mw = moments(wmi);
            SweepRow row;
            row.sweep_value = config.sweep_values[k];
            row.scheme = config.schemes[s];
            row.spectral_efficiency = mse.mean;
            row.sensing_rate = msr.mean;
            row.weighted_mi = mw.mean;
            row.se_stderr = mse.stderr_;
            row.sr_stderr = msr.stderr_;
            row.wmi_stderr = mw.stderr_;
            result.rows.push_back(row);
        }
        for (const auto &t : trials)
            result.failed_trials += t.ok ? 0 : 1;
    }
    return result;
}

std::vector<TradeoffCurve> tradeoff_curve(const ExperimentConfig &config, std::span<const double> snrs_db)
{
    if (config.sweep_var != SweepVar::omega_r)
        throw InvalidParameter("tradeoff_curve: sweep variable must be omega_r");
    std::vector<TradeoffCurve> curves;
    for (double snr : snrs_db)
    {
        ExperimentConfig c = config;
        c.snr_db = snr;
        c.schemes = {Scheme::ISAC};
        const SweepResult r = run_sweep(c);
        TradeoffCurve curve;
        curve.snr_db = snr;
        for (const auto &row : r.rows)
            curve.points.push_back(
                {row.sweep_value, row.sensing_rate, row.spectral_efficiency, row.sr_stderr, row.se_stderr});
        curves.push_back(std::move(curve));
    }
    return curves;
}

} // namespace isac
