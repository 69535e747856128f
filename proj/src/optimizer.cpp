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


#include "isac/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "isac/errors.hpp"

namespace isac
{

namespace
{

constexpr int kMaxBisection = 200;
constexpr double kBudgetTol = 1e-8;

// Stationarity right-hand side eps nu / (1 + nu x) + eta phi / (1 + phi x).
double marginal_gain(double x, double nu, double phi, double eps, double eta)
{
    return eps * nu / (1.0 + nu * x) + eta * phi / (1.0 + phi * x);
}

void check_budget(double budget, const char *who)
{
    if (!(budget > 0.0) || !std::isfinite(budget))
        throw InvalidParameter(std::string(who) + ": budget must be positive and finite");
}

// Columns of `basis` with positive power, each scaled by sqrt(power).
cmat scaled_active_columns(const PowerAllocation &alloc, const Eigenstructure &basis)
{
    if (alloc.powers.size() != basis.size() || basis.basis.cols() != Eigen::Index(basis.size()))
        throw InvalidInput("cross_evaluate: allocation and basis sizes differ");
    std::vector<Eigen::Index> active;
    for (std::size_t i = 0; i < alloc.powers.size(); ++i)
    {
        if (!(alloc.powers[i] >= 0.0) || !std::isfinite(alloc.powers[i]))
            throw InvalidInput("cross_evaluate: negative or non-finite power");
        if (alloc.powers[i] > 0.0)
            active.push_back(Eigen::Index(i));
    }
    cmat b(basis.basis.rows(), Eigen::Index(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k)
        b.col(Eigen::Index(k)) = basis.basis.col(active[k]) * std::sqrt(alloc.powers[std::size_t(active[k])]);
    return b;
}

double log2det_identity_plus(const cmat &gram, double noise_var)
{
    cmat m = gram / noise_var;
    m = 0.5 * (m + m.adjoint());
    m.diagonal().array() += 1.0;
    return log2det_hpd(m);
}

} // namespace

WeightedProblem WeightedProblem::from_eigenvalues(std::span<const double> eigs_sensing,
                                                  std::span<const double> eigs_comm, double f_r, double f_c,
                                                  double omega_r, double budget, const SystemDims &dims)
{
    if (eigs_sensing.size() != eigs_comm.size())
        throw InvalidInput("WeightedProblem: sensing and communication mode counts differ");
    if (!(f_r > 0.0) || !(f_c > 0.0))
        throw InvalidInput("WeightedProblem: normalizers F_r and F_c must be positive");
    if (!(omega_r >= 0.0 && omega_r <= 1.0))
        throw InvalidParameter("WeightedProblem: omega_r must lie in [0, 1]");

    WeightedProblem p;
    p.nu.resize(eigs_sensing.size());
    p.phi.resize(eigs_comm.size());
    for (std::size_t i = 0; i < eigs_sensing.size(); ++i)
    {
        p.nu[i] = std::max(eigs_sensing[i], 0.0) / dims.noise_var;
        p.phi[i] = std::max(eigs_comm[i], 0.0) / dims.noise_var;
    }
    p.eps = omega_r * static_cast<double>(dims.n_rx) / (f_r * std::numbers::ln2);
    p.eta = (1.0 - omega_r) * static_cast<double>(dims.n_symbols) / (f_c * std::numbers::ln2);
    p.budget = budget;
    return p;
}

void WeightedProblem::validate() const
{
    if (nu.size() != phi.size() || nu.empty())
        throw InvalidInput("WeightedProblem: nu and phi must be nonempty and equally long");
    for (std::size_t i = 0; i < nu.size(); ++i)
        if (!(nu[i] >= 0.0) || !(phi[i] >= 0.0) || !std::isfinite(nu[i]) || !std::isfinite(phi[i]))
            throw InvalidInput("WeightedProblem: nu and phi must be finite and nonnegative");
    if (!(eps >= 0.0) || !(eta >= 0.0) || !(eps + eta > 0.0))
        throw InvalidInput("WeightedProblem: eps, eta must be nonnegative with positive sum");
    check_budget(budget, "WeightedProblem");
}

double WeightedProblem::objective(std::span<const double> powers) const
{
    std::vector<double> terms(powers.size());
    for (std::size_t i = 0; i < powers.size(); ++i)
        terms[i] = eps * std::log1p(nu[i] * powers[i]) + eta * std::log1p(phi[i] * powers[i]);
    return pairwise_sum(terms.data(), terms.size());
}

cmat dft_block(std::size_t /*subcarrier*/, std::size_t n_symbols, std::size_t n_tx)
{
    cmat phi(static_cast<Eigen::Index>(n_symbols), static_cast<Eigen::Index>(n_tx));
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_symbols));
    for (std::size_t m = 0; m < n_symbols; ++m)
        for (std::size_t k = 0; k < n_tx; ++k)
        {
            const std::size_t e = (m * k) % n_symbols;
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(n_symbols);
            phi(Eigen::Index(m), Eigen::Index(k)) = norm * cplx(std::cos(angle), std::sin(angle));
        }
    return phi;
}

Eigenstructure eig_sensing(const cmat &corr)
{
    HermitianEig e = hermitian_eig(corr);
    return Eigenstructure{std::move(e.vectors), std::move(e.values)};
}

Eigenstructure eig_sensing(const SensingCorrelation &corr)
{
    return eig_sensing(corr.full);
}

Eigenstructure eig_comm(const ChannelRealization &chan, const SystemDims &dims)
{
    if (chan.n_subcarriers() != dims.n_subcarriers)
        throw InvalidInput("eig_comm: channel has " + std::to_string(chan.n_subcarriers()) +
                           " subcarriers, expected " + std::to_string(dims.n_subcarriers));
    const auto nt = Eigen::Index(dims.n_tx);
    const auto n = Eigen::Index(dims.n_modes());

    cmat unsorted = cmat::Zero(n, n);
    std::vector<double> values;
    values.reserve(std::size_t(n));
    for (std::size_t p = 0; p < dims.n_subcarriers; ++p)
    {
        const cmat &h = chan.freq_response[p];
        if (h.rows() != nt || h.cols() != Eigen::Index(dims.n_rx))
            throw InvalidInput("eig_comm: channel response has wrong shape");
        const HermitianEig e = hermitian_eig(h * h.adjoint());
        unsorted.block(Eigen::Index(p) * nt, Eigen::Index(p) * nt, nt, nt) = e.vectors;
        values.insert(values.end(), e.values.begin(), e.values.end());
    }

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

    Eigenstructure out;
    out.basis.resize(n, n);
    out.eigenvalues.resize(values.size());
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        out.basis.col(Eigen::Index(k)) = unsorted.col(Eigen::Index(order[k]));
        out.eigenvalues[k] = values[order[k]];
    }
    return out;
}

PowerAllocation waterfill(std::span<const double> eigenvalues, double budget, double noise_var)
{
    check_budget(budget, "waterfill");
    if (!(noise_var > 0.0))
        throw InvalidParameter("waterfill: noise variance must be positive");

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    {
        if (!(eigenvalues[i] >= 0.0) || !std::isfinite(eigenvalues[i]))
            throw InvalidInput("waterfill: eigenvalues must be finite and nonnegative");
        if (eigenvalues[i] > 0.0)
            order.push_back(i);
    }
    if (order.empty())
        throw NoFeasibleGain("waterfill: every eigenvalue is zero");
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });

    // Inverse gains ascend along `order`; the active set is the longest prefix
    // whose common level stays above its last inverse gain.
    double inv_sum = 0.0;
    double level = 0.0;
    std::size_t active = 0;
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        const double inv = noise_var / eigenvalues[order[k]];
        const double candidate = (budget + inv_sum + inv) / static_cast<double>(k + 1);
        if (candidate <= inv)
            break;
        inv_sum += inv;
        level = candidate;
        active = k + 1;
    }

    PowerAllocation out;
    out.powers.assign(eigenvalues.size(), 0.0);
    for (std::size_t k = 0; k < active; ++k)
    {
        const std::size_t i = order[k];
        out.powers[i] = std::max(level - noise_var / eigenvalues[i], 0.0);
    }
    out.budget = budget;
    out.multiplier = -1.0 / (level * std::numbers::ln2);
    return out;
}

double weighted_mode_power(double gamma, double nu, double phi, double eps, double eta)
{
    const double f0 = eps * nu + eta * phi;
    if (!(f0 > gamma))
        return 0.0;
    // gamma (1 + nu x)(1 + phi x) = eps nu (1 + phi x) + eta phi (1 + nu x), scaled
    // by nu phi so that zero gains do not produce infinite coefficients.
    const double a = gamma * nu * phi;
    const double b = gamma * (nu + phi) - (eps + eta) * nu * phi;
    const double c = gamma - f0; // < 0
    const double disc = std::sqrt(std::max(b * b - 4.0 * a * c, 0.0));
    if (b >= 0.0)
        return (2.0 * c) / -(b + disc);
    return (disc - b) / (2.0 * a);
}

double weighted_mode_power_discriminant(double gamma, double nu, double phi, double eps, double eta)
{
    const double inv_nu = 1.0 / nu;
    const double inv_phi = 1.0 / phi;
    const double skew = (inv_nu - inv_phi) + (eta - eps) / gamma;
    const double root = std::sqrt(skew * skew + 4.0 * eps * eta / (gamma * gamma));
    const double x = 0.5 * ((eps + eta) / gamma - (inv_nu + inv_phi) + root);
    return std::max(x, 0.0);
}

PowerAllocation weighted_allocate(const WeightedProblem &prob)
{
    prob.validate();
    const std::size_t n = prob.nu.size();
    const double budget = prob.budget;

    auto allocate = [&](double gamma, std::vector<double> &powers) {
        for (std::size_t i = 0; i < n; ++i)
            powers[i] = weighted_mode_power(gamma, prob.nu[i], prob.phi[i], prob.eps, prob.eta);
        return pairwise_sum(powers.data(), n);
    };

    // gamma_hi: no mode is active. gamma_lo: the mode attaining the minimum
    // below would take the whole budget on its own, so the total is >= E.
    double gamma_hi = 0.0;
    double gamma_lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
    {
        const double f0 = marginal_gain(0.0, prob.nu[i], prob.phi[i], prob.eps, prob.eta);
        if (f0 <= 0.0)
            continue;
        gamma_hi = std::max(gamma_hi, f0);
        gamma_lo = std::min(gamma_lo, marginal_gain(budget, prob.nu[i], prob.phi[i], prob.eps, prob.eta));
    }
    if (gamma_hi <= 0.0)
        throw NoFeasibleGain("weighted_allocate: every mode has zero sensing and communication gain");

    std::vector<double> powers(n, 0.0);
    int expansions = 0;
    while (allocate(gamma_lo, powers) < budget)
    {
        if (++expansions > 64)
        {
            std::ostringstream msg;
            msg << "weighted_allocate: failed to bracket the multiplier (gamma_lo=" << gamma_lo
                << ", gamma_hi=" << gamma_hi << ", budget=" << budget << ", modes=" << n << ")";
            throw SolverFailure(msg.str());
        }
        gamma_lo *= 0.5;
    }

    // Geometric bisection until the bracket can no longer shrink.
    int iter = 0;
    for (; iter < kMaxBisection; ++iter)
    {
        const double mid = std::sqrt(gamma_lo * gamma_hi);
        if (!(mid > gamma_lo && mid < gamma_hi))
            break;
        if (allocate(mid, powers) > budget)
            gamma_lo = mid;
        else
            gamma_hi = mid;
    }
    std::vector<double> powers_hi(n, 0.0);
    const double total_lo = allocate(gamma_lo, powers);
    const double total_hi = allocate(gamma_hi, powers_hi);
    double gamma = gamma_lo;
    double total = total_lo;
    if (std::abs(total_hi - budget) < std::abs(total_lo - budget))
    {
        gamma = gamma_hi;
        total = total_hi;
        powers.swap(powers_hi);
    }
    if (std::abs(total - budget) > kBudgetTol * budget)
    {
        std::ostringstream msg;
        msg.precision(17);
        msg << "weighted_allocate: bisection ended with sum " << total << " for budget " << budget
            << " after " << iter << " iterations (gamma=" << gamma << ", eps=" << prob.eps << ", eta=" << prob.eta
            << ")";
        throw SolverFailure(msg.str());
    }

    PowerAllocation out;
    out.powers = std::move(powers);
    out.budget = budget;
    out.multiplier = gamma;
    out.scheme = Scheme::ISAC;
    return out;
}

KktReport kkt_check(const WeightedProblem &prob, const PowerAllocation &alloc)
{
    if (alloc.powers.size() != prob.nu.size())
        throw InvalidInput("kkt_check: allocation size differs from problem size");
    KktReport r;
    const double gamma = alloc.multiplier;
    r.budget_error = std::abs(alloc.total() - prob.budget) / prob.budget;
    r.min_power = *std::min_element(alloc.powers.begin(), alloc.powers.end());
    for (std::size_t i = 0; i < alloc.powers.size(); ++i)
    {
        const double x = alloc.powers[i];
        if (x > 0.0)
        {
            const double g = marginal_gain(x, prob.nu[i], prob.phi[i], prob.eps, prob.eta);
            r.max_stationarity = std::max(r.max_stationarity, std::abs(gamma - g) / gamma);
        }
        else
        {
            const double g0 = marginal_gain(0.0, prob.nu[i], prob.phi[i], prob.eps, prob.eta);
            r.max_slackness_violation = std::max(r.max_slackness_violation, std::max(g0 - gamma, 0.0) / gamma);
        }
    }
    return r;
}

WaveformSpec reconstruct_waveform(const PowerAllocation &alloc, const Eigenstructure &basis, const SystemDims &dims,
                                  const BlockBuilder &block_builder)
{
    if (dims.n_symbols < dims.n_tx)
        throw InfeasibleShape("reconstruct_waveform: need n_symbols >= n_tx for orthonormal columns (got " +
                              std::to_string(dims.n_symbols) + " < " + std::to_string(dims.n_tx) + ")");
    const std::size_t n = dims.n_modes();
    if (alloc.powers.size() != n || basis.size() != n || basis.basis.rows() != Eigen::Index(n))
        throw InvalidInput("reconstruct_waveform: allocation/basis size must equal N_t N_c");

    std::vector<cmat> blocks;
    blocks.reserve(dims.n_subcarriers);
    const cmat eye = cmat::Identity(Eigen::Index(dims.n_tx), Eigen::Index(dims.n_tx));
    for (std::size_t p = 0; p < dims.n_subcarriers; ++p)
    {
        cmat b = block_builder(p, dims.n_symbols, dims.n_tx);
        if (b.rows() != Eigen::Index(dims.n_symbols) || b.cols() != Eigen::Index(dims.n_tx))
            throw InvalidInput("reconstruct_waveform: block builder returned the wrong shape");
        if ((b.adjoint() * b - eye).norm() > 1e-10 * std::sqrt(static_cast<double>(dims.n_tx)))
            throw InvalidInput("reconstruct_waveform: block builder columns are not orthonormal");
        blocks.push_back(std::move(b));
    }

    Eigen::VectorXd root(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!(alloc.powers[i] >= 0.0))
            throw InvalidInput("reconstruct_waveform: negative power");
        root(Eigen::Index(i)) = std::sqrt(alloc.powers[i]);
    }

    WaveformSpec out;
    out.orthonormal_block = block_diagonal(blocks);
    out.transmit = out.orthonormal_block * root.asDiagonal() * basis.basis.adjoint();
    out.source = alloc;
    return out;
}

MIResult cross_evaluate(const PowerAllocation &alloc, const Eigenstructure &own_basis,
                        const ChannelRealization &chan, const SystemDims &dims)
{
    if (chan.n_subcarriers() != dims.n_subcarriers || own_basis.size() != dims.n_modes())
        throw InvalidInput("cross_evaluate: channel or basis does not match dimensions");
    const cmat b = scaled_active_columns(alloc, own_basis);
    const auto nt = Eigen::Index(dims.n_tx);

    // (H_bd H_bd^H) B, one N_t row block per subcarrier.
    cmat hb(b.rows(), b.cols());
    for (std::size_t p = 0; p < dims.n_subcarriers; ++p)
    {
        const cmat &h = chan.freq_response[p];
        hb.middleRows(Eigen::Index(p) * nt, nt) = (h * h.adjoint()) * b.middleRows(Eigen::Index(p) * nt, nt);
    }
    MIResult out;
    out.total_bits = static_cast<double>(dims.n_symbols) * log2det_identity_plus(b.adjoint() * hb, dims.noise_var);
    out.kind = MiKind::communication;
    return out;
}

MIResult cross_evaluate(const PowerAllocation &alloc, const Eigenstructure &own_basis, const cmat &sensing_corr,
                        const SystemDims &dims)
{
    const auto n = Eigen::Index(dims.n_modes());
    if (sensing_corr.rows() != n || sensing_corr.cols() != n || own_basis.size() != dims.n_modes())
        throw InvalidInput("cross_evaluate: sensing correlation or basis does not match dimensions");
    const cmat b = scaled_active_columns(alloc, own_basis);
    MIResult out;
    out.total_bits =
        static_cast<double>(dims.n_rx) * log2det_identity_plus(b.adjoint() * (sensing_corr * b), dims.noise_var);
    out.kind = MiKind::sensing;
    return out;
}

MIResult cross_evaluate(const PowerAllocation &alloc, const Eigenstructure &own_basis,
                        const SensingCorrelation &corr, const SystemDims &dims)
{
    return cross_evaluate(alloc, own_basis, corr.full, dims);
}

PowerAllocation equal_allocation(double budget, std::size_t n_modes)
{
    check_budget(budget, "equal_allocation");
    if (n_modes == 0)
        throw InvalidParameter("equal_allocation: n_modes must be >= 1");
    PowerAllocation out;
    out.powers.assign(n_modes, budget / static_cast<double>(n_modes));
    out.budget = budget;
    out.scheme = Scheme::EA;
    return out;
}

PowerAllocation random_allocation(double budget, std::size_t n_modes, std::mt19937_64 &rng)
{
    check_budget(budget, "random_allocation");
    if (n_modes == 0)
        throw InvalidParameter("random_allocation: n_modes must be >= 1");
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> draws(n_modes);
    for (auto &d : draws)
        d = expo(rng);
    const double sum = pairwise_sum(draws.data(), n_modes);
    PowerAllocation out;
    out.powers.resize(n_modes);
    for (std::size_t i = 0; i < n_modes; ++i)
        out.powers[i] = budget * (draws[i] / sum);
    out.budget = budget;
    out.scheme = Scheme::RA;
    return out;
}

} // namespace isac
