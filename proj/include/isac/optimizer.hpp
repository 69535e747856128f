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


#ifndef ISAC_OPTIMIZER_HPP
#define ISAC_OPTIMIZER_HPP

#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "isac/allocation.hpp"
#include "isac/channel.hpp"
#include "isac/linalg.hpp"
#include "isac/mi.hpp"

namespace isac
{

// Unitary basis and descending nonnegative eigenvalues (U_G, Lambda_G or U_H, Lambda_H).
struct Eigenstructure
{
    cmat basis;
    std::vector<double> eigenvalues;

    std::size_t size() const { return eigenvalues.size(); }
};

// Weighted-sum problem in the eigen domain:
//   max sum_i eps ln(1 + nu_i xi_i) + eta ln(1 + phi_i xi_i)   s.t.  sum xi_i = E, xi_i >= 0
// with nu_i = lambda_ii / sigma^2, phi_i = mu_ii / sigma^2,
// eps = omega_r N_r / (F_r ln 2), eta = (1 - omega_r) N_x / (F_c ln 2).
struct WeightedProblem
{
    std::vector<double> nu;
    std::vector<double> phi;
    double eps = 0.0;
    double eta = 0.0;
    double budget = 0.0;

    static WeightedProblem from_eigenvalues(std::span<const double> eigs_sensing, std::span<const double> eigs_comm,
                                            double f_r, double f_c, double omega_r, double budget,
                                            const SystemDims &dims);

    void validate() const;

    // Objective value in nats-scaled units (the Lagrangian's objective).
    double objective(std::span<const double> powers) const;
};

// Result of checking an allocation against the KKT system of a WeightedProblem.
struct KktReport
{
    double budget_error = 0.0;           // |sum xi - E| / E
    double min_power = 0.0;              // most negative power (>= 0 when feasible)
    double max_stationarity = 0.0;       // max over xi_i > 0 of |gamma - f_i(xi_i)| / gamma
    double max_slackness_violation = 0.0; // max over xi_i = 0 of (f_i(0) - gamma)^+ / gamma
};

struct WaveformSpec
{
    cmat transmit;          // X, N_c N_x x N_c N_t
    PowerAllocation source;
    cmat orthonormal_block; // Phi = diag{Phi(p)}, N_c N_x x N_c N_t
};

// Supplies Phi(p): an N_x x N_t matrix with orthonormal columns for subcarrier p.
using BlockBuilder = std::function<cmat(std::size_t subcarrier, std::size_t n_symbols, std::size_t n_tx)>;

// First n_tx columns of the unitary N_x-point DFT matrix.
cmat dft_block(std::size_t subcarrier, std::size_t n_symbols, std::size_t n_tx);

Eigenstructure eig_sensing(const cmat &corr);
Eigenstructure eig_sensing(const SensingCorrelation &corr);

// Per-subcarrier eigen-decomposition of H(p) H(p)^H assembled into a
// block-diagonal basis; modes are then sorted globally in descending order.
Eigenstructure eig_comm(const ChannelRealization &chan, const SystemDims &dims);

// powers_i = (w - sigma^2 / lambda_i)^+ with sum = E. multiplier = -1 / (w ln 2).
PowerAllocation waterfill(std::span<const double> eigenvalues, double budget, double noise_var);

inline double water_level(const PowerAllocation &alloc)
{
    return -1.0 / (alloc.multiplier * std::numbers::ln2);
}

// Power of one mode at multiplier gamma: the nonnegative root of
// eps nu / (1 + nu x) + eta phi / (1 + phi x) = gamma, or 0 when no root exists.
double weighted_mode_power(double gamma, double nu, double phi, double eps, double eta);

// The same root written in the symmetric discriminant form
// 1/2 [ (eps + eta)/gamma - (1/nu + 1/phi) + sqrt(((1/nu - 1/phi) + (eta - eps)/gamma)^2 + 4 eps eta / gamma^2) ]^+
// Only defined for nu, phi > 0. Kept for cross-checking.
double weighted_mode_power_discriminant(double gamma, double nu, double phi, double eps, double eta);

// Solves the weighted problem by bisection on the multiplier gamma.
PowerAllocation weighted_allocate(const WeightedProblem &prob);

KktReport kkt_check(const WeightedProblem &prob, const PowerAllocation &alloc);

// X = Phi diag(sqrt(powers)) U^H, so X^H X = U diag(powers) U^H.
WaveformSpec reconstruct_waveform(const PowerAllocation &alloc, const Eigenstructure &basis, const SystemDims &dims,
                                  const BlockBuilder &block_builder = dft_block);

// Communication MI of the covariance U diag(powers) U^H on a channel realization.
MIResult cross_evaluate(const PowerAllocation &alloc, const Eigenstructure &own_basis,
                        const ChannelRealization &chan, const SystemDims &dims);

// Sensing MI of the transmit Gram U diag(powers) U^H against a sensing correlation.
MIResult cross_evaluate(const PowerAllocation &alloc, const Eigenstructure &own_basis, const cmat &sensing_corr,
                        const SystemDims &dims);
MIResult cross_evaluate(const PowerAllocation &alloc, const Eigenstructure &own_basis,
                        const SensingCorrelation &corr, const SystemDims &dims);

PowerAllocation equal_allocation(double budget, std::size_t n_modes);

// Uniform on the scaled simplex via normalized exponential draws.
PowerAllocation random_allocation(double budget, std::size_t n_modes, std::mt19937_64 &rng);

} // namespace isac

#endif
