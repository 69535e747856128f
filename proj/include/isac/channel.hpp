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


#ifndef ISAC_CHANNEL_HPP
#define ISAC_CHANNEL_HPP

#include <cstddef>
#include <random>
#include <vector>

#include "isac/linalg.hpp"

namespace isac
{

// Problem dimensions shared by every module.
struct SystemDims
{
    std::size_t n_subcarriers = 32; // N_c
    std::size_t n_tx = 4;           // N_t
    std::size_t n_rx = 4;           // N_r
    std::size_t n_symbols = 10;     // N_x
    std::size_t n_paths_comm = 4;   // L_c + 1
    std::size_t n_paths_sense = 4;  // L_r + 1
    double noise_var = 1.0;         // sigma_n^2, linear

    // Number of eigen-domain modes, N_t * N_c.
    std::size_t n_modes() const { return n_tx * n_subcarriers; }

    // Throws InvalidParameter on zero counts, non-positive noise or a delay
    // spread longer than one OFDM symbol.
    void validate() const;
};

// One resolvable path of a tapped-delay-line channel.
struct Tap
{
    std::size_t delay = 0; // tap index l
    cmat spatial_corr;     // R_l, N_t x N_t Hermitian PSD, unit diagonal
    double power = 0.0;    // sigma_l^2
};

struct TapSet
{
    std::vector<Tap> taps;

    // Taps at delays 0..powers.size()-1 sharing one exponential correlation.
    static TapSet exponential(std::size_t n_tx, double rho, const std::vector<double> &powers);

    double total_power() const;

    // Checks shapes against n_tx, Hermitian PSD unit-diagonal R_l, nonnegative
    // powers and delays < n_subcarriers.
    void validate(std::size_t n_tx, std::size_t n_subcarriers) const;
};

// Time-domain taps and their per-subcarrier frequency response, each N_t x N_r.
struct ChannelRealization
{
    std::vector<cmat> tap_matrices;
    std::vector<std::size_t> tap_delays;
    std::vector<cmat> freq_response;

    // freq_response(p) = sum_l tap(l) exp(-j 2 pi delay_l p / N_c)
    static ChannelRealization from_taps(std::vector<cmat> taps, std::vector<std::size_t> delays,
                                        std::size_t n_subcarriers);

    std::size_t n_subcarriers() const { return freq_response.size(); }
};

// Sigma_G (full, with subcarrier-cross blocks) and its block-diagonal truncation.
struct SensingCorrelation
{
    cmat full;
    cmat blockdiag;
    std::size_t n_subcarriers = 0;
    std::size_t n_tx = 0;

    cmat block(std::size_t p1, std::size_t p2) const;
};

// Entry (i, j) = rho^|i - j|.
cmat make_exponential_correlation(std::size_t n_tx, double rho);

// H_l = sqrt(sigma_l^2) R_l^{1/2} W_l with W_l i.i.d. CN(0, 1), independent across taps.
ChannelRealization draw_taps(const TapSet &tapset, const SystemDims &dims, std::mt19937_64 &rng);

// Analytic E[G G^H] / N_r. Block (p1, p2) = sum_l sigma_l^2 R_l exp(-j 2 pi l (p1 - p2) / N_c).
SensingCorrelation sensing_correlation_matrix(const TapSet &tapset, const SystemDims &dims);

// Copy of `chan` with i.i.d. CN(0, err_var) added to every frequency-domain entry.
ChannelRealization add_estimation_error(const ChannelRealization &chan, double err_var, std::mt19937_64 &rng);

// Fills `m` with i.i.d. CN(0, 1) entries.
void fill_complex_gaussian(cmat &m, std::mt19937_64 &rng);

} // namespace isac

#endif
