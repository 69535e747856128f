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


#include "isac/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "isac/errors.hpp"

namespace isac
{

namespace
{

cplx subcarrier_phase(std::size_t delay, long long dp, std::size_t n_subcarriers)
{
    // Reduce the exponent modulo N_c so large products keep full precision.
    const long long nc = static_cast<long long>(n_subcarriers);
    long long k = (static_cast<long long>(delay) * dp) % nc;
    if (k < 0)
        k += nc;
    // Symmetric range keeps phase(-dp) the exact conjugate of phase(dp).
    if (2 * k > nc)
        k -= nc;
    if (2 * k == nc)
        return {-1.0, 0.0};
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nc);
    return {std::cos(angle), std::sin(angle)};
}

} // namespace

void SystemDims::validate() const
{
    if (n_subcarriers == 0 || n_tx == 0 || n_rx == 0 || n_symbols == 0 || n_paths_comm == 0 || n_paths_sense == 0)
        throw InvalidParameter("SystemDims: all counts must be >= 1");
    if (!(noise_var > 0.0) || !std::isfinite(noise_var))
        throw InvalidParameter("SystemDims: noise_var must be positive");
    if (n_paths_comm > n_subcarriers || n_paths_sense > n_subcarriers)
        throw InvalidParameter("SystemDims: number of paths exceeds number of subcarriers");
}

TapSet TapSet::exponential(std::size_t n_tx, double rho, const std::vector<double> &powers)
{
    const cmat r = make_exponential_correlation(n_tx, rho);
    TapSet ts;
    ts.taps.reserve(powers.size());
    for (std::size_t l = 0; l < powers.size(); ++l)
        ts.taps.push_back(Tap{l, r, powers[l]});
    return ts;
}

double TapSet::total_power() const
{
    double s = 0.0;
    for (const auto &t : taps)
        s += t.power;
    return s;
}

void TapSet::validate(std::size_t n_tx, std::size_t n_subcarriers) const
{
    if (taps.empty())
        throw InvalidParameter("TapSet: no taps");
    for (const auto &t : taps)
    {
        if (t.spatial_corr.rows() != Eigen::Index(n_tx) || t.spatial_corr.cols() != Eigen::Index(n_tx))
            throw InvalidInput("TapSet: spatial correlation must be " + std::to_string(n_tx) + "x" +
                               std::to_string(n_tx));
        if (!(t.power >= 0.0) || !std::isfinite(t.power))
            throw InvalidParameter("TapSet: tap power must be nonnegative");
        if (t.delay >= n_subcarriers)
            throw InvalidParameter("TapSet: tap delay " + std::to_string(t.delay) +
                                   " not below number of subcarriers");
        for (std::size_t i = 0; i < n_tx; ++i)
        {
            const cplx d = t.spatial_corr(Eigen::Index(i), Eigen::Index(i));
            if (std::abs(d - cplx(1.0, 0.0)) > 1e-12)
                throw InvalidInput("TapSet: spatial correlation must have unit diagonal");
        }
        // Throws on non-Hermitian or indefinite R_l.
        (void)hermitian_eig(t.spatial_corr, 1e-10, 1e-12);
    }
}

ChannelRealization ChannelRealization::from_taps(std::vector<cmat> taps, std::vector<std::size_t> delays,
                                                 std::size_t n_subcarriers)
{
    if (taps.size() != delays.size())
        throw InvalidInput("ChannelRealization: tap and delay counts differ");
    if (taps.empty())
        throw InvalidInput("ChannelRealization: no taps");

    ChannelRealization out;
    out.freq_response.assign(n_subcarriers, cmat::Zero(taps[0].rows(), taps[0].cols()));
    for (std::size_t p = 0; p < n_subcarriers; ++p)
        for (std::size_t l = 0; l < taps.size(); ++l)
            out.freq_response[p] += taps[l] * subcarrier_phase(delays[l], static_cast<long long>(p), n_subcarriers);
    out.tap_matrices = std::move(taps);
    out.tap_delays = std::move(delays);
    return out;
}

cmat SensingCorrelation::block(std::size_t p1, std::size_t p2) const
{
    const auto nt = Eigen::Index(n_tx);
    return full.block(Eigen::Index(p1) * nt, Eigen::Index(p2) * nt, nt, nt);
}

cmat make_exponential_correlation(std::size_t n_tx, double rho)
{
    if (!(rho >= 0.0 && rho < 1.0))
        throw InvalidParameter("make_exponential_correlation: rho must lie in [0, 1), got " + std::to_string(rho));
    if (n_tx == 0)
        throw InvalidParameter("make_exponential_correlation: n_tx must be >= 1");
    cmat r(static_cast<Eigen::Index>(n_tx), static_cast<Eigen::Index>(n_tx));
    for (std::size_t i = 0; i < n_tx; ++i)
        for (std::size_t j = 0; j < n_tx; ++j)
        {
            const auto gap = static_cast<double>(i > j ? i - j : j - i);
            r(Eigen::Index(i), Eigen::Index(j)) = (gap == 0.0) ? 1.0 : std::pow(rho, gap);
        }
    return r;
}

void fill_complex_gaussian(cmat &m, std::mt19937_64 &rng)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
        {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = cplx(re, im);
        }
}

ChannelRealization draw_taps(const TapSet &tapset, const SystemDims &dims, std::mt19937_64 &rng)
{
    std::vector<cmat> taps;
    std::vector<std::size_t> delays;
    taps.reserve(tapset.taps.size());
    for (const auto &tap : tapset.taps)
    {
        if (tap.spatial_corr.rows() != Eigen::Index(dims.n_tx))
            throw InvalidInput("draw_taps: tap correlation does not match n_tx");
        cmat root;
        try
        {
            root = psd_sqrt(tap.spatial_corr);
        }
        catch (const InvalidInput &e)
        {
            throw InvalidInput(std::string("draw_taps: spatial correlation has no square root: ") + e.what());
        }
        cmat w(static_cast<Eigen::Index>(dims.n_tx), static_cast<Eigen::Index>(dims.n_rx));
        fill_complex_gaussian(w, rng);
        taps.push_back(std::sqrt(tap.power) * root * w);
        delays.push_back(tap.delay);
    }
    return ChannelRealization::from_taps(std::move(taps), std::move(delays), dims.n_subcarriers);
}

SensingCorrelation sensing_correlation_matrix(const TapSet &tapset, const SystemDims &dims)
{
    tapset.validate(dims.n_tx, dims.n_subcarriers);

    const std::size_t nc = dims.n_subcarriers;
    const auto nt = Eigen::Index(dims.n_tx);
    const Eigen::Index n = Eigen::Index(nc) * nt;

    SensingCorrelation out;
    out.n_subcarriers = nc;
    out.n_tx = dims.n_tx;
    out.full = cmat::Zero(n, n);

    // Blocks depend only on p1 - p2, so build one block per offset.
    std::vector<cmat> by_offset(2 * nc - 1, cmat::Zero(nt, nt));
    for (std::size_t k = 0; k < by_offset.size(); ++k)
    {
        const long long dp = static_cast<long long>(k) - static_cast<long long>(nc - 1);
        for (const auto &tap : tapset.taps)
            by_offset[k] += tap.power * tap.spatial_corr * subcarrier_phase(tap.delay, dp, nc);
    }
    for (std::size_t p1 = 0; p1 < nc; ++p1)
        for (std::size_t p2 = 0; p2 < nc; ++p2)
        {
            const std::size_t k = p1 + (nc - 1) - p2;
            out.full.block(Eigen::Index(p1) * nt, Eigen::Index(p2) * nt, nt, nt) = by_offset[k];
        }

    out.blockdiag = cmat::Zero(n, n);
    for (std::size_t p = 0; p < nc; ++p)
        out.blockdiag.block(Eigen::Index(p) * nt, Eigen::Index(p) * nt, nt, nt) = by_offset[nc - 1];
    return out;
}

ChannelRealization add_estimation_error(const ChannelRealization &chan, double err_var, std::mt19937_64 &rng)
{
    if (!(err_var >= 0.0) || !std::isfinite(err_var))
        throw InvalidParameter("add_estimation_error: err_var must be nonnegative");
    ChannelRealization out = chan;
    if (err_var == 0.0)
        return out;
    const double scale = std::sqrt(err_var);
    for (auto &h : out.freq_response)
    {
        cmat e(h.rows(), h.cols());
        fill_complex_gaussian(e, rng);
        h += scale * e;
    }
    return out;
}

} // namespace isac
