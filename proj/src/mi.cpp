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


#include "isac/mi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isac/errors.hpp"

namespace isac
{

std::string_view to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::OPC:
        return "OPC";
    case Scheme::OPS:
        return "OPS";
    case Scheme::ISAC:
        return "ISAC";
    case Scheme::EA:
        return "EA";
    case Scheme::RA:
        return "RA";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name)
{
    for (Scheme s : kAllSchemes)
        if (to_string(s) == name)
            return s;
    return std::nullopt;
}

double PowerAllocation::total() const
{
    return pairwise_sum(powers.data(), powers.size());
}

namespace
{

constexpr double kNegativeEigTol = 1e-10;

void check_square(const cmat &m, Eigen::Index n, const char *what)
{
    if (m.rows() != n || m.cols() != n)
        throw InvalidInput(std::string(what) + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                           ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

// Eigen-domain log-sum shared by the sensing and communication forms.
MIResult eigen_form(std::span<const double> eigs, std::span<const double> powers, double prefactor,
                    double noise_var, MiKind kind)
{
    if (eigs.size() != powers.size())
        throw InvalidInput("eigen-form MI: " + std::to_string(eigs.size()) + " eigenvalues but " +
                           std::to_string(powers.size()) + " powers");
    double scale = 0.0;
    for (double e : eigs)
    {
        if (!std::isfinite(e))
            throw InvalidInput("eigen-form MI: non-finite eigenvalue");
        scale = std::max(scale, std::abs(e));
    }

    std::vector<double> per_mode(eigs.size());
    for (std::size_t i = 0; i < eigs.size(); ++i)
    {
        double lambda = eigs[i];
        if (lambda < 0.0)
        {
            if (-lambda > kNegativeEigTol * scale)
                throw InvalidInput("eigen-form MI: negative eigenvalue " + std::to_string(lambda));
            lambda = 0.0;
        }
        if (!(powers[i] >= 0.0) || !std::isfinite(powers[i]))
            throw InvalidInput("eigen-form MI: negative or non-finite power at mode " + std::to_string(i));
        per_mode[i] = prefactor * std::log1p(lambda * powers[i] / noise_var) / std::log(2.0);
    }
    MIResult out;
    out.total_bits = pairwise_sum(per_mode.data(), per_mode.size());
    out.per_mode_bits = std::move(per_mode);
    out.kind = kind;
    return out;
}

} // namespace

MIResult sensing_mi_general(const cmat &x, const cmat &sigma, const SystemDims &dims)
{
    const auto rows = Eigen::Index(dims.n_subcarriers * dims.n_symbols);
    const auto cols = Eigen::Index(dims.n_modes());
    if (x.rows() != rows || x.cols() != cols)
        throw InvalidInput("sensing_mi_general: transmit matrix must be " + std::to_string(rows) + "x" +
                           std::to_string(cols));
    check_square(sigma, cols, "sensing_mi_general: correlation");
    if (!all_finite(x) || !all_finite(sigma))
        throw InvalidInput("sensing_mi_general: non-finite entries");

    cmat m = x * sigma * x.adjoint() / dims.noise_var;
    m = 0.5 * (m + m.adjoint());
    m.diagonal().array() += 1.0;
    MIResult out;
    out.total_bits = static_cast<double>(dims.n_rx) * log2det_hpd(m);
    out.kind = MiKind::sensing;
    return out;
}

MIResult sensing_mi_general(const cmat &x, const SensingCorrelation &corr, const SystemDims &dims)
{
    return sensing_mi_general(x, corr.full, dims);
}

MIResult sensing_mi_uncorrelated(const cmat &x, const SystemDims &dims)
{
    const auto n = Eigen::Index(dims.n_modes());
    return sensing_mi_general(x, cmat::Identity(n, n), dims);
}

MIResult comm_mi_general(const std::vector<cmat> &per_subcarrier_cov, const ChannelRealization &chan,
                         const SystemDims &dims)
{
    if (per_subcarrier_cov.size() != dims.n_subcarriers || chan.n_subcarriers() != dims.n_subcarriers)
        throw InvalidInput("comm_mi_general: expected " + std::to_string(dims.n_subcarriers) + " subcarriers");

    const auto nt = Eigen::Index(dims.n_tx);
    const auto nr = Eigen::Index(dims.n_rx);
    std::vector<double> per_sc(dims.n_subcarriers);
    for (std::size_t p = 0; p < dims.n_subcarriers; ++p)
    {
        const cmat &cov = per_subcarrier_cov[p];
        const cmat &h = chan.freq_response[p];
        check_square(cov, nt, "comm_mi_general: covariance");
        if (h.rows() != nt || h.cols() != nr)
            throw InvalidInput("comm_mi_general: channel response has wrong shape");
        try
        {
            (void)hermitian_eig(cov, 1e-10, kNegativeEigTol);
        }
        catch (const InvalidInput &e)
        {
            throw InvalidInput("comm_mi_general: covariance on subcarrier " + std::to_string(p) +
                               " is not Hermitian PSD (" + e.what() + ")");
        }
        cmat m = h.adjoint() * cov * h / dims.noise_var;
        m = 0.5 * (m + m.adjoint());
        m.diagonal().array() += 1.0;
        per_sc[p] = log2det_hpd(m);
    }
    MIResult out;
    out.total_bits = static_cast<double>(dims.n_symbols) * pairwise_sum(per_sc.data(), per_sc.size());
    out.kind = MiKind::communication;
    return out;
}

MIResult comm_mi_full(const cmat &cov, const ChannelRealization &chan, const SystemDims &dims)
{
    if (chan.n_subcarriers() != dims.n_subcarriers)
        throw InvalidInput("comm_mi_full: channel has wrong number of subcarriers");
    check_square(cov, Eigen::Index(dims.n_modes()), "comm_mi_full: covariance");
    try
    {
        (void)hermitian_eig(cov, 1e-10, kNegativeEigTol);
    }
    catch (const InvalidInput &e)
    {
        throw InvalidInput(std::string("comm_mi_full: covariance is not Hermitian PSD (") + e.what() + ")");
    }
    const cmat h = block_diagonal(chan.freq_response);
    cmat m = h.adjoint() * cov * h / dims.noise_var;
    m = 0.5 * (m + m.adjoint());
    m.diagonal().array() += 1.0;
    MIResult out;
    out.total_bits = static_cast<double>(dims.n_symbols) * log2det_hpd(m);
    out.kind = MiKind::communication;
    return out;
}

MIResult sensing_mi_eigen(std::span<const double> eigs, std::span<const double> powers, const SystemDims &dims)
{
    return eigen_form(eigs, powers, static_cast<double>(dims.n_rx), dims.noise_var, MiKind::sensing);
}

MIResult sensing_mi_eigen(std::span<const double> eigs, const PowerAllocation &alloc, const SystemDims &dims)
{
    return sensing_mi_eigen(eigs, std::span<const double>(alloc.powers), dims);
}

MIResult comm_mi_eigen(std::span<const double> eigs, std::span<const double> powers, const SystemDims &dims)
{
    return eigen_form(eigs, powers, static_cast<double>(dims.n_symbols), dims.noise_var, MiKind::communication);
}

MIResult comm_mi_eigen(std::span<const double> eigs, const PowerAllocation &alloc, const SystemDims &dims)
{
    return comm_mi_eigen(eigs, std::span<const double>(alloc.powers), dims);
}

MIResult weighted_mi(std::span<const double> powers, std::span<const double> eigs_sensing,
                     std::span<const double> eigs_comm, double f_r, double f_c, double omega_r,
                     const SystemDims &dims)
{
    if (!(f_r > 0.0) || !(f_c > 0.0))
        throw InvalidInput("weighted_mi: normalizers F_r and F_c must be positive");
    if (!(omega_r >= 0.0 && omega_r <= 1.0))
        throw InvalidInput("weighted_mi: omega_r must lie in [0, 1]");

    const MIResult sens = sensing_mi_eigen(eigs_sensing, powers, dims);
    const MIResult comm = comm_mi_eigen(eigs_comm, powers, dims);

    const double wr = omega_r / f_r;
    const double wc = (1.0 - omega_r) / f_c;
    std::vector<double> per_mode(powers.size());
    for (std::size_t i = 0; i < powers.size(); ++i)
        per_mode[i] = wr * (*sens.per_mode_bits)[i] + wc * (*comm.per_mode_bits)[i];

    MIResult out;
    // Boundary weights return the single normalized term exactly.
    if (omega_r == 1.0)
        out.total_bits = sens.total_bits / f_r;
    else if (omega_r == 0.0)
        out.total_bits = comm.total_bits / f_c;
    else
        out.total_bits = wr * sens.total_bits + wc * comm.total_bits;
    out.per_mode_bits = std::move(per_mode);
    out.kind = MiKind::weighted;
    return out;
}

MIResult weighted_mi(const PowerAllocation &alloc, std::span<const double> eigs_sensing,
                     std::span<const double> eigs_comm, double f_r, double f_c, double omega_r,
                     const SystemDims &dims)
{
    return weighted_mi(std::span<const double>(alloc.powers), eigs_sensing, eigs_comm, f_r, f_c, omega_r, dims);
}

} // namespace isac
