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


#ifndef ISAC_MI_HPP
#define ISAC_MI_HPP

#include <optional>
#include <span>
#include <vector>

#include "isac/allocation.hpp"
#include "isac/channel.hpp"
#include "isac/linalg.hpp"

namespace isac
{

enum class MiKind
{
    sensing,
    communication,
    weighted,
};

struct MIResult
{
    double total_bits = 0.0;
    std::optional<std::vector<double>> per_mode_bits;
    MiKind kind = MiKind::sensing;
};

// N_r log2 det(I + X Sigma X^H / sigma_n^2). X is N_c N_x x N_c N_t (block
// diagonal in the signal model, but any matrix of that shape is accepted) and
// Sigma is N_c N_t square.
MIResult sensing_mi_general(const cmat &x, const cmat &sigma, const SystemDims &dims);
MIResult sensing_mi_general(const cmat &x, const SensingCorrelation &corr, const SystemDims &dims);

// Sensing MI for a spatially and spectrally white sensing channel (Sigma = I).
MIResult sensing_mi_uncorrelated(const cmat &x, const SystemDims &dims);

// N_x sum_p log2 det(I + H(p)^H Sigma_X(p) H(p) / sigma_n^2), one term per subcarrier.
MIResult comm_mi_general(const std::vector<cmat> &per_subcarrier_cov, const ChannelRealization &chan,
                         const SystemDims &dims);

// N_x log2 det(I + H_bd^H Sigma_X H_bd / sigma_n^2) with H_bd = diag{H(p)} and
// a full N_c N_t covariance. For block-diagonal Sigma_X this is the product
// form of the per-subcarrier sum above.
MIResult comm_mi_full(const cmat &cov, const ChannelRealization &chan, const SystemDims &dims);

// N_r sum_i log2(1 + lambda_i xi_i / sigma_n^2); per-mode terms populated.
MIResult sensing_mi_eigen(std::span<const double> eigs, std::span<const double> powers, const SystemDims &dims);
MIResult sensing_mi_eigen(std::span<const double> eigs, const PowerAllocation &alloc, const SystemDims &dims);

// N_x sum_i log2(1 + mu_i xi_i / sigma_n^2); per-mode terms populated.
MIResult comm_mi_eigen(std::span<const double> eigs, std::span<const double> powers, const SystemDims &dims);
MIResult comm_mi_eigen(std::span<const double> eigs, const PowerAllocation &alloc, const SystemDims &dims);

// omega_r I_sens / F_r + (1 - omega_r) I_comm / F_c with both MIs in eigen form.
MIResult weighted_mi(std::span<const double> powers, std::span<const double> eigs_sensing,
                     std::span<const double> eigs_comm, double f_r, double f_c, double omega_r,
                     const SystemDims &dims);
MIResult weighted_mi(const PowerAllocation &alloc, std::span<const double> eigs_sensing,
                     std::span<const double> eigs_comm, double f_r, double f_c, double omega_r,
                     const SystemDims &dims);

// MI normalized per symbol per subcarrier (bit/s/Hz).
inline double per_resource(double bits, const SystemDims &dims)
{
    return bits / static_cast<double>(dims.n_symbols * dims.n_subcarriers);
}

} // namespace isac

#endif
