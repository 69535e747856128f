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


#ifndef ISAC_LINALG_HPP
#define ISAC_LINALG_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace isac
{

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

// Eigen-decomposition of a Hermitian matrix with eigenvalues in descending
// order. Ties keep the solver's original index order.
struct HermitianEig
{
    cmat vectors;
    std::vector<double> values;
};

// Decomposes `m` after checking Hermitian symmetry to `herm_tol` (relative
// Frobenius). Negative eigenvalues down to -psd_tol * max|eig| are clamped to
// zero; anything more negative throws InvalidInput.
HermitianEig hermitian_eig(const cmat &m, double herm_tol = 1e-10, double psd_tol = 1e-10);

// Hermitian PSD square root R^{1/2} = V diag(sqrt(max(eig,0))) V^H.
cmat psd_sqrt(const cmat &r, double psd_tol = 1e-12);

// log2 det(M) for a Hermitian positive definite matrix, via Cholesky.
double log2det_hpd(const cmat &m);

// Relative Frobenius distance ||a - b|| / max(||b||, tiny).
double rel_frobenius(const cmat &a, const cmat &b);

bool all_finite(const cmat &m);

// Block-diagonal assembly of equally sized square or rectangular blocks.
cmat block_diagonal(const std::vector<cmat> &blocks);

// Sum with pairwise (cascade) reduction. Order-dependent only on the input order.
double pairwise_sum(const double *data, std::size_t n);

} // namespace isac

#endif
