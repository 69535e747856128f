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


#include "isac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "isac/errors.hpp"

namespace isac
{

HermitianEig hermitian_eig(const cmat &m, double herm_tol, double psd_tol)
{
    if (m.rows() != m.cols())
        throw InvalidInput("hermitian_eig: matrix is " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + ", expected square");
    if (!all_finite(m))
        throw InvalidInput("hermitian_eig: non-finite entries");

    const double norm = m.norm();
    if (norm > 0.0 && (m - m.adjoint()).norm() > herm_tol * norm)
        throw InvalidInput("hermitian_eig: matrix is not Hermitian within tolerance");

    const cmat sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<cmat> solver(sym);
    if (solver.info() != Eigen::Success)
        throw InvalidInput("hermitian_eig: eigen-decomposition failed");

    const Eigen::VectorXd &ev = solver.eigenvalues();
    const auto n = static_cast<std::size_t>(ev.size());

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ev(Eigen::Index(a)) > ev(Eigen::Index(b)); });

    double scale = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        scale = std::max(scale, std::abs(ev(i)));

    HermitianEig out;
    out.vectors.resize(m.rows(), m.cols());
    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        double v = ev(Eigen::Index(order[k]));
        if (v < 0.0)
        {
            if (-v > psd_tol * scale)
                throw InvalidInput("hermitian_eig: matrix is not positive semi-definite (eigenvalue " +
                                   std::to_string(v) + ")");
            v = 0.0;
        }
        out.values[k] = v;
        out.vectors.col(Eigen::Index(k)) = solver.eigenvectors().col(Eigen::Index(order[k]));
    }
    return out;
}

cmat psd_sqrt(const cmat &r, double psd_tol)
{
    const HermitianEig e = hermitian_eig(r, 1e-10, psd_tol);
    Eigen::VectorXd root(static_cast<Eigen::Index>(e.values.size()));
    for (std::size_t i = 0; i < e.values.size(); ++i)
        root(Eigen::Index(i)) = std::sqrt(e.values[i]);
    return e.vectors * root.asDiagonal() * e.vectors.adjoint();
}

double log2det_hpd(const cmat &m)
{
    if (m.rows() == 0)
        return 0.0;
    Eigen::LLT<cmat> llt(m);
    if (llt.info() != Eigen::Success)
        throw InvalidInput("log2det_hpd: matrix is not positive definite");
    const cmat &l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        acc += std::log(l(i, i).real());
    return 2.0 * acc / std::log(2.0);
}

double rel_frobenius(const cmat &a, const cmat &b)
{
    const double denom = std::max(b.norm(), 1e-300);
    return (a - b).norm() / denom;
}

bool all_finite(const cmat &m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                return false;
    return true;
}

cmat block_diagonal(const std::vector<cmat> &blocks)
{
    Eigen::Index rows = 0, cols = 0;
    for (const auto &b : blocks)
    {
        rows += b.rows();
        cols += b.cols();
    }
    cmat out = cmat::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto &b : blocks)
    {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

double pairwise_sum(const double *data, std::size_t n)
{
    if (n == 0)
        return 0.0;
    if (n <= 8)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

} // namespace isac
