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


#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "isac/channel.hpp"
#include "isac/errors.hpp"
#include "test_util.hpp"

using namespace isac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

// Positive definiteness by a hand-rolled real Cholesky: every pivot must be positive.
bool cholesky_pivots_positive(const cmat &m)
{
    const auto n = m.rows();
    std::vector<double> l(std::size_t(n * n), 0.0);
    for (Eigen::Index j = 0; j < n; ++j)
    {
        double d = m(j, j).real();
        for (Eigen::Index k = 0; k < j; ++k)
            d -= l[std::size_t(j * n + k)] * l[std::size_t(j * n + k)];
        if (!(d > 0.0))
            return false;
        l[std::size_t(j * n + j)] = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < n; ++i)
        {
            double s = m(i, j).real();
            for (Eigen::Index k = 0; k < j; ++k)
                s -= l[std::size_t(i * n + k)] * l[std::size_t(j * n + k)];
            l[std::size_t(i * n + j)] = s / l[std::size_t(j * n + j)];
        }
    }
    return true;
}

// Sample E[h h^H] over columns of every tap-0 draw.
cmat sample_column_covariance(const TapSet &taps, const SystemDims &dims, std::size_t draws, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    cmat acc = cmat::Zero(Eigen::Index(dims.n_tx), Eigen::Index(dims.n_tx));
    for (std::size_t i = 0; i < draws; ++i)
    {
        const auto chan = draw_taps(taps, dims, rng);
        acc += chan.tap_matrices[0] * chan.tap_matrices[0].adjoint();
    }
    return acc / static_cast<double>(draws * dims.n_rx);
}

TapSet table2_taps(std::size_t n_tx)
{
    return TapSet::exponential(n_tx, 0.5, {0.25, 0.25, 0.25, 0.25});
}

} // namespace

TEST_CASE("exponential correlation examples", "[channel]")
{
    CHECK(make_exponential_correlation(4, 0.0) == cmat::Identity(4, 4));

    cmat expected(2, 2);
    expected << 1.0, 0.5, 0.5, 1.0;
    CHECK(make_exponential_correlation(2, 0.5) == expected);

    const cmat r = make_exponential_correlation(4, 0.5);
    CHECK(cholesky_pivots_positive(r));
    CHECK(r(0, 3).real() == 0.125);
    for (Eigen::Index i = 0; i < 4; ++i)
        CHECK(r(i, i) == cplx(1.0, 0.0));
}

TEST_CASE("exponential correlation rejects rho outside [0, 1)", "[channel]")
{
    CHECK_THROWS_AS(make_exponential_correlation(4, 1.0), InvalidParameter);
    CHECK_THROWS_AS(make_exponential_correlation(4, -0.1), InvalidParameter);
}

TEST_CASE("system dims validation", "[channel]")
{
    SystemDims d;
    CHECK_NOTHROW(d.validate());
    d.n_paths_comm = 33;
    CHECK_THROWS_AS(d.validate(), InvalidParameter);
    d = SystemDims{};
    d.noise_var = 0.0;
    CHECK_THROWS_AS(d.validate(), InvalidParameter);
    d = SystemDims{};
    d.n_rx = 0;
    CHECK_THROWS_AS(d.validate(), InvalidParameter);
}

TEST_CASE("draw_taps sample covariance matches the spatial correlation", "[channel][statistics]")
{
    SystemDims dims = test::small_dims(4, 4, 4, 4);
    SECTION("white single tap")
    {
        TapSet ts;
        ts.taps.push_back(Tap{0, cmat::Identity(4, 4), 1.0});
        const cmat cov = sample_column_covariance(ts, dims, 100000, 11);
        CHECK(rel_frobenius(cov, cmat::Identity(4, 4)) < 0.02);
    }
    SECTION("exponential rho 0.5")
    {
        const cmat r = make_exponential_correlation(4, 0.5);
        TapSet ts;
        ts.taps.push_back(Tap{0, r, 1.0});
        const cmat cov = sample_column_covariance(ts, dims, 100000, 12);
        CHECK(rel_frobenius(cov, r) < 0.02);
    }
}

TEST_CASE("draw_taps with zero powers gives a zero realization", "[channel]")
{
    const SystemDims dims = test::small_dims(8, 2, 2, 2);
    TapSet ts = TapSet::exponential(2, 0.5, {0.0, 0.0, 0.0, 0.0});
    std::mt19937_64 rng(3);
    const auto chan = draw_taps(ts, dims, rng);
    for (const auto &h : chan.freq_response)
        CHECK(h.isZero(0.0));
    for (const auto &h : chan.tap_matrices)
        CHECK(h.isZero(0.0));
}

TEST_CASE("draw_taps reports a non-PSD correlation as invalid input", "[channel]")
{
    const SystemDims dims = test::small_dims(4, 2, 2, 2);
    cmat bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    TapSet ts;
    ts.taps.push_back(Tap{0, bad, 1.0});
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(draw_taps(ts, dims, rng), InvalidInput);
    CHECK_THROWS_AS(ts.validate(2, 4), InvalidInput);
}

TEST_CASE("frequency response matches a direct DFT of the taps", "[channel][property]")
{
    const SystemDims dims; // 32 subcarriers, 4x4
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep)
    {
        const auto chan = draw_taps(table2_taps(4), dims, rng);
        for (std::size_t p = 0; p < dims.n_subcarriers; ++p)
        {
            cmat direct = cmat::Zero(4, 4);
            for (std::size_t l = 0; l < chan.tap_matrices.size(); ++l)
            {
                const double angle = -2.0 * std::numbers::pi * double(chan.tap_delays[l] * p) / 32.0;
                direct += chan.tap_matrices[l] * std::polar(1.0, angle);
            }
            CHECK(rel_frobenius(chan.freq_response[p], direct) < 1e-12);
        }
    }
}

TEST_CASE("sensing correlation examples", "[channel]")
{
    SECTION("single flat tap: every block is the identity")
    {
        const SystemDims dims = test::small_dims(8, 4, 4, 4);
        TapSet ts;
        ts.taps.push_back(Tap{0, cmat::Identity(4, 4), 1.0});
        const auto corr = sensing_correlation_matrix(ts, dims);
        for (std::size_t p1 = 0; p1 < 8; ++p1)
            for (std::size_t p2 = 0; p2 < 8; ++p2)
                CHECK(rel_frobenius(corr.block(p1, p2), cmat::Identity(4, 4)) < 1e-15);
    }
    SECTION("four equal taps: half-band block vanishes")
    {
        const SystemDims dims;
        const cmat r = make_exponential_correlation(4, 0.5);
        const auto corr = sensing_correlation_matrix(table2_taps(4), dims);
        // Oracle: 0.25 R sum_{l=0}^{3} exp(-j pi l), evaluated directly.
        cplx geometric(0.0, 0.0);
        for (int l = 0; l < 4; ++l)
            geometric += std::exp(cplx(0.0, -std::numbers::pi * l));
        const cmat oracle = 0.25 * r * geometric;
        CHECK(oracle.norm() < 1e-12);
        CHECK(corr.block(0, 16).norm() < 1e-12);
        CHECK(corr.block(5, 21).norm() < 1e-12);
        CHECK(corr.block(20, 4).norm() < 1e-12);
    }
    SECTION("diagonal blocks are sum of sigma^2 R with trace N_t")
    {
        const SystemDims dims;
        const auto corr = sensing_correlation_matrix(table2_taps(4), dims);
        const cmat r = make_exponential_correlation(4, 0.5);
        for (std::size_t p = 0; p < dims.n_subcarriers; ++p)
        {
            CHECK(rel_frobenius(corr.block(p, p), r) < 1e-15);
            CHECK_THAT(corr.block(p, p).trace().real(), WithinAbs(4.0, 1e-12));
        }
    }
}

TEST_CASE("sensing correlation invariants", "[channel][property]")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unif(0.0, 0.95);
    for (int rep = 0; rep < 25; ++rep)
    {
        const std::size_t nc = 2 + rep % 15;
        const std::size_t nt = 1 + rep % 4;
        SystemDims dims = test::small_dims(nc, nt, 2, 4);
        std::vector<double> powers(dims.n_paths_sense);
        for (auto &p : powers)
            p = unif(rng);
        const auto corr = sensing_correlation_matrix(TapSet::exponential(nt, unif(rng), powers), dims);

        CHECK(corr.full == cmat(corr.full.adjoint()));
        Eigen::SelfAdjointEigenSolver<cmat> es(corr.full);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
        for (std::size_t p = 1; p < nc; ++p)
            CHECK(corr.block(p, p) == corr.block(0, 0));
        for (std::size_t p1 = 0; p1 < nc; ++p1)
            for (std::size_t p2 = 0; p2 < nc; ++p2)
                if (p1 != p2)
                    CHECK(corr.blockdiag.block(Eigen::Index(p1 * nt), Eigen::Index(p2 * nt), Eigen::Index(nt),
                                               Eigen::Index(nt))
                              .isZero(0.0));
    }
}

TEST_CASE("subcarrier correlation follows the tap-sum kernel", "[channel][property]")
{
    // For equal taps the block norm is 0.25 ||R|| |sum_l exp(-j 2 pi l d / N_c)|: it
    // decreases over the main lobe d in [0, N_c / 4] and is exactly periodic in d.
    const SystemDims dims;
    const auto corr = sensing_correlation_matrix(table2_taps(4), dims);
    const double r_norm = make_exponential_correlation(4, 0.5).norm();
    double previous = corr.block(0, 0).norm();
    for (std::size_t d = 0; d <= 16; ++d)
    {
        const double norm = corr.block(0, d).norm();
        const double kernel =
            d == 0 ? 4.0 : std::abs(std::sin(4.0 * std::numbers::pi * d / 32.0) / std::sin(std::numbers::pi * d / 32.0));
        CHECK_THAT(norm, WithinAbs(0.25 * r_norm * kernel, 1e-12));
        if (d <= 8)
        {
            CHECK(norm <= previous + 1e-12);
            previous = norm;
        }
    }
}

TEST_CASE("empirical sensing correlation matches the analytic matrix", "[channel][statistics]")
{
    const SystemDims dims = test::small_dims(8, 2, 4, 4);
    const TapSet taps = table2_taps(2);
    const auto corr = sensing_correlation_matrix(taps, dims);
    std::mt19937_64 rng(99);
    const auto n = Eigen::Index(dims.n_modes());
    cmat acc = cmat::Zero(n, n);
    cmat g(n, Eigen::Index(dims.n_rx));
    const std::size_t draws = 10000;
    for (std::size_t i = 0; i < draws; ++i)
    {
        const auto chan = draw_taps(taps, dims, rng);
        for (std::size_t p = 0; p < dims.n_subcarriers; ++p)
            g.middleRows(Eigen::Index(p * dims.n_tx), Eigen::Index(dims.n_tx)) = chan.freq_response[p];
        acc += g * g.adjoint();
    }
    acc /= static_cast<double>(draws * dims.n_rx);
    CHECK(rel_frobenius(acc, corr.full) < 0.03);
}

TEST_CASE("estimation error", "[channel]")
{
    const SystemDims dims;
    std::mt19937_64 rng(8);
    const auto chan = draw_taps(table2_taps(4), dims, rng);

    SECTION("zero variance returns an identical copy")
    {
        const auto copy = add_estimation_error(chan, 0.0, rng);
        for (std::size_t p = 0; p < chan.n_subcarriers(); ++p)
            CHECK(copy.freq_response[p] == chan.freq_response[p]);
    }
    SECTION("negative variance is rejected")
    {
        CHECK_THROWS_AS(add_estimation_error(chan, -1e-3, rng), InvalidParameter);
    }
    SECTION("perturbation leaves the input untouched")
    {
        const auto before = chan.freq_response;
        const auto noisy = add_estimation_error(chan, 0.01, rng);
        CHECK(noisy.freq_response[0] != chan.freq_response[0]);
        for (std::size_t p = 0; p < chan.n_subcarriers(); ++p)
            CHECK(before[p] == chan.freq_response[p]);
    }
    SECTION("per-entry variance on a zero channel")
    {
        ChannelRealization zero = ChannelRealization::from_taps({cmat::Zero(4, 4)}, {0}, 32);
        double acc = 0.0;
        std::size_t count = 0;
        while (count < 100000)
        {
            const auto noisy = add_estimation_error(zero, 0.01, rng);
            for (const auto &h : noisy.freq_response)
            {
                acc += h.squaredNorm();
                count += std::size_t(h.size());
            }
        }
        CHECK_THAT(acc / double(count), WithinRel(0.01, 0.03));
    }
}
