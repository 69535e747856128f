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

#include "isac/errors.hpp"
#include "isac/mi.hpp"
#include "isac/optimizer.hpp"
#include "isac/oracle.hpp"
#include "test_util.hpp"

using namespace isac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

double unitary_defect(const cmat &u)
{
    const cmat eye = cmat::Identity(u.cols(), u.cols());
    return (u.adjoint() * u - eye).norm() / eye.norm();
}

cmat reconstruct(const Eigenstructure &e)
{
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(e.eigenvalues.data(), Eigen::Index(e.size()));
    return e.basis * d.asDiagonal() * e.basis.adjoint();
}

bool descending(const std::vector<double> &v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1])
            return false;
    return true;
}

oracle::ModeObjective log_sum(const std::vector<double> &gains)
{
    return [gains](std::size_t i, double p) { return std::log1p(gains[i] * p); };
}

} // namespace

TEST_CASE("eig_sensing examples", "[optimizer]")
{
    const auto id = eig_sensing(cmat::Identity(5, 5));
    for (double v : id.eigenvalues)
        CHECK_THAT(v, WithinAbs(1.0, 1e-14));
    CHECK(rel_frobenius(reconstruct(id), cmat::Identity(5, 5)) < 1e-12);

    cmat diag = cmat::Zero(4, 4);
    diag(0, 0) = 1.0;
    diag(1, 1) = 3.0;
    diag(2, 2) = 0.0;
    diag(3, 3) = 2.0;
    const auto d = eig_sensing(diag);
    CHECK_THAT(d.eigenvalues[0], WithinAbs(3.0, 1e-14));
    CHECK_THAT(d.eigenvalues[1], WithinAbs(2.0, 1e-14));
    CHECK_THAT(d.eigenvalues[2], WithinAbs(1.0, 1e-14));
    CHECK_THAT(d.eigenvalues[3], WithinAbs(0.0, 1e-14));

    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 50; ++rep)
    {
        const cmat p = test::random_psd(1 + rep % 12, rng, 1 + rep % 5);
        const auto e = eig_sensing(p);
        CHECK(rel_frobenius(reconstruct(e), p) < 1e-9);
        CHECK(unitary_defect(e.basis) < 1e-10);
        CHECK(descending(e.eigenvalues));
        for (double v : e.eigenvalues)
            CHECK(v >= 0.0);
    }

    cmat skew = cmat::Identity(3, 3);
    skew(0, 1) = 0.5;
    CHECK_THROWS_AS(eig_sensing(skew), InvalidInput);
}

TEST_CASE("eig_comm examples", "[optimizer]")
{
    SystemDims dims = test::small_dims(3, 3, 3, 4);
    const auto flat = ChannelRealization::from_taps({cmat::Identity(3, 3)}, {0}, 3);
    for (double v : eig_comm(flat, dims).eigenvalues)
        CHECK_THAT(v, WithinAbs(1.0, 1e-14));

    SystemDims one = test::small_dims(1, 2, 2, 2);
    cmat h = cmat::Zero(2, 2);
    h(0, 0) = 2.0;
    h(1, 1) = 1.0;
    const auto e = eig_comm(ChannelRealization::from_taps({h}, {0}, 1), one);
    CHECK_THAT(e.eigenvalues[0], WithinAbs(4.0, 1e-14));
    CHECK_THAT(e.eigenvalues[1], WithinAbs(1.0, 1e-14));

    const SystemDims big;
    const TapSet taps = TapSet::exponential(4, 0.5, {0.25, 0.25, 0.25, 0.25});
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 10; ++rep)
    {
        const auto chan = draw_taps(taps, big, rng);
        const auto ec = eig_comm(chan, big);
        double trace = 0.0, frob = 0.0;
        for (double v : ec.eigenvalues)
            trace += v;
        for (const auto &hp : chan.freq_response)
            frob += hp.squaredNorm();
        CHECK(test::rel_err(trace, frob) < 1e-9);
        CHECK(descending(ec.eigenvalues));
        CHECK(unitary_defect(ec.basis) < 1e-10);
        const cmat hbd = block_diagonal(chan.freq_response);
        CHECK(rel_frobenius(reconstruct(ec), hbd * hbd.adjoint()) < 1e-9);
    }
}

TEST_CASE("water-filling examples", "[optimizer]")
{
    auto a = waterfill(std::vector<double>{1.0, 1.0}, 2.0, 1.0);
    CHECK_THAT(a.powers[0], WithinAbs(1.0, 1e-15));
    CHECK_THAT(a.powers[1], WithinAbs(1.0, 1e-15));

    a = waterfill(std::vector<double>{1.0, 0.5}, 2.0, 1.0);
    CHECK_THAT(a.powers[0], WithinAbs(1.5, 1e-14));
    CHECK_THAT(a.powers[1], WithinAbs(0.5, 1e-14));
    CHECK_THAT(water_level(a), WithinRel(2.5, 1e-14));

    a = waterfill(std::vector<double>{1.0, 0.0}, 1.0, 1.0);
    CHECK(a.powers[0] == 1.0);
    CHECK(a.powers[1] == 0.0);

    CHECK_THROWS_AS(waterfill(std::vector<double>{0.0, 0.0}, 1.0, 1.0), NoFeasibleGain);
    CHECK_THROWS_AS(waterfill(std::vector<double>{1.0}, 0.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(waterfill(std::vector<double>{-1.0, 1.0}, 1.0, 1.0), InvalidInput);
}

TEST_CASE("water-filling matches the grid oracle on two modes", "[optimizer][oracle]")
{
    const auto a = waterfill(std::vector<double>{1.0, 0.5}, 2.0, 1.0);
    const auto g = oracle::grid_search_allocation(log_sum({1.0, 0.5}), {2, 1e-4, 2.0});
    CHECK_THAT(g.powers[0], WithinAbs(a.powers[0], 2e-4));
    CHECK_THAT(g.powers[1], WithinAbs(a.powers[1], 2e-4));
}

TEST_CASE("weighted allocation examples", "[optimizer]")
{
    SECTION("equal gains collapse to water-filling")
    {
        WeightedProblem p{{1.0, 0.5}, {1.0, 0.5}, 0.5, 0.5, 2.0};
        const auto a = weighted_allocate(p);
        CHECK_THAT(a.powers[0], WithinAbs(1.5, 1e-8));
        CHECK_THAT(a.powers[1], WithinAbs(0.5, 1e-8));
        const auto g = oracle::grid_search_allocation(
            [&](std::size_t i, double x) { return 0.5 * std::log1p(p.nu[i] * x) + 0.5 * std::log1p(p.phi[i] * x); },
            {2, 1e-4, 2.0});
        CHECK_THAT(g.powers[0], WithinAbs(1.5, 2e-4));
    }
    SECTION("boundary weights reduce to water-filling")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 3.0);
        for (int rep = 0; rep < 20; ++rep)
        {
            std::vector<double> nu(6), phi(6);
            for (std::size_t i = 0; i < 6; ++i)
            {
                nu[i] = (i % 3 == 2) ? 0.0 : u(rng);
                phi[i] = u(rng);
            }
            const double budget = 0.5 + u(rng);
            const auto sens = weighted_allocate({nu, phi, 1.3, 0.0, budget});
            const auto wf_s = waterfill(nu, budget, 1.0);
            const auto comm = weighted_allocate({nu, phi, 0.0, 0.7, budget});
            const auto wf_c = waterfill(phi, budget, 1.0);
            for (std::size_t i = 0; i < 6; ++i)
            {
                CHECK_THAT(sens.powers[i], WithinAbs(wf_s.powers[i], 1e-8));
                CHECK_THAT(comm.powers[i], WithinAbs(wf_c.powers[i], 1e-8));
            }
        }
    }
    SECTION("all-zero gains are infeasible")
    {
        CHECK_THROWS_AS(weighted_allocate({{0.0, 0.0}, {0.0, 0.0}, 1.0, 1.0, 1.0}), NoFeasibleGain);
    }
    SECTION("invalid problems are rejected")
    {
        CHECK_THROWS_AS(weighted_allocate({{1.0}, {1.0}, 0.0, 0.0, 1.0}), InvalidInput);
        CHECK_THROWS_AS(weighted_allocate({{1.0}, {-1.0}, 1.0, 0.0, 1.0}), InvalidInput);
        CHECK_THROWS_AS(weighted_allocate({{1.0}, {1.0}, 1.0, 0.0, -1.0}), InvalidParameter);
    }
}

TEST_CASE("per-mode root agrees with the symmetric discriminant form", "[optimizer][property]")
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> lg(-3.0, 3.0);
    int compared = 0;
    for (int rep = 0; rep < 5000; ++rep)
    {
        const double nu = std::pow(10.0, lg(rng)), phi = std::pow(10.0, lg(rng));
        const double eps = std::pow(10.0, lg(rng)), eta = std::pow(10.0, lg(rng));
        const double gamma = std::pow(10.0, lg(rng));
        const double a = weighted_mode_power(gamma, nu, phi, eps, eta);
        const double b = weighted_mode_power_discriminant(gamma, nu, phi, eps, eta);
        CHECK(a >= 0.0);
        if (a > 1e-6 * (1.0 / nu + 1.0 / phi))
        {
            ++compared;
            CHECK(test::rel_err(a, b) < 1e-8);
        }
        else
            CHECK(b <= 1e-5 * (1.0 / nu + 1.0 / phi));
    }
    CHECK(compared > 1000);
}

TEST_CASE("weighted allocation satisfies KKT conditions", "[optimizer][property]")
{
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> lg(-2.0, 2.0);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep)
    {
        const std::size_t n = 1 + rep % 40;
        std::vector<double> lambda(n), mu(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            lambda[i] = (rep % 3 == 0 && i % 2) ? 0.0 : std::pow(10.0, lg(rng));
            mu[i] = std::pow(10.0, lg(rng));
        }
        SystemDims dims = test::small_dims(1, 1, 4, 10);
        dims.n_subcarriers = n;
        dims.n_paths_comm = dims.n_paths_sense = 1;
        const double budget = std::pow(10.0, lg(rng)) * double(n);
        const auto ops = waterfill(lambda, budget, 1.0);
        const auto opc = waterfill(mu, budget, 1.0);
        const double f_r = sensing_mi_eigen(lambda, ops, dims).total_bits;
        const double f_c = comm_mi_eigen(mu, opc, dims).total_bits;
        const auto prob = WeightedProblem::from_eigenvalues(lambda, mu, f_r, f_c, w(rng), budget, dims);
        const auto a = weighted_allocate(prob);
        const auto k = kkt_check(prob, a);
        CHECK(k.budget_error <= 1e-8);
        CHECK(k.min_power >= 0.0);
        CHECK(k.max_stationarity < 1e-7);
        CHECK(k.max_slackness_violation == 0.0);
    }
}

TEST_CASE("solvers beat the grid oracle on small instances", "[optimizer][oracle]")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int rep = 0; rep < 10; ++rep)
    {
        const std::size_t n = 2 + rep % 3;
        std::vector<double> nu(n), phi(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            nu[i] = u(rng);
            phi[i] = u(rng);
        }
        const double budget = 0.5 + 2.0 * u(rng);
        const WeightedProblem p{nu, phi, 0.8, 0.4, budget};
        const auto a = weighted_allocate(p);
        const auto g = oracle::grid_search_allocation(
            [&](std::size_t i, double x) { return p.eps * std::log1p(nu[i] * x) + p.eta * std::log1p(phi[i] * x); },
            {n, 1.0 / 2000.0, budget});
        CHECK(p.objective(a.powers) >= g.objective - 1e-4);
    }
}

TEST_CASE("argmax depends on eigenvalues only through nu and phi", "[optimizer][property]")
{
    std::mt19937_64 rng(111);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int rep = 0; rep < 30; ++rep)
    {
        std::vector<double> lambda(5), mu(5);
        for (std::size_t i = 0; i < 5; ++i)
        {
            lambda[i] = u(rng);
            mu[i] = u(rng);
        }
        const double c = 0.1 + u(rng);
        std::vector<double> lambda_c(lambda), mu_c(mu);
        for (std::size_t i = 0; i < 5; ++i)
        {
            lambda_c[i] *= c;
            mu_c[i] *= c;
        }
        const auto a = waterfill(lambda, 4.0, 1.0);
        const auto b = waterfill(lambda_c, 4.0, c);
        SystemDims d1 = test::small_dims(5, 1, 2, 3);
        d1.n_paths_comm = d1.n_paths_sense = 1;
        SystemDims dc = d1;
        dc.noise_var = c;
        const auto p1 = WeightedProblem::from_eigenvalues(lambda, mu, 2.0, 3.0, 0.4, 4.0, d1);
        const auto pc = WeightedProblem::from_eigenvalues(lambda_c, mu_c, 2.0, 3.0, 0.4, 4.0, dc);
        const auto w1 = weighted_allocate(p1);
        const auto wc = weighted_allocate(pc);
        for (std::size_t i = 0; i < 5; ++i)
        {
            CHECK_THAT(a.powers[i], WithinAbs(b.powers[i], 1e-12));
            CHECK_THAT(w1.powers[i], WithinAbs(wc.powers[i], 1e-9));
        }
    }
}

TEST_CASE("waveform reconstruction", "[optimizer]")
{
    const SystemDims dims = test::small_dims(2, 2, 2, 3);
    std::mt19937_64 rng(123);

    SECTION("identity basis gives a diagonal Gram matrix")
    {
        Eigenstructure e{cmat::Identity(4, 4), {1.0, 1.0, 1.0, 1.0}};
        PowerAllocation a;
        a.powers = {0.5, 1.0, 2.0, 0.25};
        a.budget = 3.75;
        const auto wf = reconstruct_waveform(a, e, dims);
        cmat expected = cmat::Zero(4, 4);
        for (int i = 0; i < 4; ++i)
            expected(i, i) = a.powers[std::size_t(i)];
        CHECK(rel_frobenius(wf.transmit.adjoint() * wf.transmit, expected) < 1e-15);
    }
    SECTION("Gram matrix, trace and block structure")
    {
        for (int rep = 0; rep < 20; ++rep)
        {
            const auto e = eig_sensing(test::random_psd(4, rng));
            const auto a = random_allocation(5.0, 4, rng);
            const auto wf = reconstruct_waveform(a, e, dims);
            Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(a.powers.data(), 4);
            const cmat target = e.basis * p.asDiagonal() * e.basis.adjoint();
            CHECK(rel_frobenius(wf.transmit.adjoint() * wf.transmit, target) < 1e-9);
            CHECK_THAT(wf.transmit.squaredNorm(), WithinRel(5.0, 1e-8));
            CHECK(wf.orthonormal_block.block(0, 2, 3, 2).isZero(0.0));
            CHECK(wf.orthonormal_block.block(3, 0, 3, 2).isZero(0.0));
        }
    }
    SECTION("too few symbols is an infeasible shape")
    {
        const SystemDims narrow = test::small_dims(2, 3, 2, 2);
        Eigenstructure e{cmat::Identity(6, 6), std::vector<double>(6, 1.0)};
        CHECK_THROWS_AS(reconstruct_waveform(equal_allocation(6.0, 6), e, narrow), InfeasibleShape);
    }
    SECTION("any orthonormal block leaves MI unchanged")
    {
        const cmat sigma = test::random_psd(4, rng);
        const auto e = eig_sensing(sigma);
        const auto a = random_allocation(3.0, 4, rng);
        const double ref = sensing_mi_general(reconstruct_waveform(a, e, dims).transmit, sigma, dims).total_bits;
        BlockBuilder random_block = [&](std::size_t, std::size_t nx, std::size_t nt) {
            return test::random_orthonormal(Eigen::Index(nx), Eigen::Index(nt), rng);
        };
        for (int rep = 0; rep < 10; ++rep)
        {
            const auto wf = reconstruct_waveform(a, e, dims, random_block);
            CHECK(test::rel_err(sensing_mi_general(wf.transmit, sigma, dims).total_bits, ref) < 1e-10);
        }
        BlockBuilder bad = [](std::size_t, std::size_t nx, std::size_t nt) {
            return cmat(2.0 * cmat::Identity(Eigen::Index(nx), Eigen::Index(nt)));
        };
        CHECK_THROWS_AS(reconstruct_waveform(a, e, dims, bad), InvalidInput);
    }
}

TEST_CASE("cross evaluation", "[optimizer]")
{
    const SystemDims dims = test::small_dims(8, 2, 2, 3);
    const TapSet taps = TapSet::exponential(2, 0.5, {0.25, 0.25, 0.25, 0.25});
    const auto corr = sensing_correlation_matrix(taps, dims);
    const auto eg = eig_sensing(corr);
    std::mt19937_64 rng(321);
    const double budget = 16.0;
    const auto ops = waterfill(eg.eigenvalues, budget, 1.0);
    const double f_r = sensing_mi_eigen(eg.eigenvalues, ops, dims).total_bits;

    CHECK(test::rel_err(cross_evaluate(ops, eg, corr, dims).total_bits, f_r) < 1e-12);

    for (int rep = 0; rep < 20; ++rep)
    {
        const auto chan = draw_taps(taps, dims, rng);
        const auto eh = eig_comm(chan, dims);
        const auto opc = waterfill(eh.eigenvalues, budget, 1.0);
        const double f_c = comm_mi_eigen(eh.eigenvalues, opc, dims).total_bits;
        CHECK(cross_evaluate(opc, eh, corr, dims).total_bits <= f_r + 1e-9);
        CHECK(cross_evaluate(ops, eg, chan, dims).total_bits <= f_c + 1e-9);

        // Equal allocation: U (E/n) I U^H = (E/n) I in any basis.
        const auto ea = equal_allocation(budget, 16);
        const double level = budget / 16.0;
        const cmat x = std::sqrt(level) * block_diagonal(std::vector<cmat>(8, dft_block(0, 3, 2)));
        CHECK(test::rel_err(cross_evaluate(ea, eg, corr, dims).total_bits, sensing_mi_general(x, corr, dims).total_bits) <
              1e-10);
        const std::vector<cmat> cov(8, level * cmat::Identity(2, 2));
        CHECK(test::rel_err(cross_evaluate(ea, eh, chan, dims).total_bits, comm_mi_general(cov, chan, dims).total_bits) <
              1e-10);
        // The OPC covariance on its own channel reproduces F_c.
        CHECK(test::rel_err(cross_evaluate(opc, eh, chan, dims).total_bits, f_c) < 1e-10);
    }
    CHECK_THROWS_AS(cross_evaluate(ops, eg, cmat::Identity(3, 3), dims), InvalidInput);
}

TEST_CASE("equal and random allocations", "[optimizer]")
{
    for (double p : equal_allocation(128.0, 128).powers)
        CHECK(p == 1.0);
    for (double p : equal_allocation(1.0, 4).powers)
        CHECK(p == 0.25);
    CHECK(equal_allocation(7.0, 7).total() == 7.0);
    CHECK_THROWS_AS(equal_allocation(1.0, 0), InvalidParameter);

    std::mt19937_64 rng(1);
    CHECK(random_allocation(1.0, 1, rng).powers == std::vector<double>{1.0});
    std::vector<double> mean(4, 0.0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
    {
        const auto a = random_allocation(2.0, 4, rng);
        double s = 0.0;
        for (std::size_t k = 0; k < 4; ++k)
        {
            CHECK(a.powers[k] >= 0.0);
            s += a.powers[k];
            mean[k] += a.powers[k];
        }
        if (std::abs(s - 2.0) > 1e-12 * 2.0)
            FAIL("random allocation does not sum to the budget");
    }
    for (double m : mean)
        CHECK_THAT(m / draws, WithinRel(0.5, 0.02));
}
