// Copyright 2026 The nhmps Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include <cmath>

#include "nhmps/dmrg.hpp"
#include "nhmps/exact.hpp"
#include "nhmps/tdvp.hpp"

using namespace nhmps;

namespace {

MpsState ground(int L, double Delta = -0.5, int chi = 32) {
    const auto s = ModelSpec::half_filled(L, Delta);
    return dmrg(build_h0(s), s, {chi, 20, 1e-12}).state;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace

TEST_CASE("config validation enforces the dt bound") {
    EvolutionConfig c;
    MeasurementSpec m;
    m.M = 10.0;
    CHECK_NOTHROW(c.validate(m));
    c.dt = 0.02;
    CHECK_THROWS_AS(c.validate(m), SpecError);
    m.M = 0.0;
    m.T = 0.1;
    CHECK_THROWS_AS(c.validate(m), SpecError);
    CHECK(hybrid_policy_from_string("always-one-site") == HybridPolicy::AlwaysOneSite);
    CHECK(to_string(HybridPolicy::AlwaysTwoSite) == "always-two-site");
}

TEST_CASE("sector bond-dimension bound") {
    CHECK(max_sector_bond_dim(8, 4, 4) == 1 + 4 + 6 + 4 + 1);
    CHECK(max_sector_bond_dim(8, 4, 1) == 2);
    CHECK(max_sector_bond_dim(12, 6, 6) == 1 + 6 + 15 + 20 + 15 + 6 + 1);
}

TEST_CASE("ground state is stationary under H0") {
    auto psi = ground(8);
    const auto n0 = local_densities(psi);
    const auto s = ModelSpec::half_filled(8);
    const double e0 = expectation(psi, build_h0(s)).real();
    EvolutionConfig cfg;
    cfg.chi_max = 16;
    TdvpIntegrator integ(cfg);
    integ.set_operator(build_h0(s));
    for (int k = 0; k < 100; ++k) integ.step(psi);
    CHECK(max_diff(local_densities(psi), n0) < 1e-6);
    CHECK(std::abs(expectation(psi, build_h0(s)).real() - e0) < 1e-8);
}

TEST_CASE("measurement on an eigenstate leaves it unchanged") {
    auto psi = product_state({1, 0, 1, 0});
    MeasurementSpec m;
    m.M = 10.0;
    Mpo h = build_h_meas(4, m, {{0, 1}});
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    const VectorXc before = to_dense(psi);
    tdvp_step(psi, h, cfg);
    CHECK((to_dense(psi) - before).norm() < 1e-12);
}

TEST_CASE("full-rank TDVP equals dense propagation under a non-Hermitian operator") {
    const int L = 8;
    const auto s = ModelSpec::half_filled(L);
    const SectorHamiltonian hs(s);
    const auto gs = dense_ground_state(hs);
    auto psi = from_dense(hs.basis().embed(gs.vector), L, 16).state;
    MeasurementSpec m;
    m.M = 2.0;
    const std::vector<SiteSign> ev{{0, 1}, {3, -1}, {4, 1}, {7, -1}};
    const VectorXc extra = hs.measurement_diagonal(m, ev);
    EvolutionConfig cfg;
    cfg.chi_max = 16;
    TdvpIntegrator integ(cfg);
    integ.set_operator(build_evolution_mpo(s, m, ev));
    VectorXc v = gs.vector;
    for (int k = 0; k < 200; ++k) {
        integ.step(psi);
        dense_step(hs, v, cfg.dt, &extra, true);
    }
    CHECK(max_diff(local_densities(psi), dense_densities(hs.basis(), v)) < 1e-8);
    CHECK(std::abs(entanglement_entropy(psi, 4) - dense_entropy(hs.basis(), v, 4)) < 1e-7);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hybrid and always-two-site agree while unsaturated") {
    const int L = 8;
    const auto s = ModelSpec::half_filled(L);
    MeasurementSpec m;
    m.M = 1.0;
    const Mpo h = build_evolution_mpo(s, m, {{2, 1}, {5, -1}});
    auto a = ground(L, -0.5, 4);
    auto b = a;
    EvolutionConfig ca, cb;
    ca.chi_max = cb.chi_max = 64;
    cb.hybrid_policy = HybridPolicy::AlwaysTwoSite;
    TdvpIntegrator ia(ca), ib(cb);
    ia.set_operator(h);
    ib.set_operator(h);
    for (int k = 0; k < 40; ++k) {
        ia.step(a);
        ib.step(b);
    }
    CHECK(max_diff(local_densities(a), local_densities(b)) < 1e-6);
}

TEST_CASE("norm growth rate equals twice the anti-Hermitian expectation") {
    const int L = 6;
    const auto s = ModelSpec::half_filled(L);
    auto psi = ground(L, -0.5, 8);
    MeasurementSpec m;
    m.M = 1.5;
    const std::vector<SiteSign> ev{{0, 1}, {2, -1}, {3, 1}};
    const Mpo h = build_evolution_mpo(s, m, ev);
    const auto n = local_densities(psi);
    double rate = 0.0;
    for (const auto& e : ev) rate += 2.0 * m.M * e.sign * n[e.site];
    EvolutionConfig cfg;
    cfg.dt = 1e-4;
    TdvpIntegrator integ(cfg);
    integ.set_auto_renormalize(false);
    integ.set_operator(h);
    integ.step(psi);
    const double measured = (psi.norm() * psi.norm() - 1.0) / cfg.dt;
    CHECK(std::abs(measured - rate) < 1e-3 * std::max(1.0, std::abs(rate)));
}

TEST_CASE("evolve_interval basics") {
    const int L = 6;
    const auto s = ModelSpec::half_filled(L);
    auto psi = ground(L, -0.5, 8);
    EvolutionConfig cfg;
    TdvpIntegrator integ(cfg);
    integ.set_operator(build_h0(s));
    const VectorXc before = to_dense(psi);
    auto r0 = evolve_interval(psi, integ, 0.0, 0.0);
    CHECK(r0.snapshots.size() == 1);
    CHECK((to_dense(psi) - before).norm() < 1e-14);
    CHECK_THROWS_AS(evolve_interval(psi, integ, 0.0, 0.0123), SpecError);

    // M = 0: pure Hermitian evolution without renormalization.
    auto q = product_state({1, 0, 1, 0, 1, 0});
    const auto r1 = evolve_interval(q, integ, 0.0, 1.0, 50);
    CHECK(std::abs(q.norm() - 1.0) < 1e-9);
    CHECK(r1.snapshots.size() == 4);
    CHECK(r1.snapshots.back().t == doctest::Approx(1.0));
}

TEST_CASE("strong negative-sign event empties a superposition site") {
    const int L = 6;
    const auto s = ModelSpec::half_filled(L);
    auto psi = ground(L, -0.5, 8);
    MeasurementSpec m;
    m.M = 10.0;
    EvolutionConfig cfg;
    TdvpIntegrator integ(cfg);
    integ.set_operator(build_evolution_mpo(s, m, {{2, -1}}));
    evolve_interval(psi, integ, 0.0, 1.0);
    CHECK(local_densities(psi)[2] < 0.01);
}

TEST_CASE("halving dt barely changes the entropy") {
    const int L = 8;
    const auto s = ModelSpec::half_filled(L);
    MeasurementSpec m;
    m.M = 0.5;
    const Mpo h = build_evolution_mpo(s, m, {{1, 1}, {4, -1}, {6, 1}});
    auto a = ground(L, -0.5, 16);
    auto b = a;
    EvolutionConfig ca, cb;
    ca.chi_max = cb.chi_max = 16;
    cb.dt = ca.dt / 2;
    TdvpIntegrator ia(ca), ib(cb);
    ia.set_operator(h);
    ib.set_operator(h);
    evolve_interval(a, ia, 0.0, 5.0);
    evolve_interval(b, ib, 0.0, 5.0);
    CHECK(std::abs(entanglement_entropy(a, 4) - entanglement_entropy(b, 4)) < 1e-4);
}
