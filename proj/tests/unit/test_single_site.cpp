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
#include <numbers>

#include "nhmps/single_site.hpp"

using namespace nhmps;
using namespace nhmps::single_site;

namespace {

Qubit superposition(double occ, double phase = 0.0) {
    return {std::polar(std::sqrt(occ), phase), cplx{std::sqrt(1.0 - occ), 0.0}};
}

} // namespace

TEST_CASE("Kraus pair limits and completeness") {
    const auto proj = kraus_ops(std::numbers::pi / 2);
    CHECK((proj.plus - Eigen::Matrix2cd{{0, 0}, {0, cplx{0, -1}}}).norm() < 1e-15);
    CHECK((proj.minus - Eigen::Matrix2cd{{1, 0}, {0, 0}}).norm() < 1e-15);
    const auto off = kraus_ops(0.0);
    CHECK(off.plus.norm() == 0.0);
    CHECK((off.minus - Eigen::Matrix2cd::Identity()).norm() == 0.0);
    const auto weak = kraus_ops(0.1);
    CHECK(weak.plus(1, 1).imag() == doctest::Approx(-0.1).epsilon(2e-3));
    CHECK(weak.minus(1, 1).real() == doctest::Approx(1.0 - 0.005).epsilon(1e-5));
    for (int i = 0; i <= 100; ++i) {
        const auto k = kraus_ops(std::numbers::pi * i / 100.0);
        const Eigen::Matrix2cd c = k.plus.adjoint() * k.plus + k.minus.adjoint() * k.minus;
        CHECK((c - Eigen::Matrix2cd::Identity()).norm() < 1e-14);
    }
    CHECK_THROWS(kraus_ops(-0.1));
}

TEST_CASE("conventional step") {
    const Qubit hole{0.0, 1.0};
    for (double u : {0.0, 0.3, 0.999}) {
        const auto o = conventional_step(hole, 0.7, u);
        CHECK(o.sigma == -1);
        CHECK(std::abs(o.state.beta) == doctest::Approx(1.0));
    }
    const Qubit full{1.0, 0.0};
    const auto o = conventional_step(full, std::numbers::pi / 2, 0.999999);
    CHECK(o.sigma == 1);
    CHECK(std::abs(o.state.alpha) == doctest::Approx(1.0));
    CHECK(click_probability(superposition(0.5), 0.2) == doctest::Approx(0.019734751499278728).epsilon(1e-14));
    // no click reweights toward the empty state
    const auto nc = conventional_step(superposition(0.5), 0.6, 0.9);
    CHECK(nc.sigma == -1);
    CHECK(nc.state.occupation() < 0.5);
    CHECK(std::norm(nc.state.alpha) + std::norm(nc.state.beta) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("non-Hermitian step") {
    const Qubit full{1.0, 0.0};
    for (double m : {0.1, 0.9}) CHECK(nonhermitian_step(full, 3.0, 1.0, m).state.occupation() == doctest::Approx(1.0));
    const Qubit q = superposition(0.7);
    const auto strong_up = nonhermitian_step(q, 50.0, 1.0, 0.69);
    CHECK(strong_up.sigma == 1);
    CHECK(strong_up.state.occupation() == doctest::Approx(1.0).epsilon(1e-12));
    const auto strong_down = nonhermitian_step(q, 50.0, 1.0, 0.71);
    CHECK(strong_down.sigma == -1);
    CHECK(strong_down.state.occupation() < 1e-12);
    // M = 0: no change, sign still drawn from |alpha|^2
    const auto zero = nonhermitian_step(q, 0.0, 1.0, 0.5);
    CHECK(zero.sigma == 1);
    CHECK(zero.state.occupation() == doctest::Approx(0.7).epsilon(1e-15));
    // exact tie: |alpha|^2 = 0.25 = m
    CHECK(nonhermitian_step(Qubit{0.5, std::sqrt(0.75)}, 1.0, 1.0, 0.25).sigma == -1);
}

TEST_CASE("non-Hermitian composability and sign self-consistency") {
    const Qubit q = superposition(0.35, 0.4);
    for (int sigma : {-1, 1}) {
        const Qubit one = nonhermitian_evolve(q, 1.3, 0.02, sigma);
        const Qubit two = nonhermitian_evolve(nonhermitian_evolve(q, 1.3, 0.01, sigma), 1.3, 0.01, sigma);
        CHECK(std::abs(one.alpha - two.alpha) < 1e-15);
        CHECK(std::abs(one.beta - two.beta) < 1e-15);
    }
    for (double m : {0.1, 0.3, 0.34}) {
        const auto o = nonhermitian_step(q, 2.0, 0.5, m);
        REQUIRE(o.sigma == 1);
        Qubit s = q;
        for (int k = 0; k < 50; ++k) {
            s = nonhermitian_evolve(s, 2.0, 0.01, o.sigma);
            CHECK(s.occupation() > m);
        }
    }
}

TEST_CASE("Lindblad evolution") {
    const auto tr = lindblad_evolve({0.3, {0.4, 0.0}}, 1.0, 1.0, 10.0);
    for (const auto& p : tr) CHECK(p.a == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(tr.back().t == doctest::Approx(10.0));
    CHECK(tr.back().b.real() == doctest::Approx(0.002695178799634187).epsilon(1e-9));
    const auto dark = lindblad_evolve({0.6, 0.0}, 2.0, 0.5, 3.0);
    for (const auto& p : dark) CHECK(std::abs(p.b) == 0.0);
}

TEST_CASE("postselected no-click evolution") {
    for (bool normalized : {false, true}) {
        const auto tr = noclick_postselect_evolve({0.0, 0.0}, 1.0, 1.0, 2.0, normalized);
        for (const auto& p : tr) {
            CHECK(p.a == 0.0);
            CHECK(p.trace == doctest::Approx(1.0));
        }
    }
    const auto norm = noclick_postselect_evolve({0.5, 0.5}, 1.0, 1.0, 10.0, true);
    double last = 1.0;
    for (const auto& p : norm) {
        CHECK(std::abs(p.trace - 1.0) < 1e-10);
        CHECK(p.a <= last);
        last = p.a;
    }
    CHECK(norm.back().a < 0.01);
    const auto raw = noclick_postselect_evolve({0.5, 0.5}, 1.0, 1.0, 1.0, false);
    CHECK(raw.back().trace < 0.99);
}

TEST_CASE("nonlinear master equation") {
    for (double a0 : {0.0, 0.5, 1.0}) {
        const auto tr = nonlinear_master_evolve({a0, 0.0}, 1.0, 0.05, 5.0);
        for (const auto& p : tr) {
            CHECK(p.a == a0);
            CHECK(p.b == cplx{0.0, 0.0});
        }
    }
    const auto down = nonlinear_master_evolve({0.3, 0.0}, 0.1, 0.01, 50.0);
    for (std::size_t i = 1; i < down.size(); ++i) CHECK(down[i].a < down[i - 1].a);
    const auto up = nonlinear_master_evolve({0.7, 0.0}, 0.1, 0.01, 50.0);
    for (std::size_t i = 1; i < up.size(); ++i) CHECK(up[i].a > up[i - 1].a);

    // independent forward-Euler reference at a much finer step
    const double M = 0.8, T = 0.05;
    double a = 0.3;
    cplx b{0.2, 0.1};
    const double h = 1e-6;
    for (int k = 0; k < 2000000; ++k) {
        const double da = -2 * M * a * (1 - a) * (1 - 2 * a) * (1 - M * T);
        const cplx db = -M * b * ((1 - 2 * a) * (1 - 2 * a) + 4 * M * T * (a * (1 - a) - 0.5));
        a += h * da;
        b += h * db;
    }
    const auto rk = nonlinear_master_evolve({0.3, {0.2, 0.1}}, M, T, 2.0);
    CHECK(rk.back().a == doctest::Approx(a).epsilon(1e-5));
    CHECK(std::abs(rk.back().b - b) < 1e-5);
    for (const auto& p : rk) CHECK(std::norm(p.b) <= p.a * (1 - p.a) + 1e-8);
}

TEST_CASE("Monte Carlo averages") {
    for (auto proto : {Protocol::Conventional, Protocol::NonHermitian}) {
        const auto mc = monte_carlo_average({1.0, 0.0}, 0.5, 0.1, 10, 200, proto, 3);
        for (const auto& p : mc) CHECK(p.a == 1.0);
    }
    CHECK_THROWS(monte_carlo_average({1.0, 0.0}, 0.5, 0.1, 10, 50, Protocol::Conventional, 3));
    const auto a = monte_carlo_average(superposition(0.5), 0.5, 0.1, 5, 300, Protocol::NonHermitian, 11);
    const auto b = monte_carlo_average(superposition(0.5), 0.5, 0.1, 5, 300, Protocol::NonHermitian, 11);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].a == b[i].a);
    CHECK(protocol_from_string(to_string(Protocol::Conventional)) == Protocol::Conventional);
}

TEST_CASE("CSV output") {
    const auto csv = trajectory_csv(lindblad_evolve({0.3, 0.1}, 1.0, 1.0, 0.002, 0.001), {});
    CHECK(csv.rfind("t,a,re_b,im_b,source\n", 0) == 0);
    CHECK(csv.find(",ode\n") != std::string::npos);
}
