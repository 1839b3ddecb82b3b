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

#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "nhmps/effective.hpp"
#include "nhmps/mps.hpp"

using namespace nhmps;

namespace {

VectorXc random_sector_vector(int L, int n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    VectorXc v = VectorXc::Zero(1 << L);
    for (int s = 0; s < (1 << L); ++s)
        if (std::popcount(static_cast<unsigned>(s)) == n) v(s) = {g(gen), g(gen)};
    return v.normalized();
}

// Von Neumann entropy (bits) of the left block [0, cut) from the dense vector.
double dense_entropy(const VectorXc& v, int L, int cut) {
    const Eigen::Index rows = Eigen::Index{1} << cut, cols = Eigen::Index{1} << (L - cut);
    MatrixXc m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v(r * cols + c);
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(m * m.adjoint());
    double s = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double p = es.eigenvalues()(i);
        if (p > 1e-24) s -= p * std::log2(p);
    }
    return s;
}

} // namespace

TEST_CASE("product states") {
    const auto psi = product_state({1, 0, 1, 0});
    CHECK(psi.filling() == 2);
    CHECK(psi.max_bond_dim() == 1);
    for (double s : entropy_profile(psi)) CHECK(s == 0.0);
    const auto n = local_densities(product_state({1, 1, 0, 0}));
    CHECK(n[0] == doctest::Approx(1.0));
    CHECK(n[3] == doctest::Approx(0.0));
    const VectorXc v = to_dense(product_state({1, 0}));
    CHECK(std::abs(v(2) - cplx{1.0}) < 1e-15);
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(product_state({2, 0}), SpecError);
}

TEST_CASE("bell pair entropy and densities") {
    VectorXc v = VectorXc::Zero(4);
    v(1) = v(2) = 1.0 / std::sqrt(2.0);
    const auto imp = from_dense(v, 2, 4);
    CHECK(entanglement_entropy(imp.state, 1) == doctest::Approx(1.0).epsilon(1e-12));
    const auto n = local_densities(imp.state);
    CHECK(n[0] == doctest::Approx(0.5));
    CHECK(n[1] == doctest::Approx(0.5));
}

TEST_CASE("dense round trip of a random half-filled state") {
    const int L = 6;
    const VectorXc v = random_sector_vector(L, 3, 1);
    const auto imp = from_dense(v, L, 8);
    CHECK(imp.discarded_weight < 1e-20);
    const VectorXc back = to_dense(imp.state);
    CHECK(std::abs(std::abs(back.dot(v)) - 1.0) < 1e-10);
    CHECK((back - v).norm() < 1e-10);
    CHECK(imp.state.canonical_error() < 1e-10);
    for (int cut = 1; cut < L; ++cut)
        CHECK(entanglement_entropy(imp.state, cut) == doctest::Approx(dense_entropy(v, L, cut)).epsilon(1e-10));
}

TEST_CASE("small chi reports discarded weight") {
    const auto imp = from_dense(random_sector_vector(6, 3, 2), 6, 2);
    CHECK(imp.discarded_weight > 0.0);
    CHECK(imp.state.max_bond_dim() <= 2);
}

TEST_CASE("mixed particle-number vector is rejected") {
    VectorXc v = VectorXc::Zero(4);
    v(0) = v(3) = 1.0;
    CHECK_THROWS_AS(from_dense(v, 2, 4), SpecError);
    CHECK_THROWS_AS(from_dense(VectorXc::Zero(8), 3, 4), NormCollapse);
}

TEST_CASE("gauge moves keep the state, entropy and isometries") {
    const int L = 8;
    const VectorXc v = random_sector_vector(L, 4, 3);
    auto psi = from_dense(v, L, 16).state;
    const double s4 = entanglement_entropy(psi, 4);
    for (int c : {0, 5, 2, 7, 3}) {
        psi.move_center(c);
        CHECK(psi.center() == c);
        CHECK(psi.canonical_error() < 1e-10);
        CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(entanglement_entropy(psi, 4) == doctest::Approx(s4).epsilon(1e-10));
    }
    CHECK((to_dense(psi) - v).norm() < 1e-10);
    const auto prof = entropy_profile(psi);
    for (int cut = 1; cut < L; ++cut) {
        CHECK(prof[cut - 1] == doctest::Approx(dense_entropy(v, L, cut)).epsilon(1e-10));
        CHECK(prof[cut - 1] <= std::min(cut, L - cut) + 1e-12);
    }
    const auto n = local_densities(psi);
    double sum = 0.0;
    for (double x : n) sum += x;
    CHECK(sum == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("reflection-symmetric state has a symmetric entropy profile") {
    const int L = 6;
    VectorXc v = random_sector_vector(L, 3, 4);
    VectorXc r(v.size());
    for (int s = 0; s < (1 << L); ++s) {
        int t = 0;
        for (int x = 0; x < L; ++x) t |= ((s >> x) & 1) << (L - 1 - x);
        r(t) = v(s);
    }
    const VectorXc sym = (v + r).normalized();
    const auto prof = entropy_profile(from_dense(sym, L, 8).state);
    for (int cut = 1; cut < L; ++cut) CHECK(prof[cut - 1] == doctest::Approx(prof[L - cut - 1]).epsilon(1e-10));
}

TEST_CASE("renormalize is scale invariant and idempotent") {
    auto psi = from_dense(random_sector_vector(6, 3, 5), 6, 8).state;
    const auto n0 = local_densities(psi);
    const double s0 = entanglement_entropy(psi, 3);
    auto scaled = psi;
    scaled.scale(3.0);
    CHECK(scaled.norm() == doctest::Approx(3.0));
    const auto back = renormalize(scaled);
    CHECK(back.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const auto n1 = local_densities(back);
    for (int i = 0; i < 6; ++i) CHECK(n1[i] == doctest::Approx(n0[i]).epsilon(1e-12));
    CHECK(entanglement_entropy(back, 3) == doctest::Approx(s0).epsilon(1e-12));
    CHECK((to_dense(renormalize(psi)) - to_dense(psi)).norm() < 1e-14);
    auto zero = psi;
    zero.scale(0.0);
    CHECK_THROWS_AS(renormalize(zero), NormCollapse);
}

TEST_CASE("overlap and expectation match dense algebra") {
    const int L = 6;
    const VectorXc a = random_sector_vector(L, 3, 6), b = random_sector_vector(L, 3, 7);
    const auto pa = from_dense(a, L, 8).state, pb = from_dense(b, L, 8).state;
    CHECK(std::abs(overlap(pa, pb) - a.dot(b)) < 1e-12);
    const Mpo h = build_h0({L, 1.0, -0.5, 3});
    CHECK(std::abs(expectation(pa, h) - a.dot(to_dense(h) * a)) < 1e-12);
    CHECK(std::abs(overlap(pa, product_state({1, 1, 0, 0, 0, 0}))) < 1e-15);
    CHECK(overlap(pa, product_state({1, 1, 1, 1, 0, 0})) == cplx{0.0});
}

TEST_CASE("two-site merge and split") {
    const int L = 6;
    const VectorXc v = random_sector_vector(L, 3, 8);
    auto psi = from_dense(v, L, 8).state;
    psi.move_center(2);
    const TwoSite theta = merge(psi.site(2), psi.site(3));
    const auto sp = split_two_site(theta, {}, true);
    CHECK(sp.discarded_weight < 1e-20);
    auto copy = psi;
    copy.site(2) = sp.left;
    copy.site(3) = sp.right;
    copy.set_center(3);
    CHECK(copy.canonical_error() < 1e-10);
    CHECK((to_dense(copy) - v).norm() < 1e-10);
    const auto cut = split_two_site(theta, {2, 0.0}, false);
    CHECK(cut.singular_values.size() == 2);
    CHECK(cut.discarded_weight > 0.0);
}

TEST_CASE("snapshot round trip") {
    auto psi = from_dense(random_sector_vector(6, 3, 9), 6, 8).state;
    psi.move_center(2);
    std::stringstream ss;
    write_snapshot(ss, psi);
    const auto back = read_snapshot(ss);
    CHECK(back.center() == 2);
    CHECK(back.bond_dims() == psi.bond_dims());
    CHECK((to_dense(back) - to_dense(psi)).norm() == 0.0);
    std::stringstream bad("garbage!");
    CHECK_THROWS(read_snapshot(bad));
}
