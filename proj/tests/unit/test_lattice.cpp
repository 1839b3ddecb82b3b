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

#include "nhmps/lattice.hpp"

using namespace nhmps;

namespace {

int bit(int state, int site, int L) { return (state >> (L - 1 - site)) & 1; }

// Direct dense construction on the full 2^L space, site 0 most significant.
MatrixXc dense_h0(int L, double J, double Delta) {
    const int d = 1 << L;
    MatrixXc h = MatrixXc::Zero(d, d);
    for (int s = 0; s < d; ++s)
        for (int x = 0; x + 1 < L; ++x) {
            const int a = bit(s, x, L), b = bit(s, x + 1, L);
            h(s, s) += Delta * a * b;
            if (a != b) {
                const int t = s ^ (1 << (L - 1 - x)) ^ (1 << (L - 2 - x));
                h(t, s) += -0.5 * J;
            }
        }
    return h;
}

MatrixXc dense_number(int L) {
    const int d = 1 << L;
    MatrixXc n = MatrixXc::Zero(d, d);
    for (int s = 0; s < d; ++s) n(s, s) = __builtin_popcount(static_cast<unsigned>(s));
    return n;
}

} // namespace

TEST_CASE("two-site H0 at Delta 0 couples 01 and 10 only") {
    const MatrixXc h = to_dense(build_h0({2, 1.0, 0.0, 1}));
    MatrixXc ref = MatrixXc::Zero(4, 4);
    ref(1, 2) = ref(2, 1) = -0.5;
    CHECK((h - ref).norm() < 1e-15);
}

TEST_CASE("two-site H0 diagonal interaction") {
    const MatrixXc h = to_dense(build_h0({2, 1.0, -0.5, 1}));
    CHECK(std::abs(h(3, 3) - cplx{-0.5}) < 1e-15);
}

TEST_CASE("H0 MPO equals direct dense construction and conserves N") {
    for (int L : {3, 4, 6, 8})
        for (double Delta : {-0.5, 0.0, 1.5}) {
            const MatrixXc h = to_dense(build_h0({L, 1.0, Delta, L / 2}));
            const MatrixXc ref = dense_h0(L, 1.0, Delta);
            CHECK((h - ref).cwiseAbs().maxCoeff() < 1e-12);
            const MatrixXc n = dense_number(L);
            CHECK((h * n - n * h).norm() < 1e-12);
            CHECK((h - h.adjoint()).norm() < 1e-14);
        }
    CHECK(build_h0(ModelSpec::half_filled(8)).max_bond_dim() == 5);
}

TEST_CASE("measurement MPO") {
    MeasurementSpec m;
    m.M = 10.0;
    CHECK(to_dense(build_h_meas(4, m, {})).norm() == 0.0);
    const MatrixXc h = to_dense(build_h_meas(4, m, {{3, 1}}));
    for (int s = 0; s < 16; ++s) CHECK(std::abs(h(s, s) - cplx{0.0, 10.0 * (s & 1)}) < 1e-15);
    CHECK((h + h.adjoint()).norm() < 1e-14);
    CHECK_FALSE(build_h_meas(4, m, {{3, 1}}).hermitian());
    CHECK_THROWS_AS(build_h_meas(4, m, {{1, 1}, {1, -1}}), SpecError);
    CHECK_THROWS_AS(build_h_meas(4, m, {{4, 1}}), SpecError);
    CHECK_THROWS_AS(build_h_meas(4, m, {{0, 0}}), SpecError);
    const MatrixXc all = to_dense(build_h_meas(4, m, {{0, 1}, {1, 1}, {2, 1}, {3, 1}}));
    CHECK((all - cplx{0.0, 10.0} * dense_number(4)).norm() < 1e-13);
}

TEST_CASE("evolution MPO is H0 plus the measurement term") {
    const ModelSpec model{6, 1.0, -0.5, 3};
    MeasurementSpec m;
    m.M = 0.7;
    const std::vector<SiteSign> ev{{0, 1}, {2, -1}, {5, 1}};
    const MatrixXc full = to_dense(build_evolution_mpo(model, m, ev));
    const MatrixXc ref = to_dense(build_h0(model)) + to_dense(build_h_meas(6, m, ev));
    CHECK((full - ref).norm() < 1e-13);
    CHECK(build_evolution_mpo(model, m, ev).max_bond_dim() == 5);
    const MatrixXc n = dense_number(6);
    CHECK((full * n - n * full).norm() < 1e-12);
}

TEST_CASE("MPO sum and product") {
    const ModelSpec model{4, 1.0, 0.3, 2};
    MeasurementSpec m;
    m.M = 1.0;
    const Mpo h = build_h0(model), g = build_h_meas(4, m, {{1, 1}});
    CHECK((to_dense(mpo_sum(h, g)) - to_dense(h) - to_dense(g)).norm() < 1e-13);
    CHECK((to_dense(mpo_product(h, h)) - to_dense(h) * to_dense(h)).norm() < 1e-12);
}

TEST_CASE("model and measurement settings are validated") {
    CHECK_THROWS_AS((ModelSpec{1, 1.0, 0.0, 0}).validate(), SpecError);
    CHECK_THROWS_AS((ModelSpec{4, 0.0, 0.0, 2}).validate(), SpecError);
    MeasurementSpec m;
    m.P = 1.5;
    CHECK_THROWS_AS(m.validate(), SpecError);
    m.P = 0.5;
    m.T = 0.0;
    CHECK_THROWS_AS(m.validate(), SpecError);
    CHECK(sign_policy_from_string("instantaneous") == SignPolicy::Instantaneous);
    CHECK(to_string(SignPolicy::FixedAtIntervalStart) == "fixed-at-interval-start");
    CHECK_THROWS_AS(sign_policy_from_string("bogus"), SpecError);
}
