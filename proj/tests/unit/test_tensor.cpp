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
#include <random>

#include "nhmps/tensor.hpp"

using namespace nhmps;

namespace {

MatrixXc random_matrix(int r, int c, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    MatrixXc m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = {g(gen), g(gen)};
    return m;
}

} // namespace

TEST_CASE("contract: identity on a basis vector") {
    const auto id = ComplexTensor::from_matrix(MatrixXc::Identity(2, 2));
    const auto v = ComplexTensor::from_vector(VectorXc::Unit(2, 0));
    const auto r = contract(id, v, {{1, 0}});
    CHECK(r.shape() == std::vector<std::size_t>{2});
    CHECK(std::abs(r({0}) - cplx{1.0}) < 1e-15);
    CHECK(std::abs(r({1})) < 1e-15);
}

TEST_CASE("contract: pauli x swaps amplitudes") {
    MatrixXc x(2, 2);
    x << 0, 1, 1, 0;
    VectorXc v(2);
    v << 0.6, 0.8;
    const auto r = contract(ComplexTensor::from_matrix(x), ComplexTensor::from_vector(v), {{1, 0}});
    CHECK(std::abs(r({0}) - cplx{0.8}) < 1e-15);
    CHECK(std::abs(r({1}) - cplx{0.6}) < 1e-15);
}

TEST_CASE("contract: full contraction with conjugate is the squared norm") {
    const auto t = ComplexTensor::from_matrix(random_matrix(3, 4, 1)).reshaped({3, 2, 2});
    const auto r = contract(t, t.conj(), {{0, 0}, {1, 1}, {2, 2}});
    CHECK(r.size() == 1);
    CHECK(std::abs(r.data()[0].imag()) < 1e-12);
    CHECK(r.data()[0].real() == doctest::Approx(t.norm() * t.norm()).epsilon(1e-12));
}

TEST_CASE("contract: mismatched dimensions throw") {
    ComplexTensor a({2, 3}), b({2, 3});
    CHECK_THROWS_AS(contract(a, b, {{1, 0}}), ShapeError);
}

TEST_CASE("contract agrees with matrix product after permutation") {
    const MatrixXc a = random_matrix(3, 5, 2), b = random_matrix(4, 5, 3);
    const auto r = contract(ComplexTensor::from_matrix(a), ComplexTensor::from_matrix(b), {{1, 1}});
    CHECK((r.as_matrix(1) - a * b.transpose()).norm() < 1e-12);
}

TEST_CASE("truncated_svd: rank-1 matrix keeps one value") {
    VectorXc u = random_matrix(6, 1, 4).col(0), v = random_matrix(5, 1, 5).col(0);
    const MatrixXc m = u * v.transpose();
    const auto r = truncated_svd(ComplexTensor::from_matrix(m), 1, 8, 0.0);
    CHECK(r.singular_values.size() == 1);
    CHECK(r.discarded_weight == doctest::Approx(0.0));
}

TEST_CASE("truncated_svd: identity with chi 2 discards half the weight") {
    const auto r = truncated_svd(ComplexTensor::from_matrix(MatrixXc::Identity(4, 4)), 1, 2, 0.0);
    CHECK(r.singular_values.size() == 2);
    CHECK(r.discarded_weight == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("truncated_svd: full rank round trip and isometries") {
    const MatrixXc m = random_matrix(8, 8, 6);
    const auto r = truncated_svd(ComplexTensor::from_matrix(m), 1, 8, 0.0);
    REQUIRE(r.singular_values.size() == 8);
    const MatrixXc u = r.left.as_matrix(1), vh = r.right.as_matrix(1);
    Eigen::VectorXd s(8);
    for (int i = 0; i < 8; ++i) s(i) = r.singular_values[i];
    CHECK((u * s.asDiagonal() * vh - m).norm() < 1e-12);
    CHECK((u.adjoint() * u - MatrixXc::Identity(8, 8)).norm() < 1e-12);
    CHECK((vh * vh.adjoint() - MatrixXc::Identity(8, 8)).norm() < 1e-12);
    for (int i = 1; i < 8; ++i) CHECK(r.singular_values[i] <= r.singular_values[i - 1]);
}

TEST_CASE("truncated_svd: rank-3 tensor split keeps the outer shapes") {
    const auto t = ComplexTensor::from_matrix(random_matrix(4, 6, 7)).reshaped({2, 2, 6});
    const auto r = truncated_svd(t, 2, 16, 0.0);
    CHECK(r.left.shape() == std::vector<std::size_t>{2, 2, 4});
    CHECK(r.right.shape() == std::vector<std::size_t>{4, 6});
}

TEST_CASE("truncation_cut: noise floor and weight floor") {
    auto [k0, w0] = truncation_cut({1.0, 1e-15}, {});
    CHECK(k0 == 1);
    CHECK(w0 == doctest::Approx(1e-30).epsilon(1e-3));
    auto [k1, w1] = truncation_cut({1.0, 0.1, 0.01}, {0, 2e-4});
    CHECK(k1 == 2);
    CHECK(w1 == doctest::Approx(1e-4 / 1.0101).epsilon(1e-12));
    auto [k2, w2] = truncation_cut({1.0, 0.1, 0.01}, {1, 0.0});
    CHECK(k2 == 1);
    CHECK(w2 == doctest::Approx(0.0101 / 1.0101).epsilon(1e-12));
}

TEST_CASE("qr_thin reconstructs and is orthonormal") {
    const MatrixXc m = random_matrix(7, 3, 8);
    const auto qr = qr_thin(m);
    CHECK(qr.q.cols() == 3);
    CHECK((qr.q * qr.r - m).norm() < 1e-12);
    CHECK((qr.q.adjoint() * qr.q - MatrixXc::Identity(3, 3)).norm() < 1e-12);
    const auto wide = qr_thin(random_matrix(2, 5, 9));
    CHECK(wide.q.cols() == 2);
}

TEST_CASE("tensor invariants") {
    CHECK_THROWS_AS(ComplexTensor({2, 2}, std::vector<cplx>(3)), ShapeError);
    ComplexTensor t({2});
    t({0}) = {std::nan(""), 0.0};
    CHECK_FALSE(t.all_finite());
    const auto p = ComplexTensor::from_matrix(random_matrix(2, 3, 10)).permuted({1, 0});
    CHECK(p.shape() == std::vector<std::size_t>{3, 2});
}
