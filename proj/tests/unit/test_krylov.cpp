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
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "nhmps/krylov.hpp"

using namespace nhmps;

namespace {

MatrixXc random_matrix(int n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    MatrixXc m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = {g(gen), g(gen)};
    return m;
}

LinearOp dense_op(const MatrixXc& m) {
    return [m](const VectorXc& x) -> VectorXc { return m * x; };
}

} // namespace

TEST_CASE("zero generator leaves the vector unchanged") {
    VectorXc v = random_matrix(5, 1).col(0);
    const auto r = krylov_expm_apply(dense_op(MatrixXc::Zero(5, 5)), v, 0.005);
    CHECK((r - v).norm() < 1e-14);
}

TEST_CASE("anti-hermitian number term amplifies the occupied amplitude") {
    const double M = 10.0, t = 0.3;
    MatrixXc op = MatrixXc::Zero(2, 2);
    op(1, 1) = cplx{0.0, M};
    VectorXc v(2);
    v << 0.0, 1.0;
    const auto r = krylov_expm_apply(dense_op(op), v, t);
    CHECK(std::abs(r(1) - std::exp(M * t)) < 1e-10 * std::exp(M * t));
    CHECK(std::abs(r(0)) < 1e-14);
}

TEST_CASE("pauli x for time pi gives minus the input") {
    MatrixXc x(2, 2);
    x << 0, 1, 1, 0;
    VectorXc v(2);
    v << 1.0, 0.0;
    const auto r = krylov_expm_apply(dense_op(x), v, std::numbers::pi);
    // exp(-i pi X) = cos(pi) - i sin(pi) X
    CHECK(std::abs(r(0) - cplx{-1.0, 0.0}) < 1e-10);
    CHECK(std::abs(r(1)) < 1e-10);
    CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random non-hermitian 16x16 matches the dense exponential") {
    for (unsigned seed = 0; seed < 5; ++seed) {
        const MatrixXc a = random_matrix(16, seed + 11) * 0.3;
        const VectorXc v = random_matrix(16, seed + 40).col(0);
        for (cplx dt : {cplx{0.1, 0.0}, cplx{0.7, 0.0}, cplx{0.2, -0.1}}) {
            const VectorXc ref = (cplx{0.0, -1.0} * dt * a).exp() * v;
            const VectorXc got = krylov_expm_apply(dense_op(a), v, dt);
            CHECK((got - ref).norm() / ref.norm() < 1e-8);
        }
    }
}

TEST_CASE("hermitian generator preserves the norm") {
    MatrixXc a = random_matrix(40, 3);
    a = (a + a.adjoint()).eval();
    const VectorXc v = random_matrix(40, 4).col(0).normalized();
    for (double dt : {0.01, 0.5, 2.0}) {
        const auto r = krylov_expm_apply(dense_op(a), v, dt);
        CHECK(std::abs(r.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("krylov dimension 1 still converges by sub-stepping or reports failure") {
    MatrixXc a = random_matrix(6, 5);
    const VectorXc v = random_matrix(6, 6).col(0);
    try {
        const VectorXc got = krylov_expm_apply(dense_op(a), v, 0.3, {2, 1e-10});
        const VectorXc ref = (cplx{0.0, -0.3} * a).exp() * v;
        CHECK((got - ref).norm() / ref.norm() < 1e-7);
    } catch (const ConvergenceError& e) {
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("lanczos ground state matches dense eigensolver") {
    MatrixXc a = random_matrix(60, 7);
    a = (a + a.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(a);
    const auto gs = lanczos_ground(dense_op(a), random_matrix(60, 8).col(0));
    CHECK(gs.value == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));
    CHECK(std::abs(std::abs(gs.vector.dot(es.eigenvectors().col(0))) - 1.0) < 1e-8);
    CHECK(gs.residual < 1e-10);
}

TEST_CASE("lanczos on a one-dimensional space") {
    MatrixXc a(1, 1);
    a(0, 0) = -2.5;
    VectorXc v(1);
    v(0) = 1.0;
    CHECK(lanczos_ground(dense_op(a), v).value == doctest::Approx(-2.5));
}
