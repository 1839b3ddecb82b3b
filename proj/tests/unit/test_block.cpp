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

#include <random>

#include "nhmps/block.hpp"

using namespace nhmps;

namespace {

void fill_random(BlockMatrix& m, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    for (std::size_t c = 0; c < m.num_blocks(); ++c)
        for (Eigen::Index k = 0; k < m.block(c).size(); ++k) m.block(c).data()[k] = {g(gen), g(gen)};
}

} // namespace

TEST_CASE("space: sorted sectors, lookup and offsets") {
    Space s({{2, 3}, {0, 1}, {1, 2}});
    CHECK(s[0].charge == 0);
    CHECK(s.find(1) == 1);
    CHECK(s.find(5) == -1);
    CHECK(s.dim() == 6);
    CHECK(s.offset(2) == 3);
    CHECK_THROWS_AS(Space({{1, 1}, {1, 2}}), ShapeError);
    CHECK_THROWS_AS(Space({{1, 0}}), ShapeError);
}

TEST_CASE("block product agrees with dense product") {
    Space a({{0, 2}, {1, 3}, {2, 1}});
    Space b({{0, 1}, {1, 2}, {2, 2}});
    Space c({{1, 2}, {2, 3}});
    BlockMatrix x(a, b, 0), y(b, c, -1);
    fill_random(x, 1);
    fill_random(y, 2);
    const BlockMatrix z = x * y;
    CHECK(z.flux() == -1);
    CHECK((z.to_dense() - x.to_dense() * y.to_dense()).norm() < 1e-12);
}

TEST_CASE("adjoint, norm, inner and scaled addition") {
    Space a({{0, 2}, {1, 3}});
    Space b({{1, 2}, {2, 2}});
    BlockMatrix x(a, b, -1), y(a, b, -1);
    fill_random(x, 3);
    fill_random(y, 4);
    CHECK((x.adjoint().to_dense() - x.to_dense().adjoint()).norm() < 1e-14);
    CHECK(x.norm() == doctest::Approx(x.to_dense().norm()));
    const cplx ip = inner(x, y);
    const cplx ref = (x.to_dense().conjugate().cwiseProduct(y.to_dense())).sum();
    CHECK(std::abs(ip - ref) < 1e-12);
    BlockMatrix z = x;
    z.add_scaled({0.5, 1.0}, y);
    CHECK((z.to_dense() - (x.to_dense() + cplx{0.5, 1.0} * y.to_dense())).norm() < 1e-12);
    BlockMatrix w(a, b, 0);
    CHECK_THROWS_AS(w += x, ShapeError);
}

TEST_CASE("pack and unpack round trip") {
    Space a({{0, 2}, {1, 3}});
    std::vector<BlockMatrix> parts{BlockMatrix(a, a, 0), BlockMatrix(a, a, -1)};
    fill_random(parts[0], 5);
    fill_random(parts[1], 6);
    CHECK(packed_size(parts) == 4 + 9 + 6);
    const VectorXc v = pack(parts);
    std::vector<BlockMatrix> back{BlockMatrix(a, a, 0), BlockMatrix(a, a, -1)};
    unpack(v, back);
    CHECK((back[1].to_dense() - parts[1].to_dense()).norm() == 0.0);
    CHECK_THROWS_AS(unpack(VectorXc(3), back), ShapeError);
}

TEST_CASE("mismatched inner spaces throw") {
    Space a({{0, 2}}), b({{0, 3}});
    CHECK_THROWS_AS(BlockMatrix(a, a, 0) * BlockMatrix(b, b, 0), ShapeError);
}
