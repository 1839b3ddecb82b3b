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

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "nhmps/block.hpp"
#include "nhmps/lattice.hpp"

namespace nhmps {

// Rank-3 site tensor stored as one block matrix per occupation sigma.
// m[s] maps left bond -> right bond with flux -s (bond labels count particles to the left).
struct SiteTensor {
    std::array<BlockMatrix, 2> m;

    SiteTensor() = default;
    SiteTensor(const Space& left, const Space& right)
        : m{BlockMatrix(left, right, 0), BlockMatrix(left, right, -1)} {}

    const Space& left() const { return m[0].rows(); }
    const Space& right() const { return m[0].cols(); }
    double norm() const;
    std::vector<BlockMatrix> parts() const { return {m[0], m[1]}; }
    void assign(const std::vector<BlockMatrix>& p) { m = {p[0], p[1]}; }
};

class MpsState {
   public:
    static constexpr int kNoCenter = -1;

    MpsState() = default;
    MpsState(std::vector<SiteTensor> sites, int filling, int center);

    int length() const { return static_cast<int>(sites_.size()); }
    int filling() const { return filling_; }
    int center() const { return center_; }
    void set_center(int c) { center_ = c; }

    SiteTensor& site(int i) { return sites_[static_cast<std::size_t>(i)]; }
    const SiteTensor& site(int i) const { return sites_[static_cast<std::size_t>(i)]; }

    // Bond b sits left of site b; bonds 0 and L are the 1-dimensional boundaries.
    const Space& bond(int b) const;
    std::vector<int> bond_dims() const;
    int max_bond_dim() const;

    // Left-orthonormalize sites [0, c) and right-orthonormalize (c, L).
    void canonicalize(int c);
    void move_center(int c);

    double norm() const;
    void scale(cplx s);
    void normalize();

    // Largest deviation from the isometry conditions implied by center().
    double canonical_error() const;

   private:
    std::vector<SiteTensor> sites_;
    int filling_ = 0;
    int center_ = kNoCenter;
};

MpsState product_state(const std::vector<int>& occupations);

std::vector<double> local_densities(const MpsState& psi);

// Schmidt values across bond `cut` (1..L-1), normalized, descending.
std::vector<double> schmidt_values(const MpsState& psi, int cut);
// Von Neumann entropy in bits (log base 2).
double entanglement_entropy(const MpsState& psi, int cut);
std::vector<double> entropy_profile(const MpsState& psi); // cuts 1..L-1
double entropy_bits(const std::vector<double>& schmidt);

MpsState renormalize(MpsState psi);

class NormCollapse : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

cplx overlap(const MpsState& bra, const MpsState& ket); // <bra|ket>
cplx expectation(const MpsState& psi, const Mpo& op);   // <psi|op|psi>, not normalized

VectorXc to_dense(const MpsState& psi); // 2^L, site 0 most significant

struct DenseImport {
    MpsState state;
    double discarded_weight = 0.0;
};
// The vector must live in a single particle-number sector.
DenseImport from_dense(const VectorXc& v, int L, int chi_max);

// QR-type splitting helpers shared by the sweep algorithms.
struct LeftSplit {
    SiteTensor q;   // left isometry
    BlockMatrix r;  // new bond x old right bond
};
struct RightSplit {
    BlockMatrix r;  // old left bond x new bond
    SiteTensor q;   // right isometry
};
LeftSplit split_left(const SiteTensor& c);
RightSplit split_right(const SiteTensor& c);
SiteTensor multiply_left(const BlockMatrix& r, const SiteTensor& a);  // r * A[s]
SiteTensor multiply_right(const SiteTensor& a, const BlockMatrix& r); // A[s] * r

// Two-site wavefunction theta[2*s1+s2] = A1[s1] * A2[s2].
using TwoSite = std::array<BlockMatrix, 4>;
TwoSite merge(const SiteTensor& a, const SiteTensor& b);

struct TwoSiteSplit {
    SiteTensor left;
    SiteTensor right;
    std::vector<double> singular_values; // kept, descending, not normalized
    double discarded_weight = 0.0;
};
// absorb_right: singular values go into the right tensor (center moves right).
TwoSiteSplit split_two_site(const TwoSite& theta, const TruncationPolicy& policy, bool absorb_right);

// Versioned binary snapshot.
void write_snapshot(std::ostream& os, const MpsState& psi);
MpsState read_snapshot(std::istream& is);
void save_snapshot(const std::string& path, const MpsState& psi);
MpsState load_snapshot(const std::string& path);

} // namespace nhmps
