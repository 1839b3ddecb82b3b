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

#include <cstdint>
#include <vector>

#include <Eigen/Sparse>

#include "nhmps/krylov.hpp"
#include "nhmps/lattice.hpp"

namespace nhmps {

inline constexpr int kMaxExactSites = 14;

// Fixed-filling occupation basis, bitstrings ascending (site 0 = most significant bit).
class SectorBasis {
   public:
    SectorBasis(int L, int filling);

    int length() const { return L_; }
    int filling() const { return filling_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(states_.size()); }
    std::uint32_t state(Eigen::Index i) const { return states_[static_cast<std::size_t>(i)]; }
    Eigen::Index index_of(std::uint32_t s) const; // -1 if absent
    int occupation(Eigen::Index i, int site) const {
        return static_cast<int>((states_[static_cast<std::size_t>(i)] >> (L_ - 1 - site)) & 1u);
    }

    VectorXc embed(const VectorXc& v) const;   // into the full 2^L space
    VectorXc restrict(const VectorXc& full) const;

   private:
    int L_, filling_;
    std::vector<std::uint32_t> states_;
};

// H0 restricted to a sector: hopping as a real sparse matrix plus the diagonal.
class SectorHamiltonian {
   public:
    explicit SectorHamiltonian(const ModelSpec& model);

    const SectorBasis& basis() const { return basis_; }
    const ModelSpec& model() const { return model_; }
    const Eigen::VectorXd& diagonal() const { return diag_; }

    // y = (H0 + diag(extra)) x. The parallel and serial versions are bit-identical.
    void apply(const VectorXc& x, VectorXc& y, const VectorXc* extra = nullptr) const;
    void apply_serial(const VectorXc& x, VectorXc& y, const VectorXc* extra = nullptr) const;

    // i M sum sign_x n_x as a diagonal in this basis.
    VectorXc measurement_diagonal(const MeasurementSpec& spec, const std::vector<SiteSign>& events) const;

    MatrixXc to_dense() const;

   private:
    ModelSpec model_;
    SectorBasis basis_;
    Eigen::SparseMatrix<double, Eigen::RowMajor> hop_;
    Eigen::VectorXd diag_;
};

struct DenseGroundState {
    VectorXc vector; // sector basis, normalized
    double energy = 0.0;
    double residual = 0.0;
};

DenseGroundState dense_ground_state(const SectorHamiltonian& h);
DenseGroundState dense_ground_state(const ModelSpec& model);

std::vector<double> dense_densities(const SectorBasis& basis, const VectorXc& v);
// Von Neumann entropy (bits) of sites [0, cut).
double dense_entropy(const SectorBasis& basis, const VectorXc& v, int cut);

// One renormalized Krylov substep exp(-i dt (H0 + extra)) v.
void dense_step(const SectorHamiltonian& h, VectorXc& v, double dt, const VectorXc* extra, bool renormalize,
                const KrylovOptions& opts = {30, 1e-12});

} // namespace nhmps
