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

#include <memory>
#include <vector>

#include "nhmps/tensor.hpp"

namespace nhmps {

// One U(1) sector of a bond: basis states carrying particle-number label `charge`.
struct Sector {
    int charge = 0;
    int dim = 0;
    friend bool operator==(const Sector&, const Sector&) = default;
};

// Graded vector space; sectors sorted by charge, unique, all dims positive.
class Space {
   public:
    Space() = default;
    explicit Space(std::vector<Sector> sectors);

    static Space single(int charge, int dim = 1) { return Space({{charge, dim}}); }

    const std::vector<Sector>& sectors() const { return data_ ? data_->sectors : empty(); }
    std::size_t num_sectors() const { return data_ ? data_->sectors.size() : 0; }
    const Sector& operator[](std::size_t i) const { return data_->sectors[i]; }
    int find(int charge) const; // sector index or -1
    int dim() const { return data_ ? data_->dim : 0; }
    int offset(std::size_t sector) const; // position of a sector's first state in dense order

    // Copies share storage, so equality is usually a pointer check.
    friend bool operator==(const Space& a, const Space& b) {
        return a.data_ == b.data_ || a.sectors() == b.sectors();
    }

   private:
    struct Data {
        std::vector<Sector> sectors;
        int dim = 0;
    };
    static const std::vector<Sector>& empty();
    std::shared_ptr<const Data> data_;
};

// Charge-conserving matrix between graded spaces: only blocks with
// row charge == column charge + flux are stored.
class BlockMatrix {
   public:
    BlockMatrix() = default;
    BlockMatrix(Space rows, Space cols, int flux); // zero-initialized
    // Same structure, block contents left uninitialized.
    static BlockMatrix uninitialized(Space rows, Space cols, int flux);

    const Space& rows() const { return rows_; }
    const Space& cols() const { return cols_; }
    int flux() const { return flux_; }

    // Block attached to column sector c; 0-row matrix when no row sector matches.
    MatrixXc& block(std::size_t c) { return blocks_[c]; }
    const MatrixXc& block(std::size_t c) const { return blocks_[c]; }
    int row_sector(std::size_t c) const { return row_of_col_[c]; }
    std::size_t num_blocks() const { return blocks_.size(); }

    std::size_t num_elements() const;
    void set_zero();
    BlockMatrix adjoint() const;
    double norm() const;
    MatrixXc to_dense() const;

    BlockMatrix& operator*=(cplx s);
    BlockMatrix& operator+=(const BlockMatrix& other);
    // this += s * other
    void add_scaled(cplx s, const BlockMatrix& other);

   private:
    Space rows_, cols_;
    int flux_ = 0;
    std::vector<MatrixXc> blocks_;
    std::vector<int> row_of_col_;
};

BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b);
inline BlockMatrix operator+(BlockMatrix a, const BlockMatrix& b) { return a += b; }
// sum_ij conj(a_ij) b_ij
cplx inner(const BlockMatrix& a, const BlockMatrix& b);

// Fixed-structure list of block matrices (e.g. one per physical index),
// flattened to a contiguous vector for Krylov routines.
std::size_t packed_size(const std::vector<BlockMatrix>& parts);
VectorXc pack(const std::vector<BlockMatrix>& parts);
void unpack(const VectorXc& v, std::vector<BlockMatrix>& parts);

} // namespace nhmps
