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

#include "nhmps/block.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nhmps {

Space::Space(std::vector<Sector> sectors) {
    auto d = std::make_shared<Data>();
    d->sectors = std::move(sectors);
    auto& sec = d->sectors;
    std::sort(sec.begin(), sec.end(), [](const Sector& a, const Sector& b) { return a.charge < b.charge; });
    for (std::size_t i = 0; i < sec.size(); ++i) {
        if (sec[i].dim <= 0) throw ShapeError("sector dimension must be positive");
        if (i > 0 && sec[i].charge == sec[i - 1].charge)
            throw ShapeError("duplicate sector charge " + std::to_string(sec[i].charge));
        d->dim += sec[i].dim;
    }
    data_ = std::move(d);
}

const std::vector<Sector>& Space::empty() {
    static const std::vector<Sector> none;
    return none;
}

int Space::find(int charge) const {
    const auto& sec = sectors();
    auto it = std::lower_bound(sec.begin(), sec.end(), charge,
                               [](const Sector& s, int q) { return s.charge < q; });
    if (it == sec.end() || it->charge != charge) return -1;
    return static_cast<int>(it - sec.begin());
}

int Space::offset(std::size_t sector) const {
    int d = 0;
    for (std::size_t i = 0; i < sector; ++i) d += (*this)[i].dim;
    return d;
}

BlockMatrix::BlockMatrix(Space rows, Space cols, int flux) : BlockMatrix(uninitialized(std::move(rows), std::move(cols), flux)) {
    set_zero();
}

BlockMatrix BlockMatrix::uninitialized(Space rows, Space cols, int flux) {
    BlockMatrix m;
    m.rows_ = std::move(rows);
    m.cols_ = std::move(cols);
    m.flux_ = flux;
    const std::size_t n = m.cols_.num_sectors();
    m.blocks_.resize(n);
    m.row_of_col_.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        const int r = m.rows_.find(m.cols_[c].charge + flux);
        m.row_of_col_[c] = r;
        m.blocks_[c].resize(r < 0 ? 0 : m.rows_[r].dim, m.cols_[c].dim);
    }
    return m;
}

std::size_t BlockMatrix::num_elements() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += static_cast<std::size_t>(b.size());
    return n;
}

void BlockMatrix::set_zero() {
    for (auto& b : blocks_) b.setZero();
}

BlockMatrix BlockMatrix::adjoint() const {
    BlockMatrix out = uninitialized(cols_, rows_, -flux_);
    for (std::size_t c = 0; c < blocks_.size(); ++c) {
        const int r = row_of_col_[c];
        if (r < 0) continue;
        out.blocks_[r] = blocks_[c].adjoint();
    }
    return out;
}

double BlockMatrix::norm() const {
    double s = 0.0;
    for (const auto& b : blocks_) s += b.squaredNorm();
    return std::sqrt(s);
}

MatrixXc BlockMatrix::to_dense() const {
    MatrixXc d = MatrixXc::Zero(rows_.dim(), cols_.dim());
    for (std::size_t c = 0; c < blocks_.size(); ++c) {
        const int r = row_of_col_[c];
        if (r < 0) continue;
        d.block(rows_.offset(r), cols_.offset(c), rows_[r].dim, cols_[c].dim) = blocks_[c];
    }
    return d;
}

BlockMatrix& BlockMatrix::operator*=(cplx s) {
    for (auto& b : blocks_) b *= s;
    return *this;
}

BlockMatrix& BlockMatrix::operator+=(const BlockMatrix& other) {
    add_scaled(1.0, other);
    return *this;
}

void BlockMatrix::add_scaled(cplx s, const BlockMatrix& other) {
    if (other.flux_ != flux_ || !(other.rows_ == rows_) || !(other.cols_ == cols_))
        throw ShapeError("block matrix structure mismatch in addition");
    for (std::size_t c = 0; c < blocks_.size(); ++c) blocks_[c].noalias() += s * other.blocks_[c];
}

BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
    if (!(a.cols() == b.rows())) throw ShapeError("block matrix product: inner spaces differ");
    BlockMatrix out = BlockMatrix::uninitialized(a.rows(), b.cols(), a.flux() + b.flux());
    for (std::size_t c = 0; c < b.num_blocks(); ++c) {
        MatrixXc& oc = out.block(c);
        if (oc.size() == 0) continue;
        const int mid = b.row_sector(c);
        const MatrixXc* ab = mid < 0 ? nullptr : &a.block(static_cast<std::size_t>(mid));
        if (!ab || ab->rows() == 0 || ab->cols() == 0) {
            oc.setZero();
            continue;
        }
        oc.noalias() = *ab * b.block(c);
    }
    return out;
}

cplx inner(const BlockMatrix& a, const BlockMatrix& b) {
    if (a.flux() != b.flux() || !(a.rows() == b.rows()) || !(a.cols() == b.cols()))
        throw ShapeError("block matrix structure mismatch in inner product");
    cplx s = 0.0;
    for (std::size_t c = 0; c < a.num_blocks(); ++c) s += a.block(c).cwiseProduct(b.block(c).conjugate()).sum();
    return std::conj(s);
}

std::size_t packed_size(const std::vector<BlockMatrix>& parts) {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.num_elements();
    return n;
}

VectorXc pack(const std::vector<BlockMatrix>& parts) {
    VectorXc v(static_cast<Eigen::Index>(packed_size(parts)));
    Eigen::Index pos = 0;
    for (const auto& p : parts)
        for (std::size_t c = 0; c < p.num_blocks(); ++c) {
            const MatrixXc& b = p.block(c);
            v.segment(pos, b.size()) = Eigen::Map<const VectorXc>(b.data(), b.size());
            pos += b.size();
        }
    return v;
}

void unpack(const VectorXc& v, std::vector<BlockMatrix>& parts) {
    if (static_cast<std::size_t>(v.size()) != packed_size(parts))
        throw ShapeError("packed vector length does not match block structure");
    Eigen::Index pos = 0;
    for (auto& p : parts)
        for (std::size_t c = 0; c < p.num_blocks(); ++c) {
            MatrixXc& b = p.block(c);
            Eigen::Map<VectorXc>(b.data(), b.size()) = v.segment(pos, b.size());
            pos += b.size();
        }
}

} // namespace nhmps
