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

#include "nhmps/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nhmps {

namespace {

std::size_t product(const std::vector<std::size_t>& dims, std::size_t begin, std::size_t end) {
    std::size_t p = 1;
    for (std::size_t i = begin; i < end; ++i) p *= dims[i];
    return p;
}

std::string shape_string(const std::vector<std::size_t>& s) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ")";
    return os.str();
}

} // namespace

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(product(shape_, 0, shape_.size()), cplx{0.0, 0.0}) {}

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (product(shape_, 0, shape_.size()) != data_.size())
        throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string(shape_));
}

ComplexTensor ComplexTensor::from_matrix(const MatrixXc& m) {
    ComplexTensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) t.data_[i * m.cols() + j] = m(i, j);
    return t;
}

ComplexTensor ComplexTensor::from_vector(const VectorXc& v) {
    return ComplexTensor({static_cast<std::size_t>(v.size())},
                         std::vector<cplx>(v.data(), v.data() + v.size()));
}

std::size_t ComplexTensor::offset(std::initializer_list<std::size_t> idx) const {
    if (idx.size() != shape_.size()) throw ShapeError("index rank mismatch");
    std::size_t off = 0;
    std::size_t axis = 0;
    for (std::size_t i : idx) {
        if (i >= shape_[axis]) throw ShapeError("index out of range");
        off = off * shape_[axis] + i;
        ++axis;
    }
    return off;
}

cplx& ComplexTensor::operator()(std::initializer_list<std::size_t> idx) { return data_[offset(idx)]; }

cplx ComplexTensor::operator()(std::initializer_list<std::size_t> idx) const {
    return data_[offset(idx)];
}

ComplexTensor ComplexTensor::reshaped(std::vector<std::size_t> shape) const {
    return ComplexTensor(std::move(shape), data_);
}

ComplexTensor ComplexTensor::permuted(const std::vector<std::size_t>& perm) const {
    const std::size_t r = rank();
    if (perm.size() != r) throw ShapeError("permutation rank mismatch");
    std::vector<std::size_t> new_shape(r);
    for (std::size_t i = 0; i < r; ++i) new_shape[i] = shape_.at(perm[i]);

    std::vector<std::size_t> old_strides(r, 1);
    for (std::size_t i = r; i-- > 1;) old_strides[i - 1] = old_strides[i] * shape_[i];

    ComplexTensor out(new_shape);
    std::vector<std::size_t> idx(r, 0);
    for (std::size_t lin = 0; lin < data_.size(); ++lin) {
        std::size_t src = 0;
        for (std::size_t i = 0; i < r; ++i) src += idx[i] * old_strides[perm[i]];
        out.data_[lin] = data_[src];
        for (std::size_t i = r; i-- > 0;) {
            if (++idx[i] < new_shape[i]) break;
            idx[i] = 0;
        }
    }
    return out;
}

ComplexTensor ComplexTensor::conj() const {
    ComplexTensor out(*this);
    for (auto& z : out.data_) z = std::conj(z);
    return out;
}

MatrixXc ComplexTensor::as_matrix(std::size_t split_axis) const {
    if (split_axis > rank()) throw ShapeError("split axis beyond tensor rank");
    const auto rows = static_cast<Eigen::Index>(product(shape_, 0, split_axis));
    const auto cols = static_cast<Eigen::Index>(product(shape_, split_axis, rank()));
    MatrixXc m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data_[i * cols + j];
    return m;
}

VectorXc ComplexTensor::as_vector() const {
    return Eigen::Map<const VectorXc>(data_.data(), static_cast<Eigen::Index>(data_.size()));
}

double ComplexTensor::norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

bool ComplexTensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       const std::vector<std::pair<std::size_t, std::size_t>>& axis_pairs) {
    std::vector<bool> a_used(a.rank(), false), b_used(b.rank(), false);
    for (auto [ia, ib] : axis_pairs) {
        if (ia >= a.rank() || ib >= b.rank()) throw ShapeError("contraction axis out of range");
        if (a_used[ia] || b_used[ib]) throw ShapeError("contraction axis repeated");
        if (a.dim(ia) != b.dim(ib))
            throw ShapeError("contraction dimension mismatch: " + std::to_string(a.dim(ia)) + " vs " +
                             std::to_string(b.dim(ib)));
        a_used[ia] = b_used[ib] = true;
    }

    std::vector<std::size_t> a_perm, b_perm, out_shape;
    for (std::size_t i = 0; i < a.rank(); ++i)
        if (!a_used[i]) {
            a_perm.push_back(i);
            out_shape.push_back(a.dim(i));
        }
    for (auto [ia, ib] : axis_pairs) {
        a_perm.push_back(ia);
        b_perm.push_back(ib);
    }
    for (std::size_t i = 0; i < b.rank(); ++i)
        if (!b_used[i]) {
            b_perm.push_back(i);
            out_shape.push_back(b.dim(i));
        }

    const std::size_t a_free = a.rank() - axis_pairs.size();
    const MatrixXc am = a.permuted(a_perm).as_matrix(a_free);
    const MatrixXc bm = b.permuted(b_perm).as_matrix(axis_pairs.size());
    const MatrixXc cm = am * bm;

    ComplexTensor out(out_shape);
    for (Eigen::Index i = 0; i < cm.rows(); ++i)
        for (Eigen::Index j = 0; j < cm.cols(); ++j) out.data()[i * cm.cols() + j] = cm(i, j);
    return out;
}

std::pair<std::size_t, double> truncation_cut(const std::vector<double>& s,
                                              const TruncationPolicy& policy) {
    if (s.empty()) return {0, 0.0};
    double total = 0.0;
    for (double x : s) total += x * x;
    if (total == 0.0) return {1, 0.0};

    std::size_t keep = 0;
    while (keep < s.size() && s[keep] > kSingularNoiseFloor * s[0]) ++keep;
    keep = std::max<std::size_t>(keep, 1);
    if (policy.chi_max > 0) keep = std::min(keep, policy.chi_max);

    if (policy.weight_floor > 0.0) {
        double tail = 0.0;
        for (std::size_t i = keep; i < s.size(); ++i) tail += s[i] * s[i];
        while (keep > 1 && (tail + s[keep - 1] * s[keep - 1]) / total < policy.weight_floor) {
            tail += s[keep - 1] * s[keep - 1];
            --keep;
        }
    }

    double dropped = 0.0;
    for (std::size_t i = keep; i < s.size(); ++i) dropped += s[i] * s[i];
    return {keep, dropped / total};
}

SvdMatrices svd_thin(const MatrixXc& m) {
    SvdMatrices out;
    if (m.size() == 0) {
        out.u = MatrixXc::Zero(m.rows(), 0);
        out.s = Eigen::VectorXd::Zero(0);
        out.v = MatrixXc::Zero(m.cols(), 0);
        return out;
    }
    if (!m.allFinite()) throw NumericalError("SVD input contains non-finite entries");
    Eigen::BDCSVD<MatrixXc> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        Eigen::JacobiSVD<MatrixXc> jac(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (jac.info() != Eigen::Success) {
            std::ostringstream os;
            os << "SVD failed to converge on " << m.rows() << "x" << m.cols()
               << " matrix (Frobenius norm " << m.norm() << ", max |entry| " << m.cwiseAbs().maxCoeff()
               << ")";
            throw NumericalError(os.str());
        }
        out.u = jac.matrixU();
        out.s = jac.singularValues();
        out.v = jac.matrixV();
        return out;
    }
    out.u = svd.matrixU();
    out.s = svd.singularValues();
    out.v = svd.matrixV();
    return out;
}

SvdResult truncated_svd(const ComplexTensor& t, std::size_t split_axis, std::size_t chi_max,
                        double weight_floor) {
    if (chi_max < 1) throw std::invalid_argument("chi_max must be at least 1");
    if (weight_floor < 0.0) throw std::invalid_argument("weight_floor must be non-negative");

    const MatrixXc m = t.as_matrix(split_axis);
    const SvdMatrices svd = svd_thin(m);
    std::vector<double> s(svd.s.data(), svd.s.data() + svd.s.size());
    auto [keep, discarded] = truncation_cut(s, {chi_max, weight_floor});
    keep = std::min<std::size_t>(keep, s.size());
    const auto k = static_cast<Eigen::Index>(keep);

    std::vector<std::size_t> left_shape(t.shape().begin(), t.shape().begin() + split_axis);
    left_shape.push_back(keep);
    std::vector<std::size_t> right_shape{keep};
    right_shape.insert(right_shape.end(), t.shape().begin() + split_axis, t.shape().end());

    SvdResult out;
    out.left = ComplexTensor::from_matrix(svd.u.leftCols(k)).reshaped(left_shape);
    out.right = ComplexTensor::from_matrix(svd.v.leftCols(k).adjoint()).reshaped(right_shape);
    out.singular_values.assign(s.begin(), s.begin() + keep);
    out.discarded_weight = discarded;
    return out;
}

QrResult qr_thin(const MatrixXc& m) {
    const Eigen::Index k = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<MatrixXc> qr(m);
    QrResult out;
    out.q = qr.householderQ() * MatrixXc::Identity(m.rows(), k);
    out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return out;
}

} // namespace nhmps
