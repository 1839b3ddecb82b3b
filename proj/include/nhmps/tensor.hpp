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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nhmps {

using cplx = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

class ShapeError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Dense complex tensor, row-major (last index fastest).
class ComplexTensor {
   public:
    ComplexTensor() = default;
    explicit ComplexTensor(std::vector<std::size_t> shape);
    ComplexTensor(std::vector<std::size_t> shape, std::vector<cplx> data);

    static ComplexTensor from_matrix(const MatrixXc& m);
    static ComplexTensor from_vector(const VectorXc& v);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    cplx& operator()(std::initializer_list<std::size_t> idx);
    cplx operator()(std::initializer_list<std::size_t> idx) const;

    ComplexTensor reshaped(std::vector<std::size_t> shape) const;
    ComplexTensor permuted(const std::vector<std::size_t>& perm) const;
    ComplexTensor conj() const;

    // Rows = product of the first `split_axis` dimensions.
    MatrixXc as_matrix(std::size_t split_axis) const;
    VectorXc as_vector() const;

    double norm() const;
    bool all_finite() const;

   private:
    std::size_t offset(std::initializer_list<std::size_t> idx) const;

    std::vector<std::size_t> shape_;
    std::vector<cplx> data_;
};

// Contract a with b over the given (axis of a, axis of b) pairs. Free axes of a
// come first in the result, then free axes of b, each in original order.
ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       const std::vector<std::pair<std::size_t, std::size_t>>& axis_pairs);

struct SvdResult {
    ComplexTensor left;                  // (rows..., k)
    std::vector<double> singular_values; // descending
    ComplexTensor right;                 // (k, cols...)
    double discarded_weight = 0.0;
};

// Singular values below this fraction of the largest are never kept.
inline constexpr double kSingularNoiseFloor = 1e-14;

struct TruncationPolicy {
    std::size_t chi_max = 0;   // 0 means unbounded
    double weight_floor = 0.0; // relative squared weight allowed to drop from the tail
};

// Number of leading values to keep from a descending spectrum, plus the
// discarded squared weight relative to the total.
std::pair<std::size_t, double> truncation_cut(const std::vector<double>& descending,
                                              const TruncationPolicy& policy);

SvdResult truncated_svd(const ComplexTensor& t, std::size_t split_axis, std::size_t chi_max,
                        double weight_floor);

struct SvdMatrices {
    MatrixXc u;
    Eigen::VectorXd s;
    MatrixXc v; // m = u * diag(s) * v.adjoint()
};

// Full thin SVD with a condition diagnostic on failure.
SvdMatrices svd_thin(const MatrixXc& m);

struct QrResult {
    MatrixXc q; // rows x k, orthonormal columns
    MatrixXc r; // k x cols
};

QrResult qr_thin(const MatrixXc& m);

} // namespace nhmps
