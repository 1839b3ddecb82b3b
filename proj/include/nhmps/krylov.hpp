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

#include <functional>
#include <stdexcept>

#include "nhmps/tensor.hpp"

namespace nhmps {

// y = Op x. The operator need not be Hermitian.
using LinearOp = std::function<VectorXc(const VectorXc&)>;

class ConvergenceError : public std::runtime_error {
   public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

   private:
    double residual_;
};

struct KrylovOptions {
    int krylov_dim = 20;
    double tol = 1e-10;
};

// exp(-i dt Op) v by Arnoldi with adaptive sub-stepping. Not renormalized.
VectorXc krylov_expm_apply(const LinearOp& op, const VectorXc& v, cplx dt,
                           const KrylovOptions& opts = {});

ComplexTensor krylov_expm_apply(const LinearOp& op, const ComplexTensor& v, cplx dt,
                                const KrylovOptions& opts = {});

struct LanczosOptions {
    int krylov_dim = 40;
    int max_restarts = 50;
    double tol = 1e-12; // residual norm of the Ritz pair
};

struct EigenPair {
    double value = 0.0;
    VectorXc vector;
    double residual = 0.0;
};

// Lowest eigenpair of a Hermitian operator; Lanczos with full reorthogonalization
// and restarts from the current Ritz vector.
EigenPair lanczos_ground(const LinearOp& op, const VectorXc& start, const LanczosOptions& opts = {});

} // namespace nhmps
