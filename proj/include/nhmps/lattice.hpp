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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhmps/tensor.hpp"

namespace nhmps {

class SpecError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// Hard-core bosons on an open chain. Sites are 0-based in code and in files.
struct ModelSpec {
    int L = 8;
    double J = 1.0;
    double Delta = -0.5;
    int filling = 4;

    static ModelSpec half_filled(int L, double Delta = -0.5) { return {L, 1.0, Delta, L / 2}; }
    void validate() const;
};

enum class SignPolicy { FixedAtIntervalStart, Instantaneous };

std::string to_string(SignPolicy p);
SignPolicy sign_policy_from_string(const std::string& s);

struct MeasurementSpec {
    double M = 0.0;     // strength, units of J
    double P = 1.0;     // per-site per-interval measurement probability
    double T = 1.0;     // interval duration
    double t_off = 50.0; // measurement switched off from here on
    double t_end = 60.0;
    SignPolicy sign_policy = SignPolicy::FixedAtIntervalStart;

    void validate() const;
};

struct SiteSign {
    int site = 0;
    int sign = 1; // +1 or -1
};

using LocalOp = Eigen::Matrix2cd; // basis {|0>, |1>} = {empty, occupied}

LocalOp op_identity();
LocalOp op_number();
LocalOp op_create();
LocalOp op_annihilate();

// Matrix-product operator. Site k holds a (rows x cols) grid of local operators;
// the first site has a single row and the last a single column.
struct MpoSite {
    int rows = 0;
    int cols = 0;
    std::vector<std::optional<LocalOp>> ops; // row-major

    MpoSite() = default;
    MpoSite(int r, int c) : rows(r), cols(c), ops(static_cast<std::size_t>(r * c)) {}
    std::optional<LocalOp>& at(int a, int b) { return ops[static_cast<std::size_t>(a * cols + b)]; }
    const std::optional<LocalOp>& at(int a, int b) const {
        return ops[static_cast<std::size_t>(a * cols + b)];
    }
};

class Mpo {
   public:
    Mpo() = default;
    Mpo(std::vector<MpoSite> sites, bool hermitian);

    int length() const { return static_cast<int>(sites_.size()); }
    const MpoSite& site(int k) const { return sites_[static_cast<std::size_t>(k)]; }
    bool hermitian() const { return hermitian_; }
    // Particle-number flux (bra minus ket) carried by channel a of MPO bond k (0..L).
    int flux(int bond, int channel) const { return flux_[static_cast<std::size_t>(bond)][static_cast<std::size_t>(channel)]; }
    int bond_dim(int bond) const { return static_cast<int>(flux_[static_cast<std::size_t>(bond)].size()); }
    int max_bond_dim() const;

   private:
    std::vector<MpoSite> sites_;
    std::vector<std::vector<int>> flux_;
    bool hermitian_ = true;
};

// -(J/2) sum (b+_x b_{x+1} + h.c.) + Delta sum n_x n_{x+1}; bond dimension 5.
Mpo build_h0(const ModelSpec& spec);

// i M sum_x sign_x n_x over the measured sites; bond dimension 2.
Mpo build_h_meas(int L, const MeasurementSpec& spec, const std::vector<SiteSign>& events);

// H0 + H_meas folded into one bond-dimension-5 MPO (on-site terms share the corner slot).
Mpo build_evolution_mpo(const ModelSpec& model, const MeasurementSpec& meas,
                        const std::vector<SiteSign>& events);

Mpo mpo_sum(const Mpo& a, const Mpo& b);
Mpo mpo_product(const Mpo& a, const Mpo& b); // a * b

// Full 2^L matrix; basis index has site 0 as the most significant bit.
MatrixXc to_dense(const Mpo& mpo);

} // namespace nhmps
