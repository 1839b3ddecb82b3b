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
#include <string>
#include <vector>

#include "nhmps/effective.hpp"
#include "nhmps/krylov.hpp"
#include "nhmps/lattice.hpp"
#include "nhmps/mps.hpp"

namespace nhmps {

enum class HybridPolicy { TwoSiteUntilSaturated, AlwaysTwoSite, AlwaysOneSite };

std::string to_string(HybridPolicy p);
HybridPolicy hybrid_policy_from_string(const std::string& s);

struct EvolutionConfig {
    double dt = 0.005;
    int chi_max = 64;
    double two_site_weight_floor = 0.0;
    HybridPolicy hybrid_policy = HybridPolicy::TwoSiteUntilSaturated;
    KrylovOptions krylov{};

    // dt <= 0.1 * min(1/M, T); throws SpecError otherwise.
    void validate(const MeasurementSpec& meas) const;
    void validate() const;
};

struct StepDiagnostics {
    double max_discarded_weight = 0.0;
    int max_bond_dim = 0;
    double norm_before_restore = 1.0;
};

// Krylov failure inside a sweep, tagged with the site where it happened.
class IntegratorError : public ConvergenceError {
   public:
    IntegratorError(const std::string& what, double residual, int site)
        : ConvergenceError(what, residual), site_(site) {}
    int site() const { return site_; }

   private:
    int site_;
};

// Largest bond dimension the fixed-filling Hilbert space allows at bond b.
int max_sector_bond_dim(int L, int filling, int b);

// Second-order hybrid TDVP integrator bound to one Hamiltonian. Environments
// are cached between steps and rebuilt when the operator changes.
class TdvpIntegrator {
   public:
    explicit TdvpIntegrator(EvolutionConfig cfg);

    const EvolutionConfig& config() const { return cfg_; }
    void set_operator(const Mpo& h);
    const Mpo& op() const { return h_; }
    // When off, non-Hermitian steps leave the norm alone (diagnostics only).
    void set_auto_renormalize(bool on) { auto_renormalize_ = on; }

    // One substep of duration dt. Renormalizes when the operator is non-Hermitian
    // (or when `renormalize` is forced).
    StepDiagnostics step(MpsState& psi, bool renormalize = false);
    StepDiagnostics step(MpsState& psi, double dt, bool renormalize);

   private:
    void rebuild(const MpsState& psi);
    bool use_two_site(const MpsState& psi, int bond) const;
    void right_sweep(MpsState& psi, double tau, StepDiagnostics& d);
    void left_sweep(MpsState& psi, double tau, StepDiagnostics& d);

    EvolutionConfig cfg_;
    Mpo h_;
    bool have_op_ = false;
    bool envs_valid_ = false;
    bool auto_renormalize_ = true;
    std::vector<Env> left_, right_;
};

StepDiagnostics tdvp_step(MpsState& psi, const Mpo& h, const EvolutionConfig& cfg);

struct Snapshot {
    double t = 0.0;
    std::vector<double> densities;
    double entropy_bits = 0.0; // half cut
};

struct IntervalResult {
    std::vector<Snapshot> snapshots;
    double max_discarded_weight = 0.0;
    int max_bond_dim = 0;
};

// Evolve for t_span (a multiple of dt) under the integrator's operator, recording
// a snapshot every `stride` substeps (0 = only at the end).
IntervalResult evolve_interval(MpsState& psi, TdvpIntegrator& integ, double t0, double t_span, int stride = 0);

} // namespace nhmps
