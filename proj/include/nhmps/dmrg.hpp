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

#include <vector>

#include "nhmps/krylov.hpp"
#include "nhmps/lattice.hpp"
#include "nhmps/mps.hpp"

namespace nhmps {

struct DmrgOptions {
    int chi_max = 64;
    int max_sweeps = 20;
    double e_tol = 1e-10;
    double weight_floor = 0.0;
    LanczosOptions lanczos{};
};

struct DmrgResult {
    MpsState state;
    double energy = 0.0;
    std::vector<double> sweep_energies;
    bool converged = false;
    double last_delta = 0.0; // energy change of the final sweep
    double max_discarded_weight = 0.0;
};

// Fixed starting configuration: particles spread as evenly as possible (staggered at half filling).
std::vector<int> staggered_occupations(int L, int filling);

// Two-site DMRG. Non-convergence is reported through `converged`, not thrown.
DmrgResult dmrg(const Mpo& h0, const ModelSpec& spec, const DmrgOptions& opts = {});

// <H^2> - <H>^2 for a normalized state.
double energy_variance(const MpsState& psi, const Mpo& h);

} // namespace nhmps
