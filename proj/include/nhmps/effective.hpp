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

#include "nhmps/block.hpp"
#include "nhmps/lattice.hpp"
#include "nhmps/mps.hpp"

namespace nhmps {

// MPO environment at one bond: one block matrix per MPO channel.
// Left environments map ket -> bra (flux = channel flux); right ones bra -> ket.
struct Env {
    std::vector<BlockMatrix> ch;
};

Env left_boundary(const MpsState& psi);
Env right_boundary(const MpsState& psi);

// Absorb site tensor `a` (as both bra and ket) and MPO site `site` into the environment.
Env extend_left(const Env& e, const SiteTensor& a, const Mpo& mpo, int site);
Env extend_right(const Env& g, const SiteTensor& a, const Mpo& mpo, int site);

// Effective operators. Inputs/outputs have identical block structure.
SiteTensor apply_one_site(const Env& e, const MpoSite& w, const Env& g, const SiteTensor& c);
TwoSite apply_two_site(const Env& e, const MpoSite& w1, const MpoSite& w2, const Env& g, const TwoSite& theta);
BlockMatrix apply_zero_site(const Env& e, const Env& g, const BlockMatrix& c);

// Environment stacks indexed by bond (size L+1). Left ones are filled for
// bonds [0, upto], right ones for bonds [downto, L]; the rest stay empty.
std::vector<Env> left_envs(const MpsState& psi, const Mpo& mpo, int upto);
std::vector<Env> right_envs(const MpsState& psi, const Mpo& mpo, int downto);

} // namespace nhmps
