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

#include "nhmps/dmrg.hpp"

#include <algorithm>
#include <cmath>

#include "nhmps/effective.hpp"

namespace nhmps {

std::vector<int> staggered_occupations(int L, int filling) {
    if (filling < 0 || filling > L) throw SpecError("filling must lie in [0, L]");
    std::vector<int> occ(static_cast<std::size_t>(L), 0);
    for (int x = 0; x < L; ++x) occ[static_cast<std::size_t>(x)] = ((x + 1) * filling) / L - (x * filling) / L;
    return occ;
}

namespace {

std::vector<BlockMatrix> parts_of(const TwoSite& t) { return {t[0], t[1], t[2], t[3]}; }

} // namespace

DmrgResult dmrg(const Mpo& h0, const ModelSpec& spec, const DmrgOptions& opts) {
    spec.validate();
    if (!h0.hermitian()) throw SpecError("DMRG needs a Hermitian operator");
    if (h0.length() != spec.L) throw SpecError("operator length differs from the model");
    if (opts.chi_max < 2) throw SpecError("DMRG needs chi_max >= 2");

    const int L = spec.L;
    MpsState psi = product_state(staggered_occupations(L, spec.filling));
    psi.canonicalize(0);

    DmrgResult res;
    if (L == 1) {
        res.state = psi;
        res.energy = expectation(psi, h0).real();
        res.converged = true;
        return res;
    }

    const TruncationPolicy policy{static_cast<std::size_t>(opts.chi_max), opts.weight_floor};
    auto left = left_envs(psi, h0, 0);
    auto right = right_envs(psi, h0, 2);

    auto solve = [&](int i, bool absorb_right) {
        const TwoSite theta = merge(psi.site(i), psi.site(i + 1));
        std::vector<BlockMatrix> tmpl = parts_of(theta);
        const Env& e = left[static_cast<std::size_t>(i)];
        const Env& g = right[static_cast<std::size_t>(i + 2)];
        const MpoSite& w1 = h0.site(i);
        const MpoSite& w2 = h0.site(i + 1);
        LinearOp op = [&](const VectorXc& x) -> VectorXc {
            std::vector<BlockMatrix> p = tmpl;
            unpack(x, p);
            const TwoSite y = apply_two_site(e, w1, w2, g, {p[0], p[1], p[2], p[3]});
            return pack(parts_of(y));
        };
        const EigenPair gs = lanczos_ground(op, pack(tmpl), opts.lanczos);
        unpack(gs.vector, tmpl);
        const auto sp = split_two_site({tmpl[0], tmpl[1], tmpl[2], tmpl[3]}, policy, absorb_right);
        res.max_discarded_weight = std::max(res.max_discarded_weight, sp.discarded_weight);
        psi.site(i) = sp.left;
        psi.site(i + 1) = sp.right;
        return gs.value;
    };

    double previous = 0.0;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        double energy = 0.0;
        for (int i = 0; i + 1 < L; ++i) {
            energy = solve(i, true);
            psi.set_center(i + 1);
            left[static_cast<std::size_t>(i + 1)] = extend_left(left[static_cast<std::size_t>(i)], psi.site(i), h0, i);
        }
        for (int i = L - 2; i >= 0; --i) {
            energy = solve(i, false);
            psi.set_center(i);
            right[static_cast<std::size_t>(i + 1)] =
                extend_right(right[static_cast<std::size_t>(i + 2)], psi.site(i + 1), h0, i + 1);
        }
        psi.normalize();
        res.sweep_energies.push_back(energy);
        if (sweep > 0) {
            res.last_delta = energy - previous;
            if (std::abs(res.last_delta) < opts.e_tol) {
                res.converged = true;
                previous = energy;
                break;
            }
        }
        previous = energy;
    }
    res.state = std::move(psi);
    res.energy = previous;
    return res;
}

double energy_variance(const MpsState& psi, const Mpo& h) {
    const double e = expectation(psi, h).real();
    const double e2 = expectation(psi, mpo_product(h, h)).real();
    return e2 - e * e;
}

} // namespace nhmps
