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

#include "nhmps/tdvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nhmps {

std::string to_string(HybridPolicy p) {
    switch (p) {
        case HybridPolicy::TwoSiteUntilSaturated: return "two-site-until-saturated";
        case HybridPolicy::AlwaysTwoSite: return "always-two-site";
        case HybridPolicy::AlwaysOneSite: return "always-one-site";
    }
    return "?";
}

HybridPolicy hybrid_policy_from_string(const std::string& s) {
    if (s == "two-site-until-saturated" || s == "hybrid") return HybridPolicy::TwoSiteUntilSaturated;
    if (s == "always-two-site") return HybridPolicy::AlwaysTwoSite;
    if (s == "always-one-site") return HybridPolicy::AlwaysOneSite;
    throw SpecError("unknown hybrid policy '" + s + "'");
}

void EvolutionConfig::validate() const {
    if (!(dt > 0.0)) throw SpecError("dt must be positive");
    if (chi_max < 1) throw SpecError("chi_max must be at least 1");
    if (!(two_site_weight_floor >= 0.0)) throw SpecError("two_site_weight_floor must be >= 0");
    if (krylov.krylov_dim < 2 || !(krylov.tol > 0.0)) throw SpecError("invalid Krylov options");
}

void EvolutionConfig::validate(const MeasurementSpec& meas) const {
    validate();
    double scale = meas.T;
    if (meas.M > 0.0) scale = std::min(scale, 1.0 / meas.M);
    if (dt > 0.1 * scale * (1.0 + 1e-12))
        throw SpecError("dt = " + std::to_string(dt) + " violates dt <= 0.1 min(1/M, T) = " + std::to_string(0.1 * scale));
}

int max_sector_bond_dim(int L, int filling, int b) {
    auto binom = [](int n, int k) -> double {
        if (k < 0 || k > n) return 0.0;
        double r = 1.0;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return std::round(r);
    };
    double total = 0.0;
    for (int q = 0; q <= std::min(b, filling); ++q) total += std::min(binom(b, q), binom(L - b, filling - q));
    return static_cast<int>(std::min<double>(total, std::numeric_limits<int>::max()));
}

TdvpIntegrator::TdvpIntegrator(EvolutionConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void TdvpIntegrator::set_operator(const Mpo& h) {
    h_ = h;
    have_op_ = true;
    envs_valid_ = false;
}

void TdvpIntegrator::rebuild(const MpsState& psi) {
    left_ = left_envs(psi, h_, 0);
    right_ = right_envs(psi, h_, 1);
    envs_valid_ = true;
}

bool TdvpIntegrator::use_two_site(const MpsState& psi, int bond) const {
    switch (cfg_.hybrid_policy) {
        case HybridPolicy::AlwaysTwoSite: return true;
        case HybridPolicy::AlwaysOneSite: return false;
        case HybridPolicy::TwoSiteUntilSaturated: break;
    }
    const int cap = std::min(cfg_.chi_max, max_sector_bond_dim(psi.length(), psi.filling(), bond));
    return psi.bond(bond).dim() < cap;
}

namespace {

std::vector<BlockMatrix> parts2(const TwoSite& t) { return {t[0], t[1], t[2], t[3]}; }

VectorXc expm(const LinearOp& op, const VectorXc& v, double tau, const KrylovOptions& k, int site) {
    try {
        return krylov_expm_apply(op, v, tau, k);
    } catch (const ConvergenceError& e) {
        throw IntegratorError(std::string(e.what()) + " at site " + std::to_string(site), e.residual(), site);
    }
}

SiteTensor evolve_one(const Env& e, const MpoSite& w, const Env& g, const SiteTensor& c, double tau,
                      const KrylovOptions& k, int site) {
    std::vector<BlockMatrix> tmpl = c.parts();
    LinearOp op = [&](const VectorXc& x) -> VectorXc {
        std::vector<BlockMatrix> p = tmpl;
        unpack(x, p);
        SiteTensor t;
        t.assign(p);
        return pack(apply_one_site(e, w, g, t).parts());
    };
    unpack(expm(op, pack(tmpl), tau, k, site), tmpl);
    SiteTensor out;
    out.assign(tmpl);
    return out;
}

TwoSite evolve_two(const Env& e, const MpoSite& w1, const MpoSite& w2, const Env& g, const TwoSite& theta,
                   double tau, const KrylovOptions& k, int site) {
    std::vector<BlockMatrix> tmpl = parts2(theta);
    LinearOp op = [&](const VectorXc& x) -> VectorXc {
        std::vector<BlockMatrix> p = tmpl;
        unpack(x, p);
        return pack(parts2(apply_two_site(e, w1, w2, g, {p[0], p[1], p[2], p[3]})));
    };
    unpack(expm(op, pack(tmpl), tau, k, site), tmpl);
    return {tmpl[0], tmpl[1], tmpl[2], tmpl[3]};
}

BlockMatrix evolve_zero(const Env& e, const Env& g, const BlockMatrix& c, double tau, const KrylovOptions& k,
                        int site) {
    std::vector<BlockMatrix> tmpl{c};
    LinearOp op = [&](const VectorXc& x) -> VectorXc {
        std::vector<BlockMatrix> p = tmpl;
        unpack(x, p);
        return pack({apply_zero_site(e, g, p[0])});
    };
    unpack(expm(op, pack(tmpl), tau, k, site), tmpl);
    return tmpl[0];
}

} // namespace

void TdvpIntegrator::right_sweep(MpsState& psi, double tau, StepDiagnostics& d) {
    const int L = psi.length();
    const TruncationPolicy policy{static_cast<std::size_t>(cfg_.chi_max), cfg_.two_site_weight_floor};
    int i = 0;
    while (true) {
        const auto ui = static_cast<std::size_t>(i);
        if (i == L - 1) {
            psi.site(i) = evolve_one(left_[ui], h_.site(i), right_[ui + 1], psi.site(i), tau, cfg_.krylov, i);
            return;
        }
        if (use_two_site(psi, i + 1)) {
            const TwoSite theta = evolve_two(left_[ui], h_.site(i), h_.site(i + 1), right_[ui + 2],
                                             merge(psi.site(i), psi.site(i + 1)), tau, cfg_.krylov, i);
            auto sp = split_two_site(theta, policy, true);
            d.max_discarded_weight = std::max(d.max_discarded_weight, sp.discarded_weight);
            psi.site(i) = std::move(sp.left);
            psi.site(i + 1) = std::move(sp.right);
            psi.set_center(i + 1);
            left_[ui + 1] = extend_left(left_[ui], psi.site(i), h_, i);
            if (i + 1 == L - 1) return;
            psi.site(i + 1) =
                evolve_one(left_[ui + 1], h_.site(i + 1), right_[ui + 2], psi.site(i + 1), -tau, cfg_.krylov, i + 1);
        } else {
            const SiteTensor c = evolve_one(left_[ui], h_.site(i), right_[ui + 1], psi.site(i), tau, cfg_.krylov, i);
            LeftSplit s = split_left(c);
            psi.site(i) = std::move(s.q);
            left_[ui + 1] = extend_left(left_[ui], psi.site(i), h_, i);
            const BlockMatrix r = evolve_zero(left_[ui + 1], right_[ui + 1], s.r, -tau, cfg_.krylov, i);
            psi.site(i + 1) = multiply_left(r, psi.site(i + 1));
            psi.set_center(i + 1);
        }
        ++i;
    }
}

void TdvpIntegrator::left_sweep(MpsState& psi, double tau, StepDiagnostics& d) {
    const TruncationPolicy policy{static_cast<std::size_t>(cfg_.chi_max), cfg_.two_site_weight_floor};
    int i = psi.length() - 1;
    while (true) {
        const auto ui = static_cast<std::size_t>(i);
        if (i == 0) {
            psi.site(0) = evolve_one(left_[0], h_.site(0), right_[1], psi.site(0), tau, cfg_.krylov, 0);
            return;
        }
        if (use_two_site(psi, i)) {
            const TwoSite theta = evolve_two(left_[ui - 1], h_.site(i - 1), h_.site(i), right_[ui + 1],
                                             merge(psi.site(i - 1), psi.site(i)), tau, cfg_.krylov, i - 1);
            auto sp = split_two_site(theta, policy, false);
            d.max_discarded_weight = std::max(d.max_discarded_weight, sp.discarded_weight);
            psi.site(i - 1) = std::move(sp.left);
            psi.site(i) = std::move(sp.right);
            psi.set_center(i - 1);
            right_[ui] = extend_right(right_[ui + 1], psi.site(i), h_, i);
            if (i - 1 == 0) return;
            psi.site(i - 1) =
                evolve_one(left_[ui - 1], h_.site(i - 1), right_[ui], psi.site(i - 1), -tau, cfg_.krylov, i - 1);
        } else {
            const SiteTensor c = evolve_one(left_[ui], h_.site(i), right_[ui + 1], psi.site(i), tau, cfg_.krylov, i);
            RightSplit s = split_right(c);
            psi.site(i) = std::move(s.q);
            right_[ui] = extend_right(right_[ui + 1], psi.site(i), h_, i);
            const BlockMatrix r = evolve_zero(left_[ui], right_[ui], s.r, -tau, cfg_.krylov, i);
            psi.site(i - 1) = multiply_right(psi.site(i - 1), r);
            psi.set_center(i - 1);
        }
        --i;
    }
}

StepDiagnostics TdvpIntegrator::step(MpsState& psi, bool renormalize) { return step(psi, cfg_.dt, renormalize); }

StepDiagnostics TdvpIntegrator::step(MpsState& psi, double dt, bool renormalize) {
    if (!have_op_) throw SpecError("integrator has no operator");
    if (h_.length() != psi.length()) throw ShapeError("operator and state lengths differ");
    if (psi.length() < 2) throw SpecError("TDVP needs at least two sites");
    StepDiagnostics d;
    if (psi.center() != 0) {
        psi.move_center(0);
        envs_valid_ = false;
    }
    if (!envs_valid_) rebuild(psi);
    right_sweep(psi, 0.5 * dt, d);
    left_sweep(psi, 0.5 * dt, d);
    d.max_bond_dim = psi.max_bond_dim();
    d.norm_before_restore = psi.norm();
    if (renormalize || (auto_renormalize_ && !h_.hermitian())) psi.normalize();
    return d;
}

StepDiagnostics tdvp_step(MpsState& psi, const Mpo& h, const EvolutionConfig& cfg) {
    TdvpIntegrator integ(cfg);
    integ.set_operator(h);
    return integ.step(psi);
}

IntervalResult evolve_interval(MpsState& psi, TdvpIntegrator& integ, double t0, double t_span, int stride) {
    const double dt = integ.config().dt;
    const double ratio = t_span / dt;
    const long n = std::lround(ratio);
    if (t_span < 0.0 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
        throw SpecError("interval length must be a non-negative multiple of dt");
    IntervalResult out;
    out.max_bond_dim = psi.max_bond_dim();
    auto snap = [&](long k) {
        Snapshot s;
        s.t = t0 + static_cast<double>(k) * dt;
        s.densities = local_densities(psi);
        s.entropy_bits = entanglement_entropy(psi, psi.length() / 2);
        out.snapshots.push_back(std::move(s));
    };
    for (long k = 1; k <= n; ++k) {
        const auto d = integ.step(psi);
        out.max_discarded_weight = std::max(out.max_discarded_weight, d.max_discarded_weight);
        out.max_bond_dim = std::max(out.max_bond_dim, d.max_bond_dim);
        if (stride > 0 && k % stride == 0 && k != n) snap(k);
    }
    snap(n);
    return out;
}

} // namespace nhmps
