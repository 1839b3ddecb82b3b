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

#include "nhmps/lattice.hpp"

#include <algorithm>
#include <set>

namespace nhmps {

void ModelSpec::validate() const {
    if (L < 2) throw SpecError("L must be at least 2");
    if (J <= 0.0) throw SpecError("J must be positive");
    if (filling < 0 || filling > L) throw SpecError("filling must lie in [0, L]");
    if (filling * 2 == L && L % 2 != 0) throw SpecError("half filling needs even L");
}

std::string to_string(SignPolicy p) {
    return p == SignPolicy::FixedAtIntervalStart ? "fixed-at-interval-start" : "instantaneous";
}

SignPolicy sign_policy_from_string(const std::string& s) {
    if (s == "fixed-at-interval-start" || s == "fixed") return SignPolicy::FixedAtIntervalStart;
    if (s == "instantaneous") return SignPolicy::Instantaneous;
    throw SpecError("unknown sign policy '" + s + "'");
}

void MeasurementSpec::validate() const {
    if (!(M >= 0.0)) throw SpecError("measurement strength M must be >= 0");
    if (!(P >= 0.0 && P <= 1.0)) throw SpecError("measurement probability P must lie in [0, 1]");
    if (!(T > 0.0)) throw SpecError("measurement interval T must be positive");
    if (t_off < 0.0 || t_end < t_off) throw SpecError("need 0 <= t_off <= t_end");
}

LocalOp op_identity() { return LocalOp::Identity(); }

LocalOp op_number() {
    LocalOp n = LocalOp::Zero();
    n(1, 1) = 1.0;
    return n;
}

LocalOp op_create() {
    LocalOp b = LocalOp::Zero();
    b(1, 0) = 1.0;
    return b;
}

LocalOp op_annihilate() {
    LocalOp b = LocalOp::Zero();
    b(0, 1) = 1.0;
    return b;
}

namespace {

int op_charge(const LocalOp& op) {
    std::optional<int> q;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            if (op(r, c) == cplx{0.0, 0.0}) continue;
            if (q && *q != r - c) throw SpecError("local operator does not conserve particle number");
            q = r - c;
        }
    return q.value_or(0);
}

} // namespace

Mpo::Mpo(std::vector<MpoSite> sites, bool hermitian) : sites_(std::move(sites)), hermitian_(hermitian) {
    if (sites_.empty()) throw SpecError("MPO needs at least one site");
    if (sites_.front().rows != 1 || sites_.back().cols != 1)
        throw SpecError("MPO boundary sites must have a single outer channel");
    flux_.resize(sites_.size() + 1);
    flux_[0] = {0};
    // Channels no operator string reaches carry no flux constraint.
    std::vector<std::optional<int>> left{0};
    for (std::size_t k = 0; k < sites_.size(); ++k) {
        const MpoSite& w = sites_[k];
        if (w.rows != static_cast<int>(flux_[k].size())) throw SpecError("MPO bond dimensions disagree");
        std::vector<std::optional<int>> right(static_cast<std::size_t>(w.cols));
        for (int a = 0; a < w.rows; ++a)
            for (int b = 0; b < w.cols; ++b) {
                if (!w.at(a, b) || !left[static_cast<std::size_t>(a)]) continue;
                const int f = *left[static_cast<std::size_t>(a)] + op_charge(*w.at(a, b));
                auto& slot = right[static_cast<std::size_t>(b)];
                if (slot && *slot != f) throw SpecError("MPO channel carries inconsistent particle flux");
                slot = f;
            }
        flux_[k + 1].resize(right.size());
        for (std::size_t b = 0; b < right.size(); ++b) flux_[k + 1][b] = right[b].value_or(0);
        left = std::move(right);
    }
    if (flux_.back().front() != 0) throw SpecError("MPO does not conserve particle number");
}

int Mpo::max_bond_dim() const {
    int w = 0;
    for (const auto& f : flux_) w = std::max(w, static_cast<int>(f.size()));
    return w;
}

namespace {

// Bulk 5-channel XXZ tensor with the given on-site term.
MpoSite xxz_bulk(const ModelSpec& s, const std::optional<LocalOp>& onsite) {
    MpoSite w(5, 5);
    w.at(0, 0) = op_identity();
    w.at(0, 1) = op_create();
    w.at(0, 2) = op_annihilate();
    w.at(0, 3) = op_number();
    if (onsite) w.at(0, 4) = *onsite;
    w.at(1, 4) = LocalOp(-0.5 * s.J * op_annihilate());
    w.at(2, 4) = LocalOp(-0.5 * s.J * op_create());
    if (s.Delta != 0.0) w.at(3, 4) = LocalOp(s.Delta * op_number());
    w.at(4, 4) = op_identity();
    return w;
}

MpoSite first_row(const MpoSite& w) {
    MpoSite out(1, w.cols);
    for (int b = 0; b < w.cols; ++b) out.at(0, b) = w.at(0, b);
    return out;
}

MpoSite last_col(const MpoSite& w) {
    MpoSite out(w.rows, 1);
    for (int a = 0; a < w.rows; ++a) out.at(a, 0) = w.at(a, w.cols - 1);
    return out;
}

Mpo assemble(const std::vector<MpoSite>& bulk, bool hermitian) {
    std::vector<MpoSite> sites(bulk);
    const std::size_t L = sites.size();
    if (L == 1) {
        MpoSite only(1, 1);
        only.at(0, 0) = bulk[0].at(0, bulk[0].cols - 1);
        if (!only.at(0, 0)) only.at(0, 0) = LocalOp(LocalOp::Zero());
        return Mpo({only}, hermitian);
    }
    sites.front() = first_row(bulk.front());
    sites.back() = last_col(bulk.back());
    return Mpo(std::move(sites), hermitian);
}

std::vector<std::optional<LocalOp>> measurement_onsite(int L, const MeasurementSpec& spec,
                                                       const std::vector<SiteSign>& events) {
    std::vector<std::optional<LocalOp>> onsite(static_cast<std::size_t>(L));
    std::set<int> seen;
    for (const auto& e : events) {
        if (e.site < 0 || e.site >= L) throw SpecError("measurement site out of range");
        if (e.sign != 1 && e.sign != -1) throw SpecError("measurement sign must be +1 or -1");
        if (!seen.insert(e.site).second)
            throw SpecError("duplicate measurement site " + std::to_string(e.site));
        if (spec.M == 0.0) continue;
        onsite[static_cast<std::size_t>(e.site)] = LocalOp(cplx{0.0, spec.M * e.sign} * op_number());
    }
    return onsite;
}

} // namespace

Mpo build_h0(const ModelSpec& spec) {
    spec.validate();
    std::vector<MpoSite> bulk;
    for (int x = 0; x < spec.L; ++x) bulk.push_back(xxz_bulk(spec, std::nullopt));
    return assemble(bulk, true);
}

Mpo build_h_meas(int L, const MeasurementSpec& spec, const std::vector<SiteSign>& events) {
    spec.validate();
    const auto onsite = measurement_onsite(L, spec, events);
    std::vector<MpoSite> bulk;
    for (int x = 0; x < L; ++x) {
        MpoSite w(2, 2);
        w.at(0, 0) = op_identity();
        w.at(0, 1) = onsite[static_cast<std::size_t>(x)];
        w.at(1, 1) = op_identity();
        bulk.push_back(w);
    }
    return assemble(bulk, events.empty() || spec.M == 0.0);
}

Mpo build_evolution_mpo(const ModelSpec& model, const MeasurementSpec& meas,
                        const std::vector<SiteSign>& events) {
    model.validate();
    meas.validate();
    const auto onsite = measurement_onsite(model.L, meas, events);
    std::vector<MpoSite> bulk;
    bool hermitian = true;
    for (int x = 0; x < model.L; ++x) {
        bulk.push_back(xxz_bulk(model, onsite[static_cast<std::size_t>(x)]));
        hermitian = hermitian && !onsite[static_cast<std::size_t>(x)];
    }
    return assemble(bulk, hermitian);
}

Mpo mpo_sum(const Mpo& a, const Mpo& b) {
    if (a.length() != b.length()) throw SpecError("MPO lengths differ");
    const int L = a.length();
    std::vector<MpoSite> sites;
    for (int k = 0; k < L; ++k) {
        const MpoSite& wa = a.site(k);
        const MpoSite& wb = b.site(k);
        const bool first = k == 0, last = k == L - 1;
        const int rows = first ? 1 : wa.rows + wb.rows;
        const int cols = last ? 1 : wa.cols + wb.cols;
        MpoSite w(rows, cols);
        for (int r = 0; r < wa.rows; ++r)
            for (int c = 0; c < wa.cols; ++c) w.at(r, c) = wa.at(r, c);
        const int ro = first ? 0 : wa.rows, co = last ? 0 : wa.cols;
        for (int r = 0; r < wb.rows; ++r)
            for (int c = 0; c < wb.cols; ++c) {
                auto& slot = w.at(ro + r, co + c);
                const auto& add = wb.at(r, c);
                if (!add) continue;
                slot = slot ? LocalOp(*slot + *add) : *add;
            }
        sites.push_back(std::move(w));
    }
    return Mpo(std::move(sites), a.hermitian() && b.hermitian());
}

Mpo mpo_product(const Mpo& a, const Mpo& b) {
    if (a.length() != b.length()) throw SpecError("MPO lengths differ");
    std::vector<MpoSite> sites;
    for (int k = 0; k < a.length(); ++k) {
        const MpoSite& wa = a.site(k);
        const MpoSite& wb = b.site(k);
        MpoSite w(wa.rows * wb.rows, wa.cols * wb.cols);
        for (int ra = 0; ra < wa.rows; ++ra)
            for (int ca = 0; ca < wa.cols; ++ca) {
                if (!wa.at(ra, ca)) continue;
                for (int rb = 0; rb < wb.rows; ++rb)
                    for (int cb = 0; cb < wb.cols; ++cb) {
                        if (!wb.at(rb, cb)) continue;
                        const LocalOp prod = *wa.at(ra, ca) * *wb.at(rb, cb);
                        if (prod.isZero(0.0)) continue;
                        w.at(ra * wb.rows + rb, ca * wb.cols + cb) = prod;
                    }
            }
        sites.push_back(std::move(w));
    }
    return Mpo(std::move(sites), a.hermitian() && b.hermitian());
}

MatrixXc to_dense(const Mpo& mpo) {
    const int L = mpo.length();
    if (L > 14) throw std::length_error("dense MPO conversion limited to L <= 14");
    // acc[c] holds the operator string over sites [0, k] ending in channel c.
    std::vector<MatrixXc> acc{MatrixXc::Identity(1, 1)};
    for (int k = 0; k < L; ++k) {
        const MpoSite& w = mpo.site(k);
        const Eigen::Index d = acc[0].rows() * 2;
        std::vector<MatrixXc> next(static_cast<std::size_t>(w.cols), MatrixXc::Zero(d, d));
        for (int a = 0; a < w.rows; ++a)
            for (int b = 0; b < w.cols; ++b) {
                if (!w.at(a, b)) continue;
                const MatrixXc& left = acc[static_cast<std::size_t>(a)];
                const LocalOp& op = *w.at(a, b);
                MatrixXc& out = next[static_cast<std::size_t>(b)];
                for (Eigen::Index i = 0; i < left.rows(); ++i)
                    for (Eigen::Index j = 0; j < left.cols(); ++j) {
                        if (left(i, j) == cplx{0.0, 0.0}) continue;
                        for (int s = 0; s < 2; ++s)
                            for (int t = 0; t < 2; ++t) out(2 * i + s, 2 * j + t) += left(i, j) * op(s, t);
                    }
            }
        acc = std::move(next);
    }
    return acc[0];
}

} // namespace nhmps
