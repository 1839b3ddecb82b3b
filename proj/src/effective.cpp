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

#include "nhmps/effective.hpp"

#include <optional>

namespace nhmps {

namespace {

void accumulate(std::optional<BlockMatrix>& acc, cplx s, const BlockMatrix& x) {
    if (acc && acc->flux() != x.flux()) {
        // Unreachable MPO channels carry an arbitrary flux label and a zero environment.
        if (x.norm() == 0.0) return;
        if (acc->norm() != 0.0) throw ShapeError("MPO channel flux mismatch in environment contraction");
        acc.reset();
    }
    if (!acc) {
        acc = x;
        *acc *= s;
    } else {
        acc->add_scaled(s, x);
    }
}

void add_into(BlockMatrix& target, const BlockMatrix& x) {
    if (x.flux() != target.flux() && x.norm() == 0.0) return;
    target += x;
}

// Whether physical input index s of row channel ch feeds any output.
bool row_used(const MpoSite& w, int ch, int s) {
    for (int b = 0; b < w.cols; ++b) {
        const auto& op = w.at(ch, b);
        if (op && ((*op)(0, s) != cplx{0.0, 0.0} || (*op)(1, s) != cplx{0.0, 0.0})) return true;
    }
    return false;
}

bool col_used(const MpoSite& w, int b, int sp) {
    for (int ch = 0; ch < w.rows; ++ch) {
        const auto& op = w.at(ch, b);
        if (op && ((*op)(sp, 0) != cplx{0.0, 0.0} || (*op)(sp, 1) != cplx{0.0, 0.0})) return true;
    }
    return false;
}

void check_mpo(const MpsState& psi, const Mpo& mpo) {
    if (psi.length() != mpo.length()) throw ShapeError("MPO and MPS lengths differ");
}

} // namespace

Env left_boundary(const MpsState& psi) {
    BlockMatrix e(psi.bond(0), psi.bond(0), 0);
    e.block(0)(0, 0) = 1.0;
    return {{e}};
}

Env right_boundary(const MpsState& psi) {
    const Space& s = psi.bond(psi.length());
    BlockMatrix g(s, s, 0);
    g.block(0)(0, 0) = 1.0;
    return {{g}};
}

Env extend_left(const Env& e, const SiteTensor& a, const Mpo& mpo, int site) {
    const MpoSite& w = mpo.site(site);
    if (static_cast<int>(e.ch.size()) != w.rows) throw ShapeError("left environment / MPO channel mismatch");
    // t[a][s] = E[a] A[s]
    std::vector<std::array<BlockMatrix, 2>> t(e.ch.size());
    for (std::size_t ch = 0; ch < e.ch.size(); ++ch)
        for (int s = 0; s < 2; ++s)
            if (row_used(w, static_cast<int>(ch), s)) t[ch][s] = e.ch[ch] * a.m[s];

    const Space& bond = a.right();
    Env out;
    for (int b = 0; b < w.cols; ++b) {
        BlockMatrix acc(bond, bond, mpo.flux(site + 1, b));
        for (int sp = 0; sp < 2; ++sp) {
            std::optional<BlockMatrix> u;
            for (int ch = 0; ch < w.rows; ++ch) {
                const auto& op = w.at(ch, b);
                if (!op) continue;
                for (int s = 0; s < 2; ++s)
                    if ((*op)(sp, s) != cplx{0.0, 0.0}) accumulate(u, (*op)(sp, s), t[ch][s]);
            }
            if (u) add_into(acc, a.m[sp].adjoint() * *u);
        }
        out.ch.push_back(std::move(acc));
    }
    return out;
}

Env extend_right(const Env& g, const SiteTensor& a, const Mpo& mpo, int site) {
    const MpoSite& w = mpo.site(site);
    if (static_cast<int>(g.ch.size()) != w.cols) throw ShapeError("right environment / MPO channel mismatch");
    // t[b][s'] = G[b] A[s']^dagger
    const std::array<BlockMatrix, 2> adj{a.m[0].adjoint(), a.m[1].adjoint()};
    std::vector<std::array<BlockMatrix, 2>> t(g.ch.size());
    for (std::size_t ch = 0; ch < g.ch.size(); ++ch)
        for (int s = 0; s < 2; ++s)
            if (col_used(w, static_cast<int>(ch), s)) t[ch][s] = g.ch[ch] * adj[s];

    const Space& bond = a.left();
    Env out;
    for (int ch = 0; ch < w.rows; ++ch) {
        BlockMatrix acc(bond, bond, -mpo.flux(site, ch));
        for (int s = 0; s < 2; ++s) {
            std::optional<BlockMatrix> u;
            for (int b = 0; b < w.cols; ++b) {
                const auto& op = w.at(ch, b);
                if (!op) continue;
                for (int sp = 0; sp < 2; ++sp)
                    if ((*op)(sp, s) != cplx{0.0, 0.0}) accumulate(u, (*op)(sp, s), t[b][sp]);
            }
            if (u) add_into(acc, a.m[s] * *u);
        }
        out.ch.push_back(std::move(acc));
    }
    return out;
}

SiteTensor apply_one_site(const Env& e, const MpoSite& w, const Env& g, const SiteTensor& c) {
    std::vector<std::array<BlockMatrix, 2>> t(e.ch.size());
    for (std::size_t ch = 0; ch < e.ch.size(); ++ch)
        for (int s = 0; s < 2; ++s)
            if (row_used(w, static_cast<int>(ch), s)) t[ch][s] = e.ch[ch] * c.m[s];

    SiteTensor out(c.left(), c.right());
    for (int b = 0; b < w.cols; ++b)
        for (int sp = 0; sp < 2; ++sp) {
            std::optional<BlockMatrix> u;
            for (int ch = 0; ch < w.rows; ++ch) {
                const auto& op = w.at(ch, b);
                if (!op) continue;
                for (int s = 0; s < 2; ++s)
                    if ((*op)(sp, s) != cplx{0.0, 0.0}) accumulate(u, (*op)(sp, s), t[ch][s]);
            }
            if (u) add_into(out.m[sp], *u * g.ch[static_cast<std::size_t>(b)]);
        }
    return out;
}

TwoSite apply_two_site(const Env& e, const MpoSite& w1, const MpoSite& w2, const Env& g, const TwoSite& theta) {
    std::vector<std::array<BlockMatrix, 4>> t(e.ch.size());
    for (std::size_t ch = 0; ch < e.ch.size(); ++ch)
        for (int k = 0; k < 4; ++k)
            if (row_used(w1, static_cast<int>(ch), k / 2)) t[ch][k] = e.ch[ch] * theta[k];

    // u[b][2*s1'+s2]
    std::vector<std::array<std::optional<BlockMatrix>, 4>> u(static_cast<std::size_t>(w1.cols));
    for (int b = 0; b < w1.cols; ++b)
        for (int ch = 0; ch < w1.rows; ++ch) {
            const auto& op = w1.at(ch, b);
            if (!op) continue;
            for (int s1p = 0; s1p < 2; ++s1p)
                for (int s1 = 0; s1 < 2; ++s1) {
                    const cplx x = (*op)(s1p, s1);
                    if (x == cplx{0.0, 0.0}) continue;
                    for (int s2 = 0; s2 < 2; ++s2) accumulate(u[b][2 * s1p + s2], x, t[ch][2 * s1 + s2]);
                }
        }

    TwoSite out;
    for (int k = 0; k < 4; ++k) out[k] = BlockMatrix(theta[k].rows(), theta[k].cols(), theta[k].flux());
    for (int c = 0; c < w2.cols; ++c) {
        std::array<std::optional<BlockMatrix>, 4> v;
        for (int b = 0; b < w2.rows; ++b) {
            const auto& op = w2.at(b, c);
            if (!op) continue;
            for (int s2p = 0; s2p < 2; ++s2p)
                for (int s2 = 0; s2 < 2; ++s2) {
                    const cplx x = (*op)(s2p, s2);
                    if (x == cplx{0.0, 0.0}) continue;
                    for (int s1p = 0; s1p < 2; ++s1p)
                        if (u[b][2 * s1p + s2]) accumulate(v[2 * s1p + s2p], x, *u[b][2 * s1p + s2]);
                }
        }
        for (int k = 0; k < 4; ++k)
            if (v[k]) add_into(out[k], *v[k] * g.ch[static_cast<std::size_t>(c)]);
    }
    return out;
}

BlockMatrix apply_zero_site(const Env& e, const Env& g, const BlockMatrix& c) {
    if (e.ch.size() != g.ch.size()) throw ShapeError("zero-site environments disagree on channel count");
    BlockMatrix out(c.rows(), c.cols(), c.flux());
    for (std::size_t ch = 0; ch < e.ch.size(); ++ch) add_into(out, (e.ch[ch] * c) * g.ch[ch]);
    return out;
}

std::vector<Env> left_envs(const MpsState& psi, const Mpo& mpo, int upto) {
    check_mpo(psi, mpo);
    std::vector<Env> envs(static_cast<std::size_t>(psi.length() + 1));
    envs[0] = left_boundary(psi);
    for (int i = 0; i < upto; ++i)
        envs[static_cast<std::size_t>(i + 1)] = extend_left(envs[static_cast<std::size_t>(i)], psi.site(i), mpo, i);
    return envs;
}

std::vector<Env> right_envs(const MpsState& psi, const Mpo& mpo, int downto) {
    check_mpo(psi, mpo);
    const int L = psi.length();
    std::vector<Env> envs(static_cast<std::size_t>(L + 1));
    envs[static_cast<std::size_t>(L)] = right_boundary(psi);
    for (int i = L - 1; i >= downto; --i)
        envs[static_cast<std::size_t>(i)] = extend_right(envs[static_cast<std::size_t>(i + 1)], psi.site(i), mpo, i);
    return envs;
}

cplx expectation(const MpsState& psi, const Mpo& op) {
    const auto envs = left_envs(psi, op, psi.length());
    return envs.back().ch.at(0).block(0)(0, 0);
}

} // namespace nhmps
