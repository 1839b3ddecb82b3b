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

#include "nhmps/mps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

namespace nhmps {

double SiteTensor::norm() const { return std::sqrt(m[0].norm() * m[0].norm() + m[1].norm() * m[1].norm()); }

MpsState::MpsState(std::vector<SiteTensor> sites, int filling, int center)
    : sites_(std::move(sites)), filling_(filling), center_(center) {
    if (sites_.empty()) throw SpecError("MPS needs at least one site");
    if (!(sites_.front().left() == Space::single(0)))
        throw SpecError("left boundary bond must be the 1-dimensional charge-0 space");
    if (!(sites_.back().right() == Space::single(filling)))
        throw SpecError("right boundary bond must carry the total filling");
    for (std::size_t i = 0; i + 1 < sites_.size(); ++i)
        if (!(sites_[i].right() == sites_[i + 1].left())) throw ShapeError("adjacent MPS bonds disagree");
    if (center_ < kNoCenter || center_ >= length()) throw SpecError("center out of range");
}

const Space& MpsState::bond(int b) const {
    if (b == length()) return sites_.back().right();
    return sites_.at(static_cast<std::size_t>(b)).left();
}

std::vector<int> MpsState::bond_dims() const {
    std::vector<int> d;
    for (int b = 0; b <= length(); ++b) d.push_back(bond(b).dim());
    return d;
}

int MpsState::max_bond_dim() const {
    const auto d = bond_dims();
    return *std::max_element(d.begin(), d.end());
}

void MpsState::canonicalize(int c) {
    if (c < 0 || c >= length()) throw SpecError("canonical center out of range");
    for (int i = 0; i < c; ++i) {
        LeftSplit s = split_left(site(i));
        site(i) = std::move(s.q);
        site(i + 1) = multiply_left(s.r, site(i + 1));
    }
    for (int i = length() - 1; i > c; --i) {
        RightSplit s = split_right(site(i));
        site(i) = std::move(s.q);
        site(i - 1) = multiply_right(site(i - 1), s.r);
    }
    center_ = c;
}

void MpsState::move_center(int c) {
    if (center_ == kNoCenter) {
        canonicalize(c);
        return;
    }
    if (c < 0 || c >= length()) throw SpecError("canonical center out of range");
    while (center_ < c) {
        LeftSplit s = split_left(site(center_));
        site(center_) = std::move(s.q);
        site(center_ + 1) = multiply_left(s.r, site(center_ + 1));
        ++center_;
    }
    while (center_ > c) {
        RightSplit s = split_right(site(center_));
        site(center_) = std::move(s.q);
        site(center_ - 1) = multiply_right(site(center_ - 1), s.r);
        --center_;
    }
}

double MpsState::norm() const {
    if (center_ != kNoCenter) return site(center_).norm();
    return std::sqrt(std::abs(overlap(*this, *this)));
}

void MpsState::scale(cplx s) {
    SiteTensor& t = site(center_ == kNoCenter ? 0 : center_);
    t.m[0] *= s;
    t.m[1] *= s;
}

void MpsState::normalize() {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw NormCollapse("state norm vanished or diverged (" + std::to_string(n) + ")");
    scale(1.0 / n);
}

namespace {

double identity_deviation(const BlockMatrix& g) {
    double err = 0.0;
    for (std::size_t c = 0; c < g.num_blocks(); ++c) {
        const MatrixXc& b = g.block(c);
        if (b.size() == 0) continue;
        err = std::max(err, (b - MatrixXc::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff());
    }
    return err;
}

cplx trace(const BlockMatrix& m) {
    cplx t = 0.0;
    for (std::size_t c = 0; c < m.num_blocks(); ++c)
        if (m.row_sector(c) >= 0 && m.rows()[static_cast<std::size_t>(m.row_sector(c))].charge == m.cols()[c].charge)
            t += m.block(c).trace();
    return t;
}

} // namespace

double MpsState::canonical_error() const {
    double err = 0.0;
    if (center_ == kNoCenter) return err;
    for (int i = 0; i < center_; ++i) {
        const auto& a = site(i).m;
        err = std::max(err, identity_deviation(a[0].adjoint() * a[0] + a[1].adjoint() * a[1]));
    }
    for (int i = center_ + 1; i < length(); ++i) {
        const auto& a = site(i).m;
        err = std::max(err, identity_deviation(a[0] * a[0].adjoint() + a[1] * a[1].adjoint()));
    }
    return err;
}

LeftSplit split_left(const SiteTensor& c) {
    const Space& left = c.left();
    const Space& right = c.right();
    std::vector<Sector> new_sectors;
    std::vector<QrResult> qrs;
    std::vector<std::size_t> source;
    for (std::size_t rc = 0; rc < right.num_sectors(); ++rc) {
        const MatrixXc& top = c.m[0].block(rc);
        const MatrixXc& bottom = c.m[1].block(rc);
        const Eigen::Index rows = top.rows() + bottom.rows();
        if (rows == 0) continue;
        MatrixXc stacked(rows, right[rc].dim);
        stacked << top, bottom;
        qrs.push_back(qr_thin(stacked));
        new_sectors.push_back({right[rc].charge, static_cast<int>(qrs.back().q.cols())});
        source.push_back(rc);
    }
    Space mid(new_sectors);
    LeftSplit out{SiteTensor(left, mid), BlockMatrix(mid, right, 0)};
    for (std::size_t k = 0; k < source.size(); ++k) {
        const std::size_t rc = source[k];
        const Eigen::Index top_rows = c.m[0].block(rc).rows();
        const Eigen::Index bottom_rows = c.m[1].block(rc).rows();
        out.q.m[0].block(k) = qrs[k].q.topRows(top_rows);
        out.q.m[1].block(k) = qrs[k].q.bottomRows(bottom_rows);
        out.r.block(rc) = qrs[k].r;
    }
    return out;
}

RightSplit split_right(const SiteTensor& c) {
    const Space& left = c.left();
    const Space& right = c.right();
    std::vector<Sector> new_sectors;
    std::vector<QrResult> qrs;
    std::vector<std::size_t> source;
    std::vector<std::array<int, 2>> col_sector;
    for (std::size_t lc = 0; lc < left.num_sectors(); ++lc) {
        const int q = left[lc].charge;
        const int c0 = right.find(q), c1 = right.find(q + 1);
        const Eigen::Index w0 = c0 < 0 ? 0 : right[static_cast<std::size_t>(c0)].dim;
        const Eigen::Index w1 = c1 < 0 ? 0 : right[static_cast<std::size_t>(c1)].dim;
        if (w0 + w1 == 0) continue;
        MatrixXc wide(left[lc].dim, w0 + w1);
        if (w0) wide.leftCols(w0) = c.m[0].block(static_cast<std::size_t>(c0));
        if (w1) wide.rightCols(w1) = c.m[1].block(static_cast<std::size_t>(c1));
        qrs.push_back(qr_thin(wide.adjoint()));
        new_sectors.push_back({q, static_cast<int>(qrs.back().q.cols())});
        source.push_back(lc);
        col_sector.push_back({c0, c1});
    }
    Space mid(new_sectors);
    RightSplit out{BlockMatrix(left, mid, 0), SiteTensor(mid, right)};
    for (std::size_t k = 0; k < source.size(); ++k) {
        const MatrixXc qadj = qrs[k].q.adjoint(); // k x (w0 + w1)
        const auto [c0, c1] = col_sector[k];
        Eigen::Index w0 = 0;
        if (c0 >= 0) {
            w0 = right[static_cast<std::size_t>(c0)].dim;
            out.q.m[0].block(static_cast<std::size_t>(c0)) = qadj.leftCols(w0);
        }
        if (c1 >= 0)
            out.q.m[1].block(static_cast<std::size_t>(c1)) = qadj.rightCols(qadj.cols() - w0);
        out.r.block(k) = qrs[k].r.adjoint();
    }
    return out;
}

SiteTensor multiply_left(const BlockMatrix& r, const SiteTensor& a) {
    SiteTensor out;
    out.m = {r * a.m[0], r * a.m[1]};
    return out;
}

SiteTensor multiply_right(const SiteTensor& a, const BlockMatrix& r) {
    SiteTensor out;
    out.m = {a.m[0] * r, a.m[1] * r};
    return out;
}

TwoSite merge(const SiteTensor& a, const SiteTensor& b) {
    return {a.m[0] * b.m[0], a.m[0] * b.m[1], a.m[1] * b.m[0], a.m[1] * b.m[1]};
}

TwoSiteSplit split_two_site(const TwoSite& theta, const TruncationPolicy& policy, bool absorb_right) {
    const Space& left = theta[0].rows();
    const Space& right = theta[0].cols();

    struct Piece {
        int charge;
        SvdMatrices svd;
        std::array<int, 2> lsec; // left sector for s1 = 0, 1
        std::array<int, 2> rsec; // right sector for s2 = 0, 1
    };
    std::vector<Piece> pieces;
    std::vector<int> mids;
    for (const auto& s : left.sectors())
        for (int s1 = 0; s1 < 2; ++s1) mids.push_back(s.charge + s1);
    std::sort(mids.begin(), mids.end());
    mids.erase(std::unique(mids.begin(), mids.end()), mids.end());

    for (int q : mids) {
        Piece p{q, {}, {left.find(q), left.find(q - 1)}, {right.find(q), right.find(q + 1)}};
        Eigen::Index rows = 0, cols = 0;
        for (int s1 = 0; s1 < 2; ++s1)
            if (p.lsec[s1] >= 0) rows += left[static_cast<std::size_t>(p.lsec[s1])].dim;
        for (int s2 = 0; s2 < 2; ++s2)
            if (p.rsec[s2] >= 0) cols += right[static_cast<std::size_t>(p.rsec[s2])].dim;
        if (rows == 0 || cols == 0) continue;
        MatrixXc m(rows, cols);
        Eigen::Index r0 = 0;
        for (int s1 = 0; s1 < 2; ++s1) {
            if (p.lsec[s1] < 0) continue;
            const Eigen::Index h = left[static_cast<std::size_t>(p.lsec[s1])].dim;
            Eigen::Index c0 = 0;
            for (int s2 = 0; s2 < 2; ++s2) {
                if (p.rsec[s2] < 0) continue;
                const Eigen::Index w = right[static_cast<std::size_t>(p.rsec[s2])].dim;
                m.block(r0, c0, h, w) = theta[static_cast<std::size_t>(2 * s1 + s2)].block(static_cast<std::size_t>(p.rsec[s2]));
                c0 += w;
            }
            r0 += h;
        }
        p.svd = svd_thin(m);
        pieces.push_back(std::move(p));
    }

    // Global ordering of singular values across sectors.
    std::vector<std::tuple<double, std::size_t, Eigen::Index>> all;
    for (std::size_t k = 0; k < pieces.size(); ++k)
        for (Eigen::Index i = 0; i < pieces[k].svd.s.size(); ++i) all.emplace_back(pieces[k].svd.s(i), k, i);
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    std::vector<double> values;
    for (const auto& t : all) values.push_back(std::get<0>(t));
    auto [keep, discarded] = truncation_cut(values, policy);
    keep = std::min(keep, values.size());

    std::vector<int> kept(pieces.size(), 0);
    for (std::size_t i = 0; i < keep; ++i) ++kept[std::get<1>(all[i])];

    std::vector<Sector> mid_sectors;
    std::vector<std::size_t> mid_piece;
    for (std::size_t k = 0; k < pieces.size(); ++k)
        if (kept[k] > 0) {
            mid_sectors.push_back({pieces[k].charge, kept[k]});
            mid_piece.push_back(k);
        }
    Space mid(mid_sectors);

    TwoSiteSplit out;
    out.left = SiteTensor(left, mid);
    out.right = SiteTensor(mid, right);
    out.discarded_weight = discarded;
    out.singular_values.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(keep));

    for (std::size_t j = 0; j < mid_piece.size(); ++j) {
        const Piece& p = pieces[mid_piece[j]];
        const Eigen::Index k = kept[mid_piece[j]];
        MatrixXc u = p.svd.u.leftCols(k);
        MatrixXc vh = p.svd.v.leftCols(k).adjoint();
        const Eigen::VectorXd s = p.svd.s.head(k);
        if (absorb_right)
            vh = s.asDiagonal() * vh;
        else
            u = u * s.asDiagonal();
        Eigen::Index r0 = 0;
        for (int s1 = 0; s1 < 2; ++s1) {
            if (p.lsec[s1] < 0) continue;
            const Eigen::Index h = left[static_cast<std::size_t>(p.lsec[s1])].dim;
            out.left.m[static_cast<std::size_t>(s1)].block(j) = u.middleRows(r0, h);
            r0 += h;
        }
        Eigen::Index c0 = 0;
        for (int s2 = 0; s2 < 2; ++s2) {
            if (p.rsec[s2] < 0) continue;
            const Eigen::Index w = right[static_cast<std::size_t>(p.rsec[s2])].dim;
            out.right.m[static_cast<std::size_t>(s2)].block(static_cast<std::size_t>(p.rsec[s2])) = vh.middleCols(c0, w);
            c0 += w;
        }
    }
    return out;
}

MpsState product_state(const std::vector<int>& occ) {
    if (occ.empty()) throw SpecError("product state needs at least one site");
    std::vector<SiteTensor> sites;
    int q = 0;
    for (int n : occ) {
        if (n != 0 && n != 1) throw SpecError("occupations must be 0 or 1");
        SiteTensor t(Space::single(q), Space::single(q + n));
        t.m[static_cast<std::size_t>(n)].block(0)(0, 0) = 1.0;
        sites.push_back(std::move(t));
        q += n;
    }
    return MpsState(std::move(sites), q, 0);
}

namespace {

// Overlap environments of psi with itself: left[k] spans bond k (bra x ket), right[k] (ket x bra).
std::vector<BlockMatrix> left_overlap_envs(const MpsState& psi) {
    std::vector<BlockMatrix> env;
    BlockMatrix e(psi.bond(0), psi.bond(0), 0);
    e.block(0)(0, 0) = 1.0;
    env.push_back(e);
    for (int i = 0; i < psi.length(); ++i) {
        const auto& a = psi.site(i).m;
        env.push_back(a[0].adjoint() * (env.back() * a[0]) + a[1].adjoint() * (env.back() * a[1]));
    }
    return env;
}

std::vector<BlockMatrix> right_overlap_envs(const MpsState& psi) {
    const int L = psi.length();
    std::vector<BlockMatrix> env(static_cast<std::size_t>(L + 1));
    BlockMatrix e(psi.bond(L), psi.bond(L), 0);
    e.block(0)(0, 0) = 1.0;
    env[static_cast<std::size_t>(L)] = e;
    for (int i = L - 1; i >= 0; --i) {
        const auto& a = psi.site(i).m;
        const auto& f = env[static_cast<std::size_t>(i + 1)];
        env[static_cast<std::size_t>(i)] = (a[0] * f) * a[0].adjoint() + (a[1] * f) * a[1].adjoint();
    }
    return env;
}

} // namespace

std::vector<double> local_densities(const MpsState& psi) {
    const auto left = left_overlap_envs(psi);
    const auto right = right_overlap_envs(psi);
    const double norm2 = trace(left.back()).real();
    if (!(norm2 > 0.0)) throw NormCollapse("cannot evaluate densities of a zero state");
    std::vector<double> n;
    for (int x = 0; x < psi.length(); ++x) {
        const auto& a1 = psi.site(x).m[1];
        const BlockMatrix t = ((left[static_cast<std::size_t>(x)] * a1) * right[static_cast<std::size_t>(x + 1)]) * a1.adjoint();
        n.push_back(trace(t).real() / norm2);
    }
    return n;
}

namespace {

std::vector<double> center_schmidt(const SiteTensor& c) {
    std::vector<double> s;
    for (std::size_t rc = 0; rc < c.right().num_sectors(); ++rc) {
        const MatrixXc& top = c.m[0].block(rc);
        const MatrixXc& bottom = c.m[1].block(rc);
        if (top.rows() + bottom.rows() == 0) continue;
        MatrixXc stacked(top.rows() + bottom.rows(), top.cols());
        stacked << top, bottom;
        const Eigen::VectorXd sv = svd_thin(stacked).s;
        s.insert(s.end(), sv.data(), sv.data() + sv.size());
    }
    std::sort(s.begin(), s.end(), std::greater<>());
    double total = 0.0;
    for (double x : s) total += x * x;
    if (total > 0.0)
        for (double& x : s) x /= std::sqrt(total);
    return s;
}

} // namespace

std::vector<double> schmidt_values(const MpsState& psi, int cut) {
    if (cut < 1 || cut >= psi.length()) throw SpecError("entropy cut must lie in [1, L-1]");
    MpsState work = psi;
    work.move_center(cut - 1);
    return center_schmidt(work.site(cut - 1));
}

double entropy_bits(const std::vector<double>& schmidt) {
    double s = 0.0;
    for (double x : schmidt) {
        if (x < 1e-12) continue;
        const double p = x * x;
        s -= p * std::log2(p);
    }
    return std::max(0.0, s);
}

double entanglement_entropy(const MpsState& psi, int cut) { return entropy_bits(schmidt_values(psi, cut)); }

std::vector<double> entropy_profile(const MpsState& psi) {
    MpsState work = psi;
    work.move_center(0);
    std::vector<double> out;
    for (int i = 0; i + 1 < work.length(); ++i) {
        out.push_back(entropy_bits(center_schmidt(work.site(i))));
        work.move_center(i + 1);
    }
    return out;
}

MpsState renormalize(MpsState psi) {
    if (psi.center() == MpsState::kNoCenter) psi.canonicalize(0);
    psi.normalize();
    return psi;
}

cplx overlap(const MpsState& bra, const MpsState& ket) {
    if (bra.length() != ket.length()) throw ShapeError("overlap of states with different lengths");
    if (bra.filling() != ket.filling()) return 0.0;
    BlockMatrix e(bra.bond(0), ket.bond(0), 0);
    e.block(0)(0, 0) = 1.0;
    for (int i = 0; i < ket.length(); ++i) {
        const auto& a = ket.site(i).m;
        const auto& b = bra.site(i).m;
        e = b[0].adjoint() * (e * a[0]) + b[1].adjoint() * (e * a[1]);
    }
    return e.block(0)(0, 0);
}

VectorXc to_dense(const MpsState& psi) {
    const int L = psi.length();
    if (L > 20) throw std::length_error("dense conversion limited to L <= 20");
    MatrixXc acc = MatrixXc::Identity(1, 1);
    for (int i = 0; i < L; ++i) {
        const MatrixXc a0 = psi.site(i).m[0].to_dense();
        const MatrixXc a1 = psi.site(i).m[1].to_dense();
        MatrixXc next(acc.rows() * 2, a0.cols());
        const MatrixXc p0 = acc * a0, p1 = acc * a1;
        for (Eigen::Index r = 0; r < acc.rows(); ++r) {
            next.row(2 * r) = p0.row(r);
            next.row(2 * r + 1) = p1.row(r);
        }
        acc = std::move(next);
    }
    return acc.col(0);
}

DenseImport from_dense(const VectorXc& v, int L, int chi_max) {
    if (L < 1 || L > 20) throw std::length_error("dense import limited to 1 <= L <= 20");
    if (v.size() != (Eigen::Index{1} << L)) throw ShapeError("dense vector length must be 2^L");
    if (chi_max < 1) throw SpecError("chi_max must be at least 1");
    const double vmax = v.cwiseAbs().maxCoeff();
    if (!(vmax > 0.0)) throw NormCollapse("cannot import the zero vector");
    int filling = -1;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) <= 1e-14 * vmax) continue;
        const int n = std::popcount(static_cast<std::uint64_t>(i));
        if (filling >= 0 && n != filling)
            throw SpecError("dense vector mixes particle-number sectors");
        filling = n;
    }

    // remainder[q]: (bond states with charge q) x (configurations of the remaining sites)
    std::map<int, MatrixXc> remainder;
    remainder[0] = v.transpose();
    Space left = Space::single(0);
    std::vector<SiteTensor> sites;
    double discarded = 0.0;

    for (int k = 0; k < L - 1; ++k) {
        const Eigen::Index half = (Eigen::Index{1} << (L - k - 1));
        std::map<int, std::pair<MatrixXc, std::array<int, 2>>> stacked; // new charge -> matrix
        for (int q = 0; q <= k + 1; ++q) {
            std::array<int, 2> src{left.find(q), left.find(q - 1)};
            Eigen::Index rows = 0;
            for (int s = 0; s < 2; ++s)
                if (src[s] >= 0) rows += left[static_cast<std::size_t>(src[s])].dim;
            if (rows == 0) continue;
            MatrixXc m(rows, half);
            Eigen::Index r0 = 0;
            for (int s = 0; s < 2; ++s) {
                if (src[s] < 0) continue;
                const MatrixXc& rem = remainder.at(q - s);
                m.middleRows(r0, rem.rows()) = rem.middleCols(s * half, half);
                r0 += rem.rows();
            }
            stacked[q] = {m, src};
        }
        std::vector<std::tuple<double, int, Eigen::Index>> all;
        std::map<int, SvdMatrices> svds;
        for (auto& [q, entry] : stacked) {
            svds[q] = svd_thin(entry.first);
            for (Eigen::Index i = 0; i < svds[q].s.size(); ++i) all.emplace_back(svds[q].s(i), q, i);
        }
        std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
        std::vector<double> values;
        for (const auto& t : all) values.push_back(std::get<0>(t));
        auto [keep, dw] = truncation_cut(values, {static_cast<std::size_t>(chi_max), 0.0});
        discarded += dw;
        std::map<int, int> kept;
        for (std::size_t i = 0; i < std::min(keep, values.size()); ++i) ++kept[std::get<1>(all[i])];

        std::vector<Sector> sectors;
        for (auto [q, n] : kept) sectors.push_back({q, n});
        Space right(sectors);
        SiteTensor t(left, right);
        std::map<int, MatrixXc> next;
        for (std::size_t c = 0; c < right.num_sectors(); ++c) {
            const int q = right[c].charge;
            const Eigen::Index n = right[c].dim;
            const SvdMatrices& svd = svds.at(q);
            const auto& src = stacked.at(q).second;
            Eigen::Index r0 = 0;
            for (int s = 0; s < 2; ++s) {
                if (src[s] < 0) continue;
                const Eigen::Index h = left[static_cast<std::size_t>(src[s])].dim;
                t.m[static_cast<std::size_t>(s)].block(c) = svd.u.block(r0, 0, h, n);
                r0 += h;
            }
            next[q] = svd.s.head(n).asDiagonal() * svd.v.leftCols(n).adjoint();
        }
        sites.push_back(std::move(t));
        remainder = std::move(next);
        left = right;
    }

    SiteTensor last(left, Space::single(filling));
    for (int s = 0; s < 2; ++s) {
        const int ls = left.find(filling - s);
        if (ls < 0) continue;
        last.m[static_cast<std::size_t>(s)].block(0) = remainder.at(filling - s).col(s);
    }
    sites.push_back(std::move(last));
    return {MpsState(std::move(sites), filling, L - 1), discarded};
}

// ---- snapshots ----

namespace {

constexpr char kMagic[8] = {'N', 'H', 'M', 'P', 'S', 'N', 'A', 'P'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void put(std::ostream& os, T value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is) throw std::runtime_error("snapshot truncated");
    return value;
}

} // namespace

void write_snapshot(std::ostream& os, const MpsState& psi) {
    os.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(os, kSnapshotVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(psi.length()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(psi.filling()));
    put<std::int32_t>(os, psi.center());
    for (int b = 0; b <= psi.length(); ++b) put<std::uint32_t>(os, static_cast<std::uint32_t>(psi.bond(b).dim()));
    for (int b = 0; b <= psi.length(); ++b) {
        const Space& s = psi.bond(b);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(s.num_sectors()));
        for (const auto& sec : s.sectors()) {
            put<std::int32_t>(os, sec.charge);
            put<std::uint32_t>(os, static_cast<std::uint32_t>(sec.dim));
        }
    }
    for (int i = 0; i < psi.length(); ++i)
        for (int s = 0; s < 2; ++s) {
            const BlockMatrix& m = psi.site(i).m[static_cast<std::size_t>(s)];
            for (std::size_t c = 0; c < m.num_blocks(); ++c) {
                const MatrixXc& b = m.block(c);
                for (Eigen::Index k = 0; k < b.size(); ++k) {
                    put<double>(os, b.data()[k].real());
                    put<double>(os, b.data()[k].imag());
                }
            }
        }
    if (!os) throw std::runtime_error("failed to write snapshot");
}

MpsState read_snapshot(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw std::runtime_error("not an MPS snapshot");
    const auto version = get<std::uint32_t>(is);
    if (version != kSnapshotVersion) throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
    const int L = static_cast<int>(get<std::uint32_t>(is));
    const int filling = static_cast<int>(get<std::uint32_t>(is));
    const int center = get<std::int32_t>(is);
    if (L < 1 || L > 100000) throw std::runtime_error("corrupt snapshot length");
    std::vector<int> chi;
    for (int b = 0; b <= L; ++b) chi.push_back(static_cast<int>(get<std::uint32_t>(is)));
    std::vector<Space> bonds;
    for (int b = 0; b <= L; ++b) {
        const auto n = get<std::uint32_t>(is);
        std::vector<Sector> secs;
        for (std::uint32_t k = 0; k < n; ++k) {
            const int q = get<std::int32_t>(is);
            const int d = static_cast<int>(get<std::uint32_t>(is));
            secs.push_back({q, d});
        }
        bonds.emplace_back(secs);
        if (bonds.back().dim() != chi[static_cast<std::size_t>(b)]) throw std::runtime_error("corrupt snapshot bond header");
    }
    std::vector<SiteTensor> sites;
    for (int i = 0; i < L; ++i) {
        SiteTensor t(bonds[static_cast<std::size_t>(i)], bonds[static_cast<std::size_t>(i + 1)]);
        for (int s = 0; s < 2; ++s) {
            BlockMatrix& m = t.m[static_cast<std::size_t>(s)];
            for (std::size_t c = 0; c < m.num_blocks(); ++c) {
                MatrixXc& b = m.block(c);
                for (Eigen::Index k = 0; k < b.size(); ++k) {
                    const double re = get<double>(is);
                    const double im = get<double>(is);
                    b.data()[k] = {re, im};
                }
            }
        }
        sites.push_back(std::move(t));
    }
    return MpsState(std::move(sites), filling, center);
}

void save_snapshot(const std::string& path, const MpsState& psi) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open snapshot for writing: " + path);
    write_snapshot(os, psi);
}

MpsState load_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open snapshot: " + path);
    return read_snapshot(is);
}

} // namespace nhmps
