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

#include "nhmps/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace nhmps {

SectorBasis::SectorBasis(int L, int filling) : L_(L), filling_(filling) {
    if (L < 1 || L > kMaxExactSites)
        throw std::length_error("exact backend supports 1 <= L <= " + std::to_string(kMaxExactSites));
    if (filling < 0 || filling > L) throw SpecError("filling must lie in [0, L]");
    for (std::uint32_t s = 0; s < (1u << L); ++s)
        if (std::popcount(s) == filling) states_.push_back(s);
}

Eigen::Index SectorBasis::index_of(std::uint32_t s) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), s);
    if (it == states_.end() || *it != s) return -1;
    return it - states_.begin();
}

VectorXc SectorBasis::embed(const VectorXc& v) const {
    if (v.size() != size()) throw ShapeError("sector vector has the wrong length");
    VectorXc full = VectorXc::Zero(Eigen::Index{1} << L_);
    for (Eigen::Index i = 0; i < size(); ++i) full(state(i)) = v(i);
    return full;
}

VectorXc SectorBasis::restrict(const VectorXc& full) const {
    if (full.size() != (Eigen::Index{1} << L_)) throw ShapeError("full vector has the wrong length");
    VectorXc v(size());
    for (Eigen::Index i = 0; i < size(); ++i) v(i) = full(state(i));
    return v;
}

SectorHamiltonian::SectorHamiltonian(const ModelSpec& model) : model_(model), basis_(model.L, model.filling) {
    model.validate();
    const int L = model.L;
    const Eigen::Index n = basis_.size();
    std::vector<Eigen::Triplet<double>> trips;
    diag_ = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::uint32_t s = basis_.state(i);
        for (int x = 0; x + 1 < L; ++x) {
            const int a = basis_.occupation(i, x), b = basis_.occupation(i, x + 1);
            diag_(i) += model.Delta * a * b;
            if (a != b) {
                const std::uint32_t t = s ^ (1u << (L - 1 - x)) ^ (1u << (L - 2 - x));
                trips.emplace_back(basis_.index_of(t), i, -0.5 * model.J);
            }
        }
    }
    hop_.resize(n, n);
    hop_.setFromTriplets(trips.begin(), trips.end());
    hop_.makeCompressed();
}

namespace {

template <bool Parallel>
void sector_matvec(const Eigen::SparseMatrix<double, Eigen::RowMajor>& hop, const Eigen::VectorXd& diag,
                   const VectorXc& x, VectorXc& y, const VectorXc* extra) {
    const Eigen::Index n = hop.rows();
    y.resize(n);
    const int* outer = hop.outerIndexPtr();
    const int* inner = hop.innerIndexPtr();
    const double* val = hop.valuePtr();
#pragma omp parallel for schedule(static) if (Parallel)
    for (Eigen::Index r = 0; r < n; ++r) {
        cplx acc = diag(r) * x(r);
        if (extra) acc += (*extra)(r) * x(r);
        for (int k = outer[r]; k < outer[r + 1]; ++k) acc += val[k] * x(inner[k]);
        y(r) = acc;
    }
}

} // namespace

void SectorHamiltonian::apply(const VectorXc& x, VectorXc& y, const VectorXc* extra) const {
    sector_matvec<true>(hop_, diag_, x, y, extra);
}

void SectorHamiltonian::apply_serial(const VectorXc& x, VectorXc& y, const VectorXc* extra) const {
    sector_matvec<false>(hop_, diag_, x, y, extra);
}

VectorXc SectorHamiltonian::measurement_diagonal(const MeasurementSpec& spec, const std::vector<SiteSign>& events) const {
    std::vector<int> sign(static_cast<std::size_t>(model_.L), 0);
    for (const auto& e : events) {
        if (e.site < 0 || e.site >= model_.L) throw SpecError("measurement site out of range");
        if (e.sign != 1 && e.sign != -1) throw SpecError("measurement sign must be +1 or -1");
        if (sign[static_cast<std::size_t>(e.site)] != 0)
            throw SpecError("duplicate measurement site " + std::to_string(e.site));
        sign[static_cast<std::size_t>(e.site)] = e.sign;
    }
    VectorXc d = VectorXc::Zero(basis_.size());
    for (Eigen::Index i = 0; i < basis_.size(); ++i) {
        int s = 0;
        for (int x = 0; x < model_.L; ++x) s += sign[static_cast<std::size_t>(x)] * basis_.occupation(i, x);
        d(i) = cplx{0.0, spec.M * s};
    }
    return d;
}

MatrixXc SectorHamiltonian::to_dense() const {
    MatrixXc m = MatrixXc(hop_.cast<cplx>());
    m.diagonal() += diag_.cast<cplx>();
    return m;
}

DenseGroundState dense_ground_state(const SectorHamiltonian& h) {
    const Eigen::Index n = h.basis().size();
    LinearOp op = [&h](const VectorXc& x) -> VectorXc {
        VectorXc y;
        h.apply(x, y);
        return y;
    };
    VectorXc start(n);
    for (Eigen::Index i = 0; i < n; ++i) start(i) = 1.0 + 0.1 * std::sin(static_cast<double>(i) + 1.0);
    const EigenPair gs = lanczos_ground(op, start.normalized(), {60, 100, 1e-12});
    VectorXc v = gs.vector.normalized();
    // Fix the global phase: largest component real positive.
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    v *= std::abs(v(k)) / v(k);
    return {v, gs.value, gs.residual};
}

DenseGroundState dense_ground_state(const ModelSpec& model) { return dense_ground_state(SectorHamiltonian(model)); }

std::vector<double> dense_densities(const SectorBasis& basis, const VectorXc& v) {
    std::vector<double> n(static_cast<std::size_t>(basis.length()), 0.0);
    const double norm2 = v.squaredNorm();
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
        const double p = std::norm(v(i));
        for (int x = 0; x < basis.length(); ++x)
            if (basis.occupation(i, x)) n[static_cast<std::size_t>(x)] += p;
    }
    for (double& x : n) x /= norm2;
    return n;
}

double dense_entropy(const SectorBasis& basis, const VectorXc& v, int cut) {
    const int L = basis.length();
    if (cut < 1 || cut >= L) throw SpecError("entropy cut must lie in [1, L-1]");
    const Eigen::Index rows = Eigen::Index{1} << cut, cols = Eigen::Index{1} << (L - cut);
    MatrixXc m = MatrixXc::Zero(rows, cols);
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
        const std::uint32_t s = basis.state(i);
        m(s >> (L - cut), s & (cols - 1)) = v(i);
    }
    m /= v.norm();
    // Reduced density matrix of the left block.
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(m * m.adjoint(), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double p = es.eigenvalues()(i);
        if (p > 1e-24) s -= p * std::log2(p);
    }
    return std::max(0.0, s);
}

void dense_step(const SectorHamiltonian& h, VectorXc& v, double dt, const VectorXc* extra, bool renormalize,
                const KrylovOptions& opts) {
    LinearOp op = [&h, extra](const VectorXc& x) -> VectorXc {
        VectorXc y;
        h.apply(x, y, extra);
        return y;
    };
    v = krylov_expm_apply(op, v, dt, opts);
    if (renormalize) {
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n)) throw std::runtime_error("dense state norm vanished");
        v /= n;
    }
}

} // namespace nhmps
