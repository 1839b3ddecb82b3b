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

#include "nhmps/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace nhmps {

namespace {

constexpr double kBreakdown = 1e-14;

// Classical Gram-Schmidt against basis columns [0, j); a second pass only when
// the first one cancelled most of w (DGKS criterion).
void orthogonalize(const MatrixXc& basis, Eigen::Index j, VectorXc& w, Eigen::Ref<VectorXc> coeffs) {
    VectorXc c(j);
    for (int pass = 0; pass < 2; ++pass) {
        const double before = w.norm();
        c.noalias() = basis.leftCols(j).adjoint() * w;
        w.noalias() -= basis.leftCols(j) * c;
        coeffs.head(j) += c;
        if (w.norm() > 0.7071 * before) break;
    }
}

} // namespace

VectorXc krylov_expm_apply(const LinearOp& op, const VectorXc& v, cplx dt, const KrylovOptions& opts) {
    if (opts.krylov_dim < 1) throw std::invalid_argument("krylov_dim must be positive");
    const Eigen::Index n = v.size();
    VectorXc w = v;
    if (n == 0 || dt == cplx{0.0, 0.0}) return w;
    if (w.norm() == 0.0) throw std::invalid_argument("krylov_expm_apply needs a nonzero vector");

    const cplx scale = cplx{0.0, -1.0} * dt; // generator A = -i dt Op over unit time
    const Eigen::Index m_max = std::min<Eigen::Index>(opts.krylov_dim, n);

    double done = 0.0;
    double h = 1.0;
    int shrink_budget = 60;
    MatrixXc basis(n, m_max + 1);
    MatrixXc hess = MatrixXc::Zero(m_max + 1, m_max);

    while (done < 1.0 - 1e-15) {
        const double beta = w.norm();
        if (beta == 0.0) return w;
        basis.col(0) = w / beta;
        hess.setZero();

        Eigen::Index m = 0;
        bool breakdown = false;
        double remaining = 1.0 - done;
        h = std::min(h, remaining);
        double err = std::numeric_limits<double>::infinity();
        MatrixXc small_exp;

        for (Eigen::Index j = 0; j < m_max; ++j) {
            VectorXc next = scale * op(basis.col(j));
            orthogonalize(basis, j + 1, next, hess.col(j));
            const double hn = next.norm();
            hess(j + 1, j) = hn;
            m = j + 1;
            const double hnorm = hess.topLeftCorner(m, m).cwiseAbs().sum() + 1.0;
            if (hn < kBreakdown * hnorm) {
                breakdown = true;
                break;
            }
            basis.col(j + 1) = next / hn;

            small_exp = (h * hess.topLeftCorner(m, m)).exp();
            err = beta * h * hn * std::abs(small_exp(m - 1, 0));
            if (err <= opts.tol * beta) break;
        }

        if (breakdown) {
            h = remaining;
            small_exp = (h * hess.topLeftCorner(m, m)).exp();
            err = 0.0;
        } else {
            const double hn = std::abs(hess(m, m - 1));
            while (err > opts.tol * beta) {
                if (--shrink_budget < 0 || h < 1e-12) {
                    std::ostringstream os;
                    os << "Krylov exponential did not converge (residual " << err / beta
                       << " at substep " << h << ")";
                    throw ConvergenceError(os.str(), err / beta);
                }
                h *= 0.5;
                small_exp = (h * hess.topLeftCorner(m, m)).exp();
                err = beta * h * hn * std::abs(small_exp(m - 1, 0));
            }
        }

        w = beta * (basis.leftCols(m) * small_exp.col(0));
        done += h;
        h = std::min(2.0 * h, 1.0 - done);
        if (h <= 0.0) break;
    }
    return w;
}

ComplexTensor krylov_expm_apply(const LinearOp& op, const ComplexTensor& v, cplx dt,
                                const KrylovOptions& opts) {
    const VectorXc out = krylov_expm_apply(op, v.as_vector(), dt, opts);
    return ComplexTensor(v.shape(), std::vector<cplx>(out.data(), out.data() + out.size()));
}

EigenPair lanczos_ground(const LinearOp& op, const VectorXc& start, const LanczosOptions& opts) {
    const Eigen::Index n = start.size();
    if (n == 0) throw std::invalid_argument("lanczos_ground on empty space");
    VectorXc x = start;
    if (x.norm() == 0.0) x.setOnes();
    x.normalize();

    const Eigen::Index m_max = std::min<Eigen::Index>(opts.krylov_dim, n);
    EigenPair best;
    best.value = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        MatrixXc basis(n, m_max + 1);
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m_max);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(m_max);
        basis.col(0) = x;
        Eigen::Index m = 0;
        double last_beta = 0.0;
        for (Eigen::Index j = 0; j < m_max; ++j) {
            VectorXc w = op(basis.col(j));
            VectorXc coeffs = VectorXc::Zero(j + 1);
            orthogonalize(basis, j + 1, w, coeffs);
            alpha(j) = coeffs(j).real();
            last_beta = w.norm();
            m = j + 1;
            if (last_beta < 1e-13 * (std::abs(alpha(j)) + 1.0)) {
                last_beta = 0.0;
                break;
            }
            if (j + 1 < m_max) beta(j) = last_beta;
            basis.col(j + 1) = w / last_beta;
        }

        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            tri(i, i) = alpha(i);
            if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta(i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        const Eigen::VectorXd y = es.eigenvectors().col(0);
        x = basis.leftCols(m) * y.cast<cplx>();
        x.normalize();

        best.value = es.eigenvalues()(0);
        best.vector = x;
        best.residual = last_beta * std::abs(y(m - 1));
        if (best.residual < opts.tol || m == n) break;
    }
    return best;
}

} // namespace nhmps
