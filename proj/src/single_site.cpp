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

#include "nhmps/single_site.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "nhmps/rng.hpp"

namespace nhmps::single_site {

namespace {

Eigen::Matrix2cd number_op() {
    Eigen::Matrix2cd n = Eigen::Matrix2cd::Zero();
    n(1, 1) = 1.0;
    return n;
}

using Rhs = std::function<Eigen::Matrix2cd(const Eigen::Matrix2cd&)>;

Trajectory rk4_density(const State& s0, double t_end, double dt, const Rhs& f) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("integration needs dt > 0 and t_end >= 0");
    const long steps = std::lround(std::ceil(t_end / dt - 1e-9));
    const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
    Eigen::Matrix2cd rho = s0.matrix();
    Trajectory out;
    auto record = [&](double t) { out.push_back({t, rho(1, 1).real(), rho(1, 0), rho.trace().real()}); };
    record(0.0);
    for (long k = 0; k < steps; ++k) {
        const Eigen::Matrix2cd k1 = f(rho);
        const Eigen::Matrix2cd k2 = f(rho + 0.5 * h * k1);
        const Eigen::Matrix2cd k3 = f(rho + 0.5 * h * k2);
        const Eigen::Matrix2cd k4 = f(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        record(h * static_cast<double>(k + 1));
    }
    return out;
}

} // namespace

void Qubit::validate() const {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12) throw std::invalid_argument("qubit is not normalized");
}

State State::from_qubit(const Qubit& q) { return {std::norm(q.alpha), q.alpha * std::conj(q.beta)}; }

State State::from_matrix(const Eigen::Matrix2cd& rho) { return {rho(1, 1).real(), rho(1, 0)}; }

Eigen::Matrix2cd State::matrix() const {
    Eigen::Matrix2cd rho;
    rho << 1.0 - a, std::conj(b), b, a;
    return rho;
}

KrausPair kraus_ops(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("measurement strength lambda must be >= 0");
    const Eigen::Matrix2cd n = number_op();
    KrausPair k;
    k.plus = cplx{0.0, -std::sin(lambda)} * n;
    k.minus = Eigen::Matrix2cd::Identity() - (1.0 - std::cos(lambda)) * n;
    return k;
}

double click_probability(const Qubit& q, double lambda) {
    const double s = std::sin(lambda);
    return q.occupation() * s * s;
}

Outcome conventional_step(const Qubit& q, double lambda, double u) {
    const KrausPair k = kraus_ops(lambda);
    Eigen::Vector2cd v(q.beta, q.alpha);
    Outcome o;
    o.sigma = u < click_probability(q, lambda) ? 1 : -1;
    v = (o.sigma > 0 ? k.plus : k.minus) * v;
    const double nv = v.norm();
    if (nv == 0.0) throw NumericalError("measurement outcome with zero probability");
    v /= nv;
    o.state = {v(1), v(0)};
    return o;
}

Qubit nonhermitian_evolve(const Qubit& q, double M, double tau, int sigma) {
    const cplx a = q.alpha * std::exp(M * tau * sigma);
    const double nrm = std::sqrt(std::norm(a) + std::norm(q.beta));
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("non-Hermitian update lost the state norm");
    return {a / nrm, q.beta / nrm};
}

Outcome nonhermitian_step(const Qubit& q, double M, double T, double m) {
    Outcome o;
    o.sigma = q.occupation() > m ? 1 : -1;
    o.state = nonhermitian_evolve(q, M, T, o.sigma);
    return o;
}

double default_ode_dt(double M, double T) {
    const double rate = M * M * T + M;
    return rate > 0.0 ? std::min(1e-3, 0.01 / rate) : 1e-3;
}

Trajectory lindblad_evolve(const State& s0, double M, double T, double t_end, double dt) {
    if (dt <= 0.0) dt = default_ode_dt(M, T);
    const Eigen::Matrix2cd l = M * std::sqrt(T) * number_op();
    const Eigen::Matrix2cd ll = l.adjoint() * l;
    return rk4_density(s0, t_end, dt, [&](const Eigen::Matrix2cd& rho) -> Eigen::Matrix2cd {
        return l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll);
    });
}

Trajectory noclick_postselect_evolve(const State& s0, double M, double T, double t_end, bool normalized, double dt) {
    if (dt <= 0.0) dt = default_ode_dt(M, T);
    const Eigen::Matrix2cd n = number_op();
    const double g = M * M * T;
    if (!normalized)
        return rk4_density(s0, t_end, dt, [&](const Eigen::Matrix2cd& rho) -> Eigen::Matrix2cd {
            return -g * (n * rho + rho * n);
        });
    return rk4_density(s0, t_end, dt, [&](const Eigen::Matrix2cd& rho) -> Eigen::Matrix2cd {
        const cplx occ = (n * rho).trace();
        return 0.5 * g * (2.0 * occ * rho - (n * rho + rho * n));
    });
}

namespace {

Trajectory nonlinear_attempt(const State& s0, double M, double T, double t_end, double dt) {
    const long steps = std::lround(std::ceil(t_end / dt - 1e-9));
    const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
    const double mt = M * T;
    auto fa = [&](double a) { return -2.0 * M * a * (1.0 - a) * (1.0 - 2.0 * a) * (1.0 - mt); };
    auto fb = [&](double a, cplx b) {
        const double c = (1.0 - 2.0 * a) * (1.0 - 2.0 * a) + 4.0 * mt * (a * (1.0 - a) - 0.5);
        return -M * b * c;
    };
    Trajectory out;
    double a = s0.a;
    cplx b = s0.b;
    out.push_back({0.0, a, b, 1.0});
    for (long k = 0; k < steps; ++k) {
        const double ka1 = fa(a);
        const cplx kb1 = fb(a, b);
        const double a2 = a + 0.5 * h * ka1;
        const double ka2 = fa(a2);
        const cplx kb2 = fb(a2, b + 0.5 * h * kb1);
        const double a3 = a + 0.5 * h * ka2;
        const double ka3 = fa(a3);
        const cplx kb3 = fb(a3, b + 0.5 * h * kb2);
        const double a4 = a + h * ka3;
        const double ka4 = fa(a4);
        const cplx kb4 = fb(a4, b + h * kb3);
        a += (h / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        b += (h / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        if (!std::isfinite(a) || !std::isfinite(b.real()) || !std::isfinite(b.imag()) || a < -1e-9 || a > 1.0 + 1e-9)
            throw NumericalError("nonlinear master equation step became unstable");
        out.push_back({h * static_cast<double>(k + 1), a, b, 1.0});
    }
    return out;
}

} // namespace

Trajectory nonlinear_master_evolve(const State& s0, double M, double T, double t_end, double dt) {
    if (dt <= 0.0) dt = default_ode_dt(M, T);
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
    try {
        return nonlinear_attempt(s0, M, T, t_end, dt);
    } catch (const NumericalError&) {
        return nonlinear_attempt(s0, M, T, t_end, 0.5 * dt);
    }
}

std::string to_string(Protocol p) { return p == Protocol::Conventional ? "conventional" : "nonhermitian"; }

Protocol protocol_from_string(const std::string& s) {
    if (s == "conventional") return Protocol::Conventional;
    if (s == "nonhermitian" || s == "non-hermitian") return Protocol::NonHermitian;
    throw std::invalid_argument("unknown single-site protocol '" + s + "'");
}

std::vector<AveragedPoint> monte_carlo_average(const Qubit& q0, double M, double T, int steps, int trials,
                                               Protocol protocol, std::uint64_t seed) {
    if (trials < 100) throw std::invalid_argument("monte_carlo_average needs at least 100 trials");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    q0.validate();
    const std::size_t ns = static_cast<std::size_t>(steps) + 1;
    std::vector<Eigen::Vector2cd> sum(ns, Eigen::Vector2cd::Zero()); // (a, b)
    std::vector<Eigen::Vector3d> sq(ns, Eigen::Vector3d::Zero());    // a^2, re b^2, im b^2
    for (int k = 0; k < trials; ++k) {
        const RngPolicy rng{seed, static_cast<std::uint64_t>(k)};
        Qubit q = q0;
        for (int j = 0; j <= steps; ++j) {
            const State s = State::from_qubit(q);
            const auto i = static_cast<std::size_t>(j);
            sum[i] += Eigen::Vector2cd(s.a, s.b);
            sq[i] += Eigen::Vector3d(s.a * s.a, s.b.real() * s.b.real(), s.b.imag() * s.b.imag());
            if (j == steps) break;
            const double u = rng.uniform(static_cast<std::uint64_t>(j), 0, DrawPurpose::Threshold);
            q = protocol == Protocol::Conventional ? conventional_step(q, M * T, u).state
                                                   : nonhermitian_step(q, M, T, u).state;
        }
    }
    std::vector<AveragedPoint> out;
    const double n = trials;
    auto se = [n](double mean, double mean_sq) {
        const double var = std::max(0.0, (mean_sq - mean * mean) * n / (n - 1.0));
        return std::sqrt(var / n);
    };
    for (std::size_t j = 0; j < ns; ++j) {
        AveragedPoint p;
        p.t = T * static_cast<double>(j);
        p.a = sum[j](0).real() / n;
        p.b = sum[j](1) / n;
        p.abs_b = std::abs(p.b);
        p.a_stderr = se(p.a, sq[j](0) / n);
        p.b_re_stderr = se(p.b.real(), sq[j](1) / n);
        p.b_im_stderr = se(p.b.imag(), sq[j](2) / n);
        out.push_back(p);
    }
    return out;
}

std::string trajectory_csv(const Trajectory& ode, const std::vector<AveragedPoint>& mc) {
    std::ostringstream os;
    char buf[160];
    os << "t,a,re_b,im_b,source\n";
    for (const auto& p : ode) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,ode\n", p.t, p.a, p.b.real(), p.b.imag());
        os << buf;
    }
    for (const auto& p : mc) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,mc\n", p.t, p.a, p.b.real(), p.b.imag());
        os << buf;
    }
    return os.str();
}

} // namespace nhmps::single_site
