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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nhmps/tensor.hpp"

namespace nhmps::single_site {

// alpha |1> + beta |0>
struct Qubit {
    cplx alpha{0.0, 0.0};
    cplx beta{1.0, 0.0};

    double occupation() const { return std::norm(alpha); }
    void validate() const; // normalized within 1e-12
};

// rho = [[1 - a, conj(b)], [b, a]] in the {|0>, |1>} basis; b = <1|rho|0>.
struct State {
    double a = 0.0;
    cplx b{0.0, 0.0};

    static State from_qubit(const Qubit& q);
    static State from_matrix(const Eigen::Matrix2cd& rho);
    Eigen::Matrix2cd matrix() const;
    bool positive(double tol = 1e-12) const { return std::norm(b) <= a * (1.0 - a) + tol; }
};

struct TimePoint {
    double t = 0.0;
    double a = 0.0;
    cplx b{0.0, 0.0};
    double trace = 1.0;
};

using Trajectory = std::vector<TimePoint>;

struct KrausPair {
    Eigen::Matrix2cd plus;  // click
    Eigen::Matrix2cd minus; // no click
};

// lambda = M * T; throws std::invalid_argument for negative lambda.
KrausPair kraus_ops(double lambda);

struct Outcome {
    Qubit state;
    int sigma = -1; // +1 click / -1 no click
};

// Detector protocol: click iff u < |alpha|^2 sin^2(lambda).
Outcome conventional_step(const Qubit& q, double lambda, double u);
double click_probability(const Qubit& q, double lambda);

// Non-Hermitian protocol: sigma = sgn(|alpha|^2 - m), tie -> -1, then e^{M T sigma n}
// applied and renormalized.
Outcome nonhermitian_step(const Qubit& q, double M, double T, double m);
// Same map with a fixed sigma over duration tau.
Qubit nonhermitian_evolve(const Qubit& q, double M, double tau, int sigma);

// Default RK4 step min(1e-3, 0.01 / (M^2 T + M)).
double default_ode_dt(double M, double T);

// L = M sqrt(T) n; integrates the full Lindblad equation with RK4.
Trajectory lindblad_evolve(const State& s0, double M, double T, double t_end, double dt = 0.0);

// normalized = false: d rho/dt = -M^2 T {n, rho}
// normalized = true:  d rho/dt = (M^2 T / 2)(2 tr(n rho) rho - {n, rho})
Trajectory noclick_postselect_evolve(const State& s0, double M, double T, double t_end, bool normalized,
                                     double dt = 0.0);

// da/dt = -2 M a (1-a)(1-2a)(1-MT), db/dt = -M b [(1-2a)^2 + 4 M T (a(1-a) - 1/2)].
// A blow-up halves dt and retries once before throwing NumericalError.
Trajectory nonlinear_master_evolve(const State& s0, double M, double T, double t_end, double dt = 0.0);

enum class Protocol { Conventional, NonHermitian };

std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

struct AveragedPoint {
    double t = 0.0;
    double a = 0.0;
    cplx b{0.0, 0.0};
    double a_stderr = 0.0;
    double b_re_stderr = 0.0;
    double b_im_stderr = 0.0;
    double abs_b = 0.0; // |mean b|
};

// Averages the pure-state density matrix over trials after each of `steps` intervals
// of length T. Trial k draws from the counter-based stream (seed, k, step).
std::vector<AveragedPoint> monte_carlo_average(const Qubit& q0, double M, double T, int steps, int trials,
                                               Protocol protocol, std::uint64_t seed);

// CSV with header t,a,re_b,im_b,source
std::string trajectory_csv(const Trajectory& ode, const std::vector<AveragedPoint>& mc);

} // namespace nhmps::single_site
