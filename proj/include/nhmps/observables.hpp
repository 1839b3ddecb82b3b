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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nhmps/protocol.hpp"

namespace nhmps {

class StatsError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct ClusterStat {
    int max_length = 0;
    double threshold = 0.2;
};

// Longest run of consecutive sites that are all near-empty (n <= threshold) or
// all near-full (n >= 1 - threshold). The two kinds of run never merge.
ClusterStat max_cluster(const std::vector<double>& densities, double threshold = 0.2);

struct TimeWindow {
    double t0 = 40.0;
    double t1 = 50.0; // inclusive on both ends
};

struct SummaryOptions {
    TimeWindow window{};
    double cluster_time = 50.0;
    double cluster_threshold = 0.2;
};

struct MeanErr {
    double mean = 0.0;
    double stderr_ = 0.0; // sample stddev / sqrt(R); 0 for R = 1
};

MeanErr mean_stderr(const std::vector<double>& xs);

struct EnsembleSummary {
    std::vector<double> times;
    std::vector<double> mean_entropy_bits;
    std::vector<double> entropy_stderr;
    std::vector<double> mean_max_cluster;
    std::vector<double> cluster_stderr;
    double initial_entropy = 0.0; // t = 0 mean
    MeanErr window_entropy;       // per-trajectory window means, then averaged
    MeanErr cluster_at_eval;      // at opts.cluster_time
    int n_trajectories = 0;       // successful ones
    int n_failed = 0;
    SummaryOptions opts;
};

// Failed trajectories are excluded and counted. Throws StatsError if nothing is left
// or the time grids disagree.
EnsembleSummary ensemble_average(const std::vector<TrajectoryRecord>& records, const SummaryOptions& opts = {});

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::vector<double> residuals;
};

// Ordinary least squares, at least 3 points.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct SlopeEstimate {
    double sv_s = 0.0; // bits per unit time
    std::optional<double> s;   // entropy density (bits per site), when supplied
    std::optional<double> v_S; // sv_s / s
    TimeWindow window;
    LinearFit fit;
};

SlopeEstimate fit_entropy_slope(const EnsembleSummary& summary, TimeWindow window,
                                std::optional<double> entropy_density = std::nullopt);

struct PowerLaw {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double prefactor = 0.0;
    LinearFit fit; // in log-log space
};

// y = prefactor * x^exponent fitted in log space; all values must be positive.
PowerLaw fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// Half-cut ground-state entropy vs L: S = (c/6) ln L + const in nats, fitted from bits.
struct CentralChargeFit {
    double c_eff = 0.0;
    double c_stderr = 0.0;
    LinearFit fit; // S in nats against ln L
};

CentralChargeFit fit_central_charge(const std::vector<int>& lengths, const std::vector<double>& entropy_bits);

// Predicates hold only when the margin exceeds this many combined standard errors.
inline constexpr double kPredicateSigmas = 2.0;

struct Predicate {
    bool holds = false; // z() > kPredicateSigmas
    double margin = 0.0; // signed difference
    double sigma = 0.0;  // combined standard error
    double z() const { return sigma > 0.0 ? margin / sigma : (margin > 0.0 ? 1e300 : -1e300); }
};

// Window average above the initial ground-state entropy.
Predicate exceeds_initial(const EnsembleSummary& s);
// Window average grows from the smaller to the larger system.
Predicate grows_with_length(const EnsembleSummary& smaller, const EnsembleSummary& larger);
// a > b with combined error.
Predicate greater_than(MeanErr a, MeanErr b);

struct BoundaryPoint {
    double P = 0.0;
    double M = 0.0;
};

// Zero contour of value[i][k] on the (P_i, M_k) grid, one point per P row at the
// first sign change along M. M is interpolated linearly in log M.
std::vector<BoundaryPoint> boundary_polyline(const std::vector<double>& Ps, const std::vector<double>& Ms,
                                             const std::vector<std::vector<double>>& value);

} // namespace nhmps
