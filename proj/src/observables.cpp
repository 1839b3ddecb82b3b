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

#include "nhmps/observables.hpp"

#include <algorithm>
#include <cmath>

namespace nhmps {

ClusterStat max_cluster(const std::vector<double>& densities, double threshold) {
    ClusterStat out;
    out.threshold = threshold;
    int run = 0;
    int kind = 0; // -1 hole run, +1 particle run
    for (double n : densities) {
        int k = 0;
        if (n <= threshold) k = -1;
        else if (n >= 1.0 - threshold) k = 1;
        // threshold >= 0.5 makes both hold; count it as continuing the current run
        if (n <= threshold && n >= 1.0 - threshold && kind != 0) k = kind;
        if (k == 0) {
            run = 0;
        } else if (k == kind) {
            ++run;
        } else {
            run = 1;
        }
        kind = k;
        out.max_length = std::max(out.max_length, run);
    }
    return out;
}

MeanErr mean_stderr(const std::vector<double>& xs) {
    if (xs.empty()) throw StatsError("mean of an empty sample");
    MeanErr r;
    for (double x : xs) r.mean += x;
    r.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    const double n = static_cast<double>(xs.size());
    r.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return r;
}

namespace {

bool in_window(double t, const TimeWindow& w) { return t >= w.t0 - 1e-9 && t <= w.t1 + 1e-9; }

} // namespace

EnsembleSummary ensemble_average(const std::vector<TrajectoryRecord>& records, const SummaryOptions& opts) {
    EnsembleSummary s;
    s.opts = opts;
    std::vector<const TrajectoryRecord*> ok;
    for (const auto& r : records) {
        if (r.failed) ++s.n_failed;
        else ok.push_back(&r);
    }
    if (ok.empty()) throw StatsError("ensemble has no successful trajectories");
    s.n_trajectories = static_cast<int>(ok.size());

    const auto& grid = ok.front()->rows;
    for (const auto* r : ok) {
        if (r->rows.size() != grid.size()) throw StatsError("trajectories have different time grids");
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (std::abs(r->rows[i].t - grid[i].t) > 1e-9) throw StatsError("trajectories have different time grids");
    }

    std::vector<double> col(ok.size());
    std::optional<std::size_t> eval_row;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        s.times.push_back(grid[i].t);
        for (std::size_t k = 0; k < ok.size(); ++k) col[k] = ok[k]->rows[i].entropy_bits;
        const MeanErr e = mean_stderr(col);
        s.mean_entropy_bits.push_back(e.mean);
        s.entropy_stderr.push_back(e.stderr_);
        for (std::size_t k = 0; k < ok.size(); ++k)
            col[k] = max_cluster(ok[k]->rows[i].densities, opts.cluster_threshold).max_length;
        const MeanErr c = mean_stderr(col);
        s.mean_max_cluster.push_back(c.mean);
        s.cluster_stderr.push_back(c.stderr_);
        if (std::abs(grid[i].t - opts.cluster_time) < 1e-9) eval_row = i;
    }
    s.initial_entropy = s.mean_entropy_bits.front();

    std::vector<double> per_traj;
    for (const auto* r : ok) {
        double sum = 0.0;
        int n = 0;
        for (const auto& row : r->rows)
            if (in_window(row.t, opts.window)) {
                sum += row.entropy_bits;
                ++n;
            }
        if (n == 0) throw StatsError("averaging window contains no recorded times");
        per_traj.push_back(sum / n);
    }
    s.window_entropy = mean_stderr(per_traj);

    if (eval_row) s.cluster_at_eval = {s.mean_max_cluster[*eval_row], s.cluster_stderr[*eval_row]};
    else s.cluster_at_eval = {s.mean_max_cluster.back(), s.cluster_stderr.back()};
    return s;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw StatsError("fit inputs differ in length");
    const std::size_t n = x.size();
    if (n < 3) throw StatsError("a fit needs at least 3 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw StatsError("fit abscissae are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        f.residuals.push_back(r);
        rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return f;
}

SlopeEstimate fit_entropy_slope(const EnsembleSummary& summary, TimeWindow window,
                                std::optional<double> entropy_density) {
    if (summary.times.empty() || window.t0 < summary.times.front() - 1e-9 || window.t1 > summary.times.back() + 1e-9)
        throw StatsError("slope window lies outside the simulated range");
    std::vector<double> t, s;
    for (std::size_t i = 0; i < summary.times.size(); ++i)
        if (in_window(summary.times[i], window)) {
            t.push_back(summary.times[i]);
            s.push_back(summary.mean_entropy_bits[i]);
        }
    SlopeEstimate e;
    e.window = window;
    e.fit = linear_fit(t, s);
    e.sv_s = e.fit.slope;
    if (entropy_density) {
        e.s = *entropy_density;
        if (*entropy_density != 0.0) e.v_S = e.sv_s / *entropy_density;
    }
    return e;
}

PowerLaw fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw StatsError("fit inputs differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw StatsError("power-law fit needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    PowerLaw p;
    p.fit = linear_fit(lx, ly);
    p.exponent = p.fit.slope;
    p.exponent_stderr = p.fit.slope_stderr;
    p.prefactor = std::exp(p.fit.intercept);
    return p;
}

CentralChargeFit fit_central_charge(const std::vector<int>& lengths, const std::vector<double>& entropy_bits) {
    if (lengths.size() != entropy_bits.size()) throw StatsError("fit inputs differ in length");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        x.push_back(std::log(static_cast<double>(lengths[i])));
        y.push_back(entropy_bits[i] * std::log(2.0));
    }
    CentralChargeFit c;
    c.fit = linear_fit(x, y);
    c.c_eff = 6.0 * c.fit.slope;
    c.c_stderr = 6.0 * c.fit.slope_stderr;
    return c;
}

Predicate greater_than(MeanErr a, MeanErr b) {
    Predicate p;
    p.margin = a.mean - b.mean;
    p.sigma = std::hypot(a.stderr_, b.stderr_);
    p.holds = p.z() > kPredicateSigmas;
    return p;
}

Predicate exceeds_initial(const EnsembleSummary& s) {
    // the ground-state entropy is deterministic
    return greater_than(s.window_entropy, {s.initial_entropy, 0.0});
}

Predicate grows_with_length(const EnsembleSummary& smaller, const EnsembleSummary& larger) {
    return greater_than(larger.window_entropy, smaller.window_entropy);
}

std::vector<BoundaryPoint> boundary_polyline(const std::vector<double>& Ps, const std::vector<double>& Ms,
                                             const std::vector<std::vector<double>>& value) {
    if (value.size() != Ps.size()) throw StatsError("boundary grid has the wrong number of P rows");
    for (double m : Ms)
        if (!(m > 0.0)) throw StatsError("boundary grid needs positive M values");
    std::vector<BoundaryPoint> out;
    for (std::size_t i = 0; i < Ps.size(); ++i) {
        const auto& row = value[i];
        if (row.size() != Ms.size()) throw StatsError("boundary grid row has the wrong length");
        for (std::size_t k = 0; k + 1 < Ms.size(); ++k) {
            const double a = row[k], b = row[k + 1];
            if (a == 0.0) {
                out.push_back({Ps[i], Ms[k]});
                break;
            }
            if ((a > 0.0) != (b > 0.0) || b == 0.0) {
                const double f = a / (a - b);
                const double lm = std::log(Ms[k]) + f * (std::log(Ms[k + 1]) - std::log(Ms[k]));
                out.push_back({Ps[i], std::exp(lm)});
                break;
            }
        }
    }
    return out;
}

} // namespace nhmps
