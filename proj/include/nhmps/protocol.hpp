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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nhmps/exact.hpp"
#include "nhmps/lattice.hpp"
#include "nhmps/mps.hpp"
#include "nhmps/rng.hpp"
#include "nhmps/tdvp.hpp"

namespace nhmps {

struct MeasurementEvent {
    int interval = 0;
    int site = 0;
    int p = 0;              // 1 if the site is measured this interval
    double m = 0.0;         // threshold, drawn only when p = 1
    double density = 0.0;   // density used for the sign decision
    int sign = 0;           // +1 / -1, 0 when unmeasured
};

// sgn(n - m) with the tie n == m resolved to -1.
int measurement_sign(double density, double m);

std::vector<MeasurementEvent> draw_interval_events(const RngPolicy& rng, int j, const std::vector<double>& densities,
                                                   const MeasurementSpec& spec);

std::vector<SiteSign> active_signs(const std::vector<MeasurementEvent>& events);

struct IntervalRow {
    double t = 0.0;
    std::vector<double> densities;
    double entropy_bits = 0.0; // half cut
    std::vector<MeasurementEvent> events; // drawn at t, active on [t, t + T)
    double discarded_weight_max = 0.0;    // over the interval ending at t
    int chi_max_reached = 0;
};

struct TrajectoryRecord {
    std::uint64_t trajectory_id = 0;
    std::vector<IntervalRow> rows;
    bool failed = false;
    std::string error;
    bool variant = false; // instantaneous-sign runs are flagged
};

// The state-dependent half of a trajectory; MPS and dense implementations
// share the protocol loop below.
class TrajectoryBackend {
   public:
    virtual ~TrajectoryBackend() = default;
    virtual int length() const = 0;
    virtual std::vector<double> densities() const = 0;
    virtual double half_cut_entropy() const = 0;
    // Install H0 + i M sum sign n; empty list means H0 only.
    virtual void set_events(const std::vector<SiteSign>& events) = 0;
    // One dt substep with norm restoration.
    virtual void step() = 0;
    virtual double discarded_weight_since_reset() = 0; // read and reset
    virtual int bond_dim() const = 0;
};

class MpsBackend : public TrajectoryBackend {
   public:
    MpsBackend(MpsState initial, ModelSpec model, MeasurementSpec meas, EvolutionConfig cfg);
    int length() const override { return psi_.length(); }
    std::vector<double> densities() const override;
    double half_cut_entropy() const override;
    void set_events(const std::vector<SiteSign>& events) override;
    void step() override;
    double discarded_weight_since_reset() override;
    int bond_dim() const override { return psi_.max_bond_dim(); }
    const MpsState& state() const { return psi_; }

   private:
    MpsState psi_;
    ModelSpec model_;
    MeasurementSpec meas_;
    TdvpIntegrator integ_;
    double discarded_ = 0.0;
};

class DenseBackend : public TrajectoryBackend {
   public:
    DenseBackend(std::shared_ptr<const SectorHamiltonian> h, VectorXc initial, MeasurementSpec meas, double dt);
    int length() const override { return h_->basis().length(); }
    std::vector<double> densities() const override;
    double half_cut_entropy() const override;
    void set_events(const std::vector<SiteSign>& events) override;
    void step() override;
    double discarded_weight_since_reset() override { return 0.0; }
    int bond_dim() const override;
    const VectorXc& state() const { return v_; }

   private:
    std::shared_ptr<const SectorHamiltonian> h_;
    VectorXc v_;
    MeasurementSpec meas_;
    double dt_;
    std::optional<VectorXc> extra_;
};

struct ProtocolOptions {
    double dt = 0.005;
};

// Measurement phase on [0, t_off) in intervals of T, then free evolution to t_end.
// One row per interval boundary. Failures are recorded, not thrown.
TrajectoryRecord run_protocol(TrajectoryBackend& backend, const MeasurementSpec& meas, double dt, const RngPolicy& rng);

TrajectoryRecord run_trajectory(const MpsState& gs, const ModelSpec& model, const MeasurementSpec& meas,
                                const EvolutionConfig& cfg, const RngPolicy& rng);
TrajectoryRecord dense_trajectory(const VectorXc& gs, const ModelSpec& model, const MeasurementSpec& meas,
                                  const EvolutionConfig& cfg, const RngPolicy& rng);
TrajectoryRecord dense_trajectory(std::shared_ptr<const SectorHamiltonian> h, const VectorXc& gs,
                                  const MeasurementSpec& meas, const EvolutionConfig& cfg, const RngPolicy& rng);

// JSON-lines: one object per interval row, plus an error line for failed runs.
// A non-empty config_hash is written into every line.
std::string to_jsonl(const TrajectoryRecord& rec, const std::string& config_hash = {});
TrajectoryRecord from_jsonl(const std::string& text);

} // namespace nhmps
