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

#include "nhmps/protocol.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nhmps {

int measurement_sign(double density, double m) { return density > m ? 1 : -1; }

std::vector<MeasurementEvent> draw_interval_events(const RngPolicy& rng, int j, const std::vector<double>& densities,
                                                   const MeasurementSpec& spec) {
    std::vector<MeasurementEvent> out;
    for (int x = 0; x < static_cast<int>(densities.size()); ++x) {
        MeasurementEvent e;
        e.interval = j;
        e.site = x;
        e.density = densities[static_cast<std::size_t>(x)];
        const auto uj = static_cast<std::uint64_t>(j), ux = static_cast<std::uint64_t>(x);
        e.p = rng.uniform(uj, ux, DrawPurpose::Probe) < spec.P ? 1 : 0;
        if (e.p) {
            e.m = rng.uniform(uj, ux, DrawPurpose::Threshold);
            e.sign = measurement_sign(e.density, e.m);
        }
        out.push_back(e);
    }
    return out;
}

std::vector<SiteSign> active_signs(const std::vector<MeasurementEvent>& events) {
    std::vector<SiteSign> s;
    for (const auto& e : events)
        if (e.p) s.push_back({e.site, e.sign});
    return s;
}

// ---- MPS backend ----

MpsBackend::MpsBackend(MpsState initial, ModelSpec model, MeasurementSpec meas, EvolutionConfig cfg)
    : psi_(std::move(initial)), model_(model), meas_(meas), integ_(cfg) {
    if (psi_.length() != model_.L || psi_.filling() != model_.filling)
        throw SpecError("initial state does not match the model");
    cfg.validate(meas_);
    set_events({});
}

std::vector<double> MpsBackend::densities() const { return local_densities(psi_); }

double MpsBackend::half_cut_entropy() const { return entanglement_entropy(psi_, psi_.length() / 2); }

void MpsBackend::set_events(const std::vector<SiteSign>& events) {
    integ_.set_operator(build_evolution_mpo(model_, meas_, events));
}

void MpsBackend::step() {
    const auto d = integ_.step(psi_, true);
    discarded_ = std::max(discarded_, d.max_discarded_weight);
}

double MpsBackend::discarded_weight_since_reset() {
    const double d = discarded_;
    discarded_ = 0.0;
    return d;
}

// ---- dense backend ----

DenseBackend::DenseBackend(std::shared_ptr<const SectorHamiltonian> h, VectorXc initial, MeasurementSpec meas, double dt)
    : h_(std::move(h)), v_(std::move(initial)), meas_(meas), dt_(dt) {
    if (v_.size() != h_->basis().size()) throw ShapeError("initial vector does not match the sector");
}

std::vector<double> DenseBackend::densities() const { return dense_densities(h_->basis(), v_); }

double DenseBackend::half_cut_entropy() const { return dense_entropy(h_->basis(), v_, length() / 2); }

void DenseBackend::set_events(const std::vector<SiteSign>& events) {
    if (events.empty() || meas_.M == 0.0)
        extra_.reset();
    else
        extra_ = h_->measurement_diagonal(meas_, events);
}

void DenseBackend::step() { dense_step(*h_, v_, dt_, extra_ ? &*extra_ : nullptr, true); }

int DenseBackend::bond_dim() const {
    return max_sector_bond_dim(length(), h_->basis().filling(), length() / 2);
}

// ---- protocol loop ----

namespace {

long steps_for(double span, double dt, const char* what) {
    const double r = span / dt;
    const long n = std::lround(r);
    if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
        throw SpecError(std::string(what) + " must be a multiple of dt");
    return n;
}

} // namespace

TrajectoryRecord run_protocol(TrajectoryBackend& backend, const MeasurementSpec& meas, double dt, const RngPolicy& rng) {
    meas.validate();
    TrajectoryRecord rec;
    rec.trajectory_id = rng.trajectory_id;
    rec.variant = meas.sign_policy == SignPolicy::Instantaneous;

    const long per_interval = steps_for(meas.T, dt, "T");
    const long n_meas = steps_for(meas.t_off, meas.T, "t_off");
    const double free_span = meas.t_end - meas.t_off;
    const long n_free_full = static_cast<long>(std::floor(free_span / meas.T + 1e-9));
    const double tail = free_span - static_cast<double>(n_free_full) * meas.T;
    const long tail_steps = tail > 1e-12 ? steps_for(tail, dt, "t_end - t_off remainder") : 0;

    auto row_now = [&](double t) {
        IntervalRow r;
        r.t = t;
        r.densities = backend.densities();
        r.entropy_bits = backend.half_cut_entropy();
        r.discarded_weight_max = backend.discarded_weight_since_reset();
        r.chi_max_reached = backend.bond_dim();
        return r;
    };

    double t = 0.0;
    try {
        rec.rows.push_back(row_now(0.0));
        for (long j = 0; j < n_meas; ++j) {
            IntervalRow& cur = rec.rows.back();
            cur.events = draw_interval_events(rng, static_cast<int>(j), cur.densities, meas);
            const auto events = cur.events;
            if (meas.sign_policy == SignPolicy::FixedAtIntervalStart) {
                backend.set_events(active_signs(events));
                for (long k = 0; k < per_interval; ++k) backend.step();
            } else {
                for (long k = 0; k < per_interval; ++k) {
                    const auto dens = k == 0 ? cur.densities : backend.densities();
                    std::vector<SiteSign> s;
                    for (const auto& e : events)
                        if (e.p) s.push_back({e.site, measurement_sign(dens[static_cast<std::size_t>(e.site)], e.m)});
                    backend.set_events(s);
                    backend.step();
                }
            }
            t = static_cast<double>(j + 1) * meas.T;
            rec.rows.push_back(row_now(t));
        }
        backend.set_events({});
        for (long j = 0; j < n_free_full; ++j) {
            for (long k = 0; k < per_interval; ++k) backend.step();
            t = meas.t_off + static_cast<double>(j + 1) * meas.T;
            rec.rows.push_back(row_now(t));
        }
        if (tail_steps > 0) {
            for (long k = 0; k < tail_steps; ++k) backend.step();
            rec.rows.push_back(row_now(meas.t_end));
        }
    } catch (const std::exception& e) {
        rec.failed = true;
        std::ostringstream os;
        os << "trajectory " << rng.trajectory_id << " failed after t=" << t << ": " << e.what();
        rec.error = os.str();
    }
    return rec;
}

TrajectoryRecord run_trajectory(const MpsState& gs, const ModelSpec& model, const MeasurementSpec& meas,
                                const EvolutionConfig& cfg, const RngPolicy& rng) {
    cfg.validate(meas);
    MpsBackend b(gs, model, meas, cfg);
    return run_protocol(b, meas, cfg.dt, rng);
}

TrajectoryRecord dense_trajectory(std::shared_ptr<const SectorHamiltonian> h, const VectorXc& gs,
                                  const MeasurementSpec& meas, const EvolutionConfig& cfg, const RngPolicy& rng) {
    cfg.validate(meas);
    DenseBackend b(std::move(h), gs, meas, cfg.dt);
    return run_protocol(b, meas, cfg.dt, rng);
}

TrajectoryRecord dense_trajectory(const VectorXc& gs, const ModelSpec& model, const MeasurementSpec& meas,
                                  const EvolutionConfig& cfg, const RngPolicy& rng) {
    return dense_trajectory(std::make_shared<const SectorHamiltonian>(model), gs, meas, cfg, rng);
}

// ---- JSONL ----

std::string to_jsonl(const TrajectoryRecord& rec, const std::string& config_hash) {
    std::string out;
    for (const auto& r : rec.rows) {
        nlohmann::ordered_json j;
        if (!config_hash.empty()) j["config_hash"] = config_hash;
        j["trajectory"] = rec.trajectory_id;
        j["t"] = r.t;
        j["densities"] = r.densities;
        j["entropy_bits"] = r.entropy_bits;
        auto ev = nlohmann::ordered_json::array();
        for (const auto& e : r.events) {
            nlohmann::ordered_json x;
            x["j"] = e.interval;
            x["x"] = e.site;
            x["p"] = e.p;
            x["m"] = e.m;
            x["n"] = e.density;
            if (e.p)
                x["sign"] = e.sign;
            else
                x["sign"] = "unmeasured";
            ev.push_back(x);
        }
        j["events"] = ev;
        j["discarded_weight_max"] = r.discarded_weight_max;
        j["chi_max_reached"] = r.chi_max_reached;
        if (rec.variant) j["variant"] = "instantaneous-sign";
        out += j.dump() + "\n";
    }
    if (rec.failed) {
        nlohmann::ordered_json j;
        if (!config_hash.empty()) j["config_hash"] = config_hash;
        j["trajectory"] = rec.trajectory_id;
        j["error"] = rec.error;
        out += j.dump() + "\n";
    }
    return out;
}

TrajectoryRecord from_jsonl(const std::string& text) {
    TrajectoryRecord rec;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        rec.trajectory_id = j.at("trajectory").get<std::uint64_t>();
        if (j.contains("error")) {
            rec.failed = true;
            rec.error = j.at("error").get<std::string>();
            continue;
        }
        IntervalRow r;
        r.t = j.at("t").get<double>();
        r.densities = j.at("densities").get<std::vector<double>>();
        r.entropy_bits = j.at("entropy_bits").get<double>();
        for (const auto& x : j.at("events")) {
            MeasurementEvent e;
            e.interval = x.at("j").get<int>();
            e.site = x.at("x").get<int>();
            e.p = x.at("p").get<int>();
            e.m = x.at("m").get<double>();
            e.density = x.at("n").get<double>();
            e.sign = x.at("sign").is_number() ? x.at("sign").get<int>() : 0;
            r.events.push_back(e);
        }
        r.discarded_weight_max = j.at("discarded_weight_max").get<double>();
        r.chi_max_reached = j.at("chi_max_reached").get<int>();
        if (j.contains("variant")) rec.variant = true;
        rec.rows.push_back(std::move(r));
    }
    return rec;
}

} // namespace nhmps
