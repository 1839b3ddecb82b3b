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

#include "doctest.h"

#include <cmath>

#include "nhmps/dmrg.hpp"
#include "nhmps/protocol.hpp"

using namespace nhmps;

TEST_CASE("sign rule") {
    CHECK(measurement_sign(1.0, 0.999) == 1);
    CHECK(measurement_sign(0.0, 1e-9) == -1);
    CHECK(measurement_sign(0.4, 0.4) == -1);
}

TEST_CASE("counter-based draws are order independent and well spread") {
    const RngPolicy a{42, 3}, b{42, 4}, c{43, 3};
    CHECK(a.bits(5, 2, DrawPurpose::Probe) == a.bits(5, 2, DrawPurpose::Probe));
    CHECK(a.bits(5, 2, DrawPurpose::Probe) != a.bits(5, 2, DrawPurpose::Threshold));
    CHECK(a.bits(5, 2, DrawPurpose::Probe) != b.bits(5, 2, DrawPurpose::Probe));
    CHECK(a.bits(5, 2, DrawPurpose::Probe) != c.bits(5, 2, DrawPurpose::Probe));
    CHECK(a.bits(5, 2, DrawPurpose::Probe) != a.bits(2, 5, DrawPurpose::Probe));
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int j = 0; j < n; ++j) {
        const double u = a.uniform(static_cast<std::uint64_t>(j), 1, DrawPurpose::Threshold);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sq += u * u;
    }
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sq / n - 1.0 / 3.0) < 0.01);
}

TEST_CASE("interval events") {
    MeasurementSpec m;
    m.P = 1.0;
    const RngPolicy rng{7, 0};
    const auto ev = draw_interval_events(rng, 3, {1.0, 0.0, 0.5, 0.5}, m);
    REQUIRE(ev.size() == 4);
    CHECK(ev[0].sign == 1);
    CHECK(ev[1].sign == -1);
    for (const auto& e : ev) {
        CHECK(e.p == 1);
        CHECK(e.interval == 3);
        CHECK(e.sign == measurement_sign(e.density, e.m));
    }
    m.P = 0.0;
    const auto none = draw_interval_events(rng, 3, {1.0, 0.0, 0.5, 0.5}, m);
    for (const auto& e : none) {
        CHECK(e.p == 0);
        CHECK(e.sign == 0);
    }
    CHECK(active_signs(none).empty());
    // same key, same thresholds regardless of the densities passed in
    m.P = 1.0;
    const auto again = draw_interval_events(rng, 3, {0.2, 0.2, 0.2, 0.2}, m);
    for (int x = 0; x < 4; ++x) CHECK(again[x].m == ev[x].m);

    m.P = 0.3;
    int measured = 0;
    for (int j = 0; j < 2000; ++j)
        for (const auto& e : draw_interval_events(rng, j, std::vector<double>(5, 0.5), m)) measured += e.p;
    const double frac = measured / 10000.0;
    CHECK(std::abs(frac - 0.3) < 4.0 * std::sqrt(0.3 * 0.7 / 10000.0));
}

TEST_CASE("MPS and dense backends see identical event streams") {
    const ModelSpec model = ModelSpec::half_filled(8);
    const auto gs = dmrg(build_h0(model), model, {32, 20, 1e-12});
    const auto dgs = dense_ground_state(model);
    MeasurementSpec meas;
    meas.M = 1.0;
    meas.P = 0.5;
    meas.t_off = 4.0;
    meas.t_end = 5.0;
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    cfg.chi_max = 16;
    const RngPolicy rng{11, 2};
    const auto a = run_trajectory(gs.state, model, meas, cfg, rng);
    const auto b = dense_trajectory(dgs.vector, model, meas, cfg, rng);
    REQUIRE_FALSE(a.failed);
    REQUIRE_FALSE(b.failed);
    REQUIRE(a.rows.size() == 6);
    REQUIRE(b.rows.size() == 6);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].t == b.rows[i].t);
        REQUIRE(a.rows[i].events.size() == b.rows[i].events.size());
        for (std::size_t k = 0; k < a.rows[i].events.size(); ++k) {
            CHECK(a.rows[i].events[k].p == b.rows[i].events[k].p);
            CHECK(a.rows[i].events[k].m == b.rows[i].events[k].m);
            CHECK(a.rows[i].events[k].sign == b.rows[i].events[k].sign);
        }
        for (int x = 0; x < 8; ++x) CHECK(std::abs(a.rows[i].densities[x] - b.rows[i].densities[x]) < 1e-6);
        CHECK(std::abs(a.rows[i].entropy_bits - b.rows[i].entropy_bits) < 1e-5);
        double total = 0.0;
        for (double n : a.rows[i].densities) total += n;
        CHECK(total == doctest::Approx(4.0).epsilon(1e-10));
    }
    // rows after t_off carry no events
    CHECK(a.rows.back().events.empty());
    CHECK(a.rows[4].events.empty());
    CHECK(a.rows[3].events.size() == 8);
}

TEST_CASE("no measurement back-action at M = 0") {
    const ModelSpec model = ModelSpec::half_filled(8);
    const auto dgs = dense_ground_state(model);
    MeasurementSpec meas;
    meas.M = 0.0;
    meas.t_off = 3.0;
    meas.t_end = 3.0;
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    const auto r = dense_trajectory(dgs.vector, model, meas, cfg, {1, 0});
    REQUIRE_FALSE(r.failed);
    for (const auto& row : r.rows) {
        CHECK(std::abs(row.entropy_bits - r.rows[0].entropy_bits) < 1e-8);
        for (int x = 0; x < 8; ++x) CHECK(std::abs(row.densities[x] - r.rows[0].densities[x]) < 1e-8);
    }
}

TEST_CASE("strong measurements rarely flip signs") {
    const ModelSpec model = ModelSpec::half_filled(8);
    const auto h = std::make_shared<const SectorHamiltonian>(model);
    const auto dgs = dense_ground_state(model);
    MeasurementSpec meas;
    meas.M = 10.0;
    meas.P = 1.0;
    meas.t_off = 20.0;
    meas.t_end = 20.0;
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    int flips = 0, pairs = 0;
    for (std::uint64_t k = 0; k < 4; ++k) {
        const auto r = dense_trajectory(h, dgs.vector, meas, cfg, {5, k});
        REQUIRE_FALSE(r.failed);
        for (std::size_t i = 6; i < r.rows.size(); ++i) {
            if (r.rows[i].events.empty() || r.rows[i - 1].events.empty()) continue;
            for (int x = 0; x < 8; ++x) {
                ++pairs;
                flips += r.rows[i].events[x].sign != r.rows[i - 1].events[x].sign;
            }
        }
    }
    REQUIRE(pairs > 0);
    CHECK(static_cast<double>(flips) / pairs < 0.05);
}

TEST_CASE("instantaneous sign policy is flagged") {
    const ModelSpec model = ModelSpec::half_filled(6);
    const auto dgs = dense_ground_state(model);
    MeasurementSpec meas;
    meas.M = 1.0;
    meas.t_off = 2.0;
    meas.t_end = 2.0;
    meas.sign_policy = SignPolicy::Instantaneous;
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    const auto r = dense_trajectory(dgs.vector, model, meas, cfg, {1, 0});
    CHECK(r.variant);
    CHECK_FALSE(r.failed);
    CHECK(to_jsonl(r).find("\"variant\"") != std::string::npos);
}

TEST_CASE("JSON-lines round trip") {
    const ModelSpec model = ModelSpec::half_filled(6);
    const auto dgs = dense_ground_state(model);
    MeasurementSpec meas;
    meas.M = 0.7;
    meas.P = 0.5;
    meas.t_off = 2.0;
    meas.t_end = 3.0;
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    const auto r = dense_trajectory(dgs.vector, model, meas, cfg, {3, 9});
    const std::string text = to_jsonl(r);
    CHECK(text.find("\"unmeasured\"") != std::string::npos);
    CHECK(text.find("\"entropy_bits\"") != std::string::npos);
    const auto back = from_jsonl(text);
    CHECK(back.trajectory_id == 9);
    REQUIRE(back.rows.size() == r.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(back.rows[i].t == r.rows[i].t);
        CHECK(back.rows[i].entropy_bits == r.rows[i].entropy_bits);
        CHECK(back.rows[i].densities == r.rows[i].densities);
        REQUIRE(back.rows[i].events.size() == r.rows[i].events.size());
        for (std::size_t k = 0; k < r.rows[i].events.size(); ++k) {
            CHECK(back.rows[i].events[k].m == r.rows[i].events[k].m);
            CHECK(back.rows[i].events[k].sign == r.rows[i].events[k].sign);
        }
    }
    CHECK(to_jsonl(back) == text);
}

TEST_CASE("failures are recorded, not thrown") {
    const ModelSpec model = ModelSpec::half_filled(6);
    const auto gs = dmrg(build_h0(model), model, {16, 10, 1e-10});
    MeasurementSpec meas;
    meas.M = 1.0;
    meas.t_off = 2.0;
    meas.t_end = 2.0;
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    cfg.krylov = {2, 1e-300}; // cannot converge
    const auto r = run_trajectory(gs.state, model, meas, cfg, {1, 0});
    CHECK(r.failed);
    CHECK_FALSE(r.error.empty());
    const auto back = from_jsonl(to_jsonl(r));
    CHECK(back.failed);
    CHECK(back.error == r.error);
}

TEST_CASE("dt constraint is enforced") {
    const ModelSpec model = ModelSpec::half_filled(6);
    const auto gs = dmrg(build_h0(model), model, {16, 10, 1e-10});
    MeasurementSpec meas;
    meas.M = 10.0;
    EvolutionConfig cfg;
    cfg.dt = 0.02;
    CHECK_THROWS_AS(MpsBackend(gs.state, model, meas, cfg), SpecError);
}
