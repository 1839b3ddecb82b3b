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

#include <benchmark/benchmark.h>

#include <map>

#include "nhmps/runner.hpp"

using namespace nhmps;

namespace {

const SectorHamiltonian& hamiltonian(int L) {
    static std::map<int, SectorHamiltonian> cache;
    auto it = cache.find(L);
    if (it == cache.end()) it = cache.emplace(L, SectorHamiltonian(ModelSpec::half_filled(L))).first;
    return it->second;
}

void BM_SectorMatvecParallel(benchmark::State& st) {
    const auto& h = hamiltonian(static_cast<int>(st.range(0)));
    const VectorXc x = VectorXc::Random(h.diagonal().size());
    VectorXc y(h.diagonal().size());
    for (auto _ : st) {
        h.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    st.counters["dim"] = static_cast<double>(h.diagonal().size());
}

void BM_SectorMatvecSerial(benchmark::State& st) {
    const auto& h = hamiltonian(static_cast<int>(st.range(0)));
    const VectorXc x = VectorXc::Random(h.diagonal().size());
    VectorXc y(h.diagonal().size());
    for (auto _ : st) {
        h.apply_serial(x, y);
        benchmark::DoNotOptimize(y.data());
    }
}

RunConfig ensemble_config() {
    RunConfig c;
    c.model = ModelSpec::half_filled(8);
    c.meas.M = 1.0;
    c.meas.P = 0.5;
    c.meas.t_off = 2.0;
    c.meas.t_end = 2.0;
    c.evolution.dt = 0.05;
    c.evolution.chi_max = 16;
    c.ground_state.chi_max = 16;
    c.ensemble.R = 8;
    c.ensemble.backend = BackendKind::Mps;
    return c;
}

void BM_EnsembleParallel(benchmark::State& st) {
    const RunConfig c = ensemble_config();
    const Cell cell = expand_cells(c)[0];
    GroundStateCache cache;
    cache.mps(cell_model(c, cell), c.ground_state);
    for (auto _ : st) benchmark::DoNotOptimize(run_ensemble(c, cell, cache, resolve_workers(0)));
}

void BM_EnsembleSerial(benchmark::State& st) {
    const RunConfig c = ensemble_config();
    const Cell cell = expand_cells(c)[0];
    GroundStateCache cache;
    cache.mps(cell_model(c, cell), c.ground_state);
    for (auto _ : st) benchmark::DoNotOptimize(run_ensemble_serial(c, cell, cache));
}

} // namespace

BENCHMARK(BM_SectorMatvecParallel)->Arg(12)->Arg(14);
BENCHMARK(BM_SectorMatvecSerial)->Arg(12)->Arg(14);
BENCHMARK(BM_EnsembleParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
