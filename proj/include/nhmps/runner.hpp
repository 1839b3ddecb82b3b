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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "nhmps/dmrg.hpp"
#include "nhmps/observables.hpp"
#include "nhmps/protocol.hpp"

namespace nhmps {

class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// Refusals from run / resume (bad artifact directory, hash mismatch, corrupted manifest).
class RunnerError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class BackendKind { Mps, Oracle };

std::string to_string(BackendKind b);
BackendKind backend_from_string(const std::string& s);

struct GroundStateSpec {
    int chi_max = 64;
    int max_sweeps = 20;
    double e_tol = 1e-10;
};

struct EnsembleSpec {
    int R = 40;
    std::uint64_t master_seed = 1;
    BackendKind backend = BackendKind::Mps; // Oracle means dense when L <= 12
};

// Empty lists fall back to the single value in model / meas.
struct SweepSpec {
    std::vector<double> P;
    std::vector<double> M;
    std::vector<int> L;
    std::vector<double> Delta;
};

struct RunConfig {
    std::string name = "custom";
    ModelSpec model{};
    MeasurementSpec meas{};
    EvolutionConfig evolution{};
    bool auto_dt = false; // dt = T / ceil(20 max(M T, 1)) per cell
    GroundStateSpec ground_state{};
    EnsembleSpec ensemble{};
    SweepSpec sweep{};
    SummaryOptions analysis{};
    std::string directory = "nhmps_out";

    void validate() const; // every cell, throws ConfigError
    // Sorted key = value text; parses back to an equal config. Excludes the directory.
    std::string canonical() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t x);
const char* code_version();

struct Cell {
    int L = 0;
    double Delta = 0.0;
    double P = 0.0;
    double M = 0.0;
    std::string key() const;
};

// Ordered by L, Delta, P, M.
std::vector<Cell> expand_cells(const RunConfig& cfg);
ModelSpec cell_model(const RunConfig& cfg, const Cell& c);
MeasurementSpec cell_measurement(const RunConfig& cfg, const Cell& c);
EvolutionConfig cell_evolution(const RunConfig& cfg, const Cell& c);
BackendKind cell_backend(const RunConfig& cfg, const Cell& c);
double auto_dt(const MeasurementSpec& meas);
// Streams depend on the seed and the physical cell only, never on chi or dt.
std::uint64_t cell_seed(const RunConfig& cfg, const Cell& c);

// Explicit count if positive, else NHMPS_WORKERS, else the OpenMP default.
int resolve_workers(int requested);

// Ground states keyed by (L, Delta, filling, chi_max); MPS ones are also written
// as snapshots under `directory` when it is non-empty.
class GroundStateCache {
   public:
    explicit GroundStateCache(std::string directory = {}) : dir_(std::move(directory)) {}
    std::shared_ptr<const MpsState> mps(const ModelSpec& model, const GroundStateSpec& gs);
    std::shared_ptr<const VectorXc> dense(const ModelSpec& model);
    std::shared_ptr<const SectorHamiltonian> sector_hamiltonian(const ModelSpec& model);

   private:
    std::string dir_;
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<const MpsState>> mps_;
    std::map<std::string, std::shared_ptr<const VectorXc>> dense_;
    std::map<std::string, std::shared_ptr<const SectorHamiltonian>> ham_;
};

// OpenMP work sharing over trajectories; results land in trajectory order.
std::vector<TrajectoryRecord> run_ensemble(const RunConfig& cfg, const Cell& cell, GroundStateCache& cache,
                                           int workers);
// Same result computed in a plain loop.
std::vector<TrajectoryRecord> run_ensemble_serial(const RunConfig& cfg, const Cell& cell, GroundStateCache& cache);

struct CellResult {
    Cell cell;
    BackendKind backend = BackendKind::Mps;
    double dt = 0.0;
    EnsembleSummary summary;
    bool degraded = false; // more than 10% of trajectories failed
    bool reused = false;   // loaded from a previous run
};

struct RunReport {
    std::string directory;
    std::string config_hash;
    std::vector<CellResult> cells;
    int cells_run = 0;
    int cells_reused = 0;
    bool any_degraded = false;
};

using LogFn = std::function<void(const std::string&)>;

// Fresh run into cfg.directory; refuses a directory that already has a manifest.
RunReport run(const RunConfig& cfg, int workers = 0, const LogFn& log = {});
// Continue a partial run; complete cells are reloaded from their trajectory files.
RunReport resume(const std::string& directory, int workers = 0, const LogFn& log = {});

struct ChiBenchRow {
    int chi = 0;
    Cell cell;
    MeanErr S_bar;
    MeanErr C;
    bool S_agrees = true; // with the first chi, within 2 combined sigma
    bool C_agrees = true;
};

// One full run per chi under directory/chi_<chi>, plus directory/chi_bench.csv.
std::vector<ChiBenchRow> chi_benchmark(const RunConfig& cfg, const std::vector<int>& chis, int workers = 0,
                                       const LogFn& log = {});

std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

// Artifact writers, exposed for tests.
std::string summary_csv(const RunConfig& cfg, const std::vector<CellResult>& cells);
std::string phase_predicate_csv(const RunConfig& cfg, const std::vector<CellResult>& cells);
std::string phase_boundary_json(const RunConfig& cfg, const std::vector<CellResult>& cells);

} // namespace nhmps
