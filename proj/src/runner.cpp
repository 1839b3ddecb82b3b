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

#include "nhmps/runner.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nhmps {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw RunnerError("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Write to a temporary name and rename so a crash never leaves half a file.
void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw RunnerError("cannot write " + tmp.string());
        out << text;
        if (!out) throw RunnerError("write failed for " + tmp.string());
    }
    fs::rename(tmp, p);
}

std::string gs_key(const ModelSpec& m, int chi) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "L%d_D%.17g_N%d_J%.17g_chi%d", m.L, m.Delta, m.filling, m.J, chi);
    return buf;
}

fs::path traj_path(const fs::path& dir, const Cell& c, int r) {
    char name[32];
    std::snprintf(name, sizeof name, "traj_%04d.jsonl", r);
    return dir / "cells" / c.key() / name;
}

TrajectoryRecord failed_record(std::uint64_t id, const std::string& what) {
    TrajectoryRecord r;
    r.trajectory_id = id;
    r.failed = true;
    r.error = what;
    return r;
}

struct CellContext {
    ModelSpec model;
    MeasurementSpec meas;
    EvolutionConfig evo;
    BackendKind backend;
    std::uint64_t seed;
    std::shared_ptr<const MpsState> mps_gs;
    std::shared_ptr<const VectorXc> dense_gs;
    std::shared_ptr<const SectorHamiltonian> ham;
};

CellContext prepare(const RunConfig& cfg, const Cell& cell, GroundStateCache& cache) {
    CellContext c;
    c.model = cell_model(cfg, cell);
    c.meas = cell_measurement(cfg, cell);
    c.evo = cell_evolution(cfg, cell);
    c.backend = cell_backend(cfg, cell);
    c.seed = cell_seed(cfg, cell);
    if (c.backend == BackendKind::Oracle) {
        c.ham = cache.sector_hamiltonian(c.model);
        c.dense_gs = cache.dense(c.model);
    } else {
        c.mps_gs = cache.mps(c.model, cfg.ground_state);
    }
    return c;
}

TrajectoryRecord one_trajectory(const CellContext& c, int r) {
    const RngPolicy rng{c.seed, static_cast<std::uint64_t>(r)};
    try {
        if (c.backend == BackendKind::Oracle) return dense_trajectory(c.ham, *c.dense_gs, c.meas, c.evo, rng);
        return run_trajectory(*c.mps_gs, c.model, c.meas, c.evo, rng);
    } catch (const std::exception& e) {
        return failed_record(rng.trajectory_id, e.what());
    }
}

ojson summary_json(const RunConfig& cfg, const CellResult& r) {
    const auto& s = r.summary;
    ojson j;
    j["config_hash"] = cfg.hash_hex();
    j["code_version"] = code_version();
    j["cell"] = r.cell.key();
    j["L"] = r.cell.L;
    j["Delta"] = r.cell.Delta;
    j["P"] = r.cell.P;
    j["M"] = r.cell.M;
    j["backend"] = to_string(r.backend);
    j["dt"] = r.dt;
    j["chi_max"] = cfg.evolution.chi_max;
    j["R"] = cfg.ensemble.R;
    j["n_trajectories"] = s.n_trajectories;
    j["n_failed"] = s.n_failed;
    j["degraded"] = r.degraded;
    j["window"] = {s.opts.window.t0, s.opts.window.t1};
    j["initial_entropy_bits"] = s.initial_entropy;
    j["S_bar"] = s.window_entropy.mean;
    j["S_bar_stderr"] = s.window_entropy.stderr_;
    j["cluster_time"] = s.opts.cluster_time;
    j["C"] = s.cluster_at_eval.mean;
    j["C_stderr"] = s.cluster_at_eval.stderr_;
    j["times"] = s.times;
    j["mean_entropy_bits"] = s.mean_entropy_bits;
    j["entropy_stderr"] = s.entropy_stderr;
    j["mean_max_cluster"] = s.mean_max_cluster;
    j["cluster_stderr"] = s.cluster_stderr;
    return j;
}

ojson manifest_json(const RunConfig& cfg, const std::map<std::string, CellResult>& done) {
    ojson j;
    j["config_hash"] = cfg.hash_hex();
    j["code_version"] = code_version();
    j["name"] = cfg.name;
    ojson cells = ojson::object();
    for (const Cell& c : expand_cells(cfg)) {
        ojson e;
        auto it = done.find(c.key());
        if (it == done.end()) {
            e["status"] = "pending";
        } else {
            e["status"] = "complete";
            e["n_failed"] = it->second.summary.n_failed;
            e["degraded"] = it->second.degraded;
        }
        cells[c.key()] = e;
    }
    j["cells"] = cells;
    return j;
}

CellResult summarize(const RunConfig& cfg, const Cell& cell, const std::vector<TrajectoryRecord>& recs) {
    CellResult r;
    r.cell = cell;
    r.backend = cell_backend(cfg, cell);
    r.dt = cell_evolution(cfg, cell).dt;
    int failed = 0;
    for (const auto& t : recs) failed += t.failed ? 1 : 0;
    r.degraded = failed * 10 > static_cast<int>(recs.size());
    if (failed == static_cast<int>(recs.size())) {
        r.summary.n_failed = failed;
        r.summary.opts = cfg.analysis;
        r.degraded = true;
        return r;
    }
    r.summary = ensemble_average(recs, cfg.analysis);
    return r;
}

// Optional-valued predicate columns.
std::string pred_cols(const std::optional<Predicate>& p) {
    if (!p) return "NA,NA";
    return std::string(p->holds ? "true" : "false") + "," + fmt(p->z());
}

const CellResult* find_larger(const std::vector<CellResult>& cells, const CellResult& r) {
    const CellResult* best = nullptr;
    for (const auto& o : cells)
        if (o.cell.Delta == r.cell.Delta && o.cell.P == r.cell.P && o.cell.M == r.cell.M && o.cell.L > r.cell.L &&
            o.summary.n_trajectories > 0 && (!best || o.cell.L < best->cell.L))
            best = &o;
    return best;
}

std::vector<TrajectoryRecord> load_cell(const fs::path& dir, const RunConfig& cfg, const Cell& cell) {
    std::vector<TrajectoryRecord> recs;
    for (int r = 0; r < cfg.ensemble.R; ++r) {
        const fs::path p = traj_path(dir, cell, r);
        if (!fs::exists(p)) throw RunnerError("missing trajectory file " + p.string());
        try {
            recs.push_back(from_jsonl(read_file(p)));
        } catch (const nlohmann::json::exception& e) {
            throw RunnerError("unreadable trajectory file " + p.string() + ": " + e.what());
        }
    }
    return recs;
}

RunReport execute(const RunConfig& cfg, const fs::path& dir, std::map<std::string, CellResult> done, int workers,
                  const LogFn& log) {
    RunReport rep;
    rep.directory = dir.string();
    rep.config_hash = cfg.hash_hex();
    GroundStateCache cache((dir / "gs_cache").string());
    const int nw = resolve_workers(workers);
    for (const Cell& cell : expand_cells(cfg)) {
        auto it = done.find(cell.key());
        if (it != done.end()) {
            it->second.reused = true;
            rep.cells.push_back(it->second);
            ++rep.cells_reused;
            if (log) log("cell " + cell.key() + ": reused");
            continue;
        }
        if (log) log("cell " + cell.key() + ": running " + std::to_string(cfg.ensemble.R) + " trajectories");
        const auto recs = run_ensemble(cfg, cell, cache, nw);
        for (int r = 0; r < cfg.ensemble.R; ++r)
            write_file(traj_path(dir, cell, r), to_jsonl(recs[static_cast<std::size_t>(r)], cfg.hash_hex()));
        CellResult res = summarize(cfg, cell, recs);
        write_file(dir / "cells" / cell.key() / "summary.json", summary_json(cfg, res).dump(1) + "\n");
        done[cell.key()] = res;
        write_file(dir / "manifest.json", manifest_json(cfg, done).dump(1) + "\n");
        rep.cells.push_back(res);
        ++rep.cells_run;
        if (log) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "cell %s: S_bar=%.4f +- %.4f C=%.3f failed=%d%s", cell.key().c_str(),
                          res.summary.window_entropy.mean, res.summary.window_entropy.stderr_,
                          res.summary.cluster_at_eval.mean, res.summary.n_failed, res.degraded ? " DEGRADED" : "");
            log(buf);
        }
    }
    for (const auto& c : rep.cells) rep.any_degraded = rep.any_degraded || c.degraded;
    write_file(dir / "manifest.json", manifest_json(cfg, done).dump(1) + "\n");
    write_file(dir / "summary.csv", summary_csv(cfg, rep.cells));
    write_file(dir / "phase_predicates.csv", phase_predicate_csv(cfg, rep.cells));
    write_file(dir / "phase_boundary.json", phase_boundary_json(cfg, rep.cells));
    return rep;
}

} // namespace

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NHMPS_WORKERS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
    }
    return std::max(1, omp_get_max_threads());
}

std::shared_ptr<const MpsState> GroundStateCache::mps(const ModelSpec& model, const GroundStateSpec& gs) {
    const std::string key = gs_key(model, gs.chi_max);
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = mps_.find(key); it != mps_.end()) return it->second;
    std::shared_ptr<const MpsState> st;
    const fs::path file = dir_.empty() ? fs::path() : fs::path(dir_) / (key + ".snap");
    if (!dir_.empty() && fs::exists(file)) {
        st = std::make_shared<const MpsState>(load_snapshot(file.string()));
    } else {
        DmrgOptions o;
        o.chi_max = gs.chi_max;
        o.max_sweeps = gs.max_sweeps;
        o.e_tol = gs.e_tol;
        st = std::make_shared<const MpsState>(dmrg(build_h0(model), model, o).state);
        if (!dir_.empty()) {
            fs::create_directories(dir_);
            save_snapshot(file.string(), *st);
        }
    }
    mps_[key] = st;
    return st;
}

std::shared_ptr<const SectorHamiltonian> GroundStateCache::sector_hamiltonian(const ModelSpec& model) {
    const std::string key = gs_key(model, 0);
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = ham_.find(key); it != ham_.end()) return it->second;
    auto h = std::make_shared<const SectorHamiltonian>(model);
    ham_[key] = h;
    return h;
}

std::shared_ptr<const VectorXc> GroundStateCache::dense(const ModelSpec& model) {
    const auto h = sector_hamiltonian(model);
    const std::string key = gs_key(model, 0);
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = dense_.find(key); it != dense_.end()) return it->second;
    auto v = std::make_shared<const VectorXc>(dense_ground_state(*h).vector);
    dense_[key] = v;
    return v;
}

std::vector<TrajectoryRecord> run_ensemble(const RunConfig& cfg, const Cell& cell, GroundStateCache& cache,
                                           int workers) {
    const CellContext ctx = prepare(cfg, cell, cache);
    const int R = cfg.ensemble.R;
    std::vector<TrajectoryRecord> out(static_cast<std::size_t>(R));
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, workers))
    for (int r = 0; r < R; ++r) out[static_cast<std::size_t>(r)] = one_trajectory(ctx, r);
    return out;
}

std::vector<TrajectoryRecord> run_ensemble_serial(const RunConfig& cfg, const Cell& cell, GroundStateCache& cache) {
    const CellContext ctx = prepare(cfg, cell, cache);
    std::vector<TrajectoryRecord> out;
    for (int r = 0; r < cfg.ensemble.R; ++r) out.push_back(one_trajectory(ctx, r));
    return out;
}

std::string summary_csv(const RunConfig& cfg, const std::vector<CellResult>& cells) {
    std::ostringstream os;
    os << "config_hash,code_version,L,Delta,P,M,chi_max,dt,backend,R,n_failed,degraded,S0_bits,S_bar_bits,"
          "S_bar_stderr,C,C_stderr,exceeds_initial,exceeds_initial_z,grows_with_L,grows_with_L_z\n";
    for (const auto& r : cells) {
        const auto& s = r.summary;
        std::optional<Predicate> ex, gr;
        if (s.n_trajectories > 0) {
            ex = exceeds_initial(s);
            if (const CellResult* big = find_larger(cells, r)) gr = grows_with_length(s, big->summary);
        }
        os << cfg.hash_hex() << ',' << code_version() << ',' << r.cell.L << ',' << fmt(r.cell.Delta) << ','
           << fmt(r.cell.P) << ',' << fmt(r.cell.M) << ',' << cfg.evolution.chi_max << ',' << fmt(r.dt) << ','
           << to_string(r.backend) << ',' << cfg.ensemble.R << ',' << s.n_failed << ','
           << (r.degraded ? "true" : "false") << ',';
        if (s.n_trajectories > 0)
            os << fmt(s.initial_entropy) << ',' << fmt(s.window_entropy.mean) << ',' << fmt(s.window_entropy.stderr_)
               << ',' << fmt(s.cluster_at_eval.mean) << ',' << fmt(s.cluster_at_eval.stderr_);
        else
            os << "NA,NA,NA,NA,NA";
        os << ',' << pred_cols(ex) << ',' << pred_cols(gr) << '\n';
    }
    return os.str();
}

std::string phase_predicate_csv(const RunConfig& cfg, const std::vector<CellResult>& cells) {
    std::ostringstream os;
    os << "config_hash,code_version,Delta,P,M,L,L_next,n_failed,exceeds_initial,exceeds_initial_z,grows_with_L,"
          "grows_with_L_z\n";
    for (const auto& r : cells) {
        std::optional<Predicate> ex, gr;
        const CellResult* big = nullptr;
        if (r.summary.n_trajectories > 0) {
            ex = exceeds_initial(r.summary);
            big = find_larger(cells, r);
            if (big) gr = grows_with_length(r.summary, big->summary);
        }
        os << cfg.hash_hex() << ',' << code_version() << ',' << fmt(r.cell.Delta) << ',' << fmt(r.cell.P) << ','
           << fmt(r.cell.M) << ',' << r.cell.L << ',' << (big ? std::to_string(big->cell.L) : std::string("NA")) << ','
           << r.summary.n_failed << ',' << pred_cols(ex) << ',' << pred_cols(gr) << '\n';
    }
    return os.str();
}

std::string phase_boundary_json(const RunConfig& cfg, const std::vector<CellResult>& cells) {
    ojson j;
    j["config_hash"] = cfg.hash_hex();
    j["code_version"] = code_version();
    j["contour"] = "S_bar - S0 = 0, interpolated in log M along each P row";
    ojson list = ojson::array();
    std::vector<std::pair<int, double>> groups;
    for (const auto& r : cells)
        if (std::find(groups.begin(), groups.end(), std::make_pair(r.cell.L, r.cell.Delta)) == groups.end())
            groups.emplace_back(r.cell.L, r.cell.Delta);
    for (const auto& [L, D] : groups) {
        std::vector<double> Ps, Ms;
        for (const auto& r : cells)
            if (r.cell.L == L && r.cell.Delta == D) {
                if (std::find(Ps.begin(), Ps.end(), r.cell.P) == Ps.end()) Ps.push_back(r.cell.P);
                if (std::find(Ms.begin(), Ms.end(), r.cell.M) == Ms.end()) Ms.push_back(r.cell.M);
            }
        std::sort(Ps.begin(), Ps.end());
        std::sort(Ms.begin(), Ms.end());
        if (Ms.size() < 2) continue;
        std::vector<std::vector<double>> value(Ps.size(), std::vector<double>(Ms.size(), 0.0));
        bool complete = true;
        for (const auto& r : cells) {
            if (r.cell.L != L || r.cell.Delta != D) continue;
            if (r.summary.n_trajectories == 0) complete = false;
            const auto i = std::find(Ps.begin(), Ps.end(), r.cell.P) - Ps.begin();
            const auto k = std::find(Ms.begin(), Ms.end(), r.cell.M) - Ms.begin();
            value[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                r.summary.window_entropy.mean - r.summary.initial_entropy;
        }
        if (!complete) continue;
        ojson g;
        g["L"] = L;
        g["Delta"] = D;
        ojson pts = ojson::array();
        for (const auto& p : boundary_polyline(Ps, Ms, value)) pts.push_back({{"P", p.P}, {"M", p.M}});
        g["points"] = pts;
        list.push_back(g);
    }
    j["boundaries"] = list;
    return j.dump(1) + "\n";
}

RunReport run(const RunConfig& cfg, int workers, const LogFn& log) {
    cfg.validate();
    const fs::path dir(cfg.directory);
    if (fs::exists(dir / "manifest.json"))
        throw RunnerError("artifact directory " + dir.string() + " already holds a run; use resume");
    fs::create_directories(dir);
    write_file(dir / "config.ini", cfg.canonical());
    write_file(dir / "manifest.json", manifest_json(cfg, {}).dump(1) + "\n");
    return execute(cfg, dir, {}, workers, log);
}

RunReport resume(const std::string& directory, int workers, const LogFn& log) {
    const fs::path dir(directory);
    if (!fs::exists(dir / "config.ini")) throw RunnerError("no config.ini in " + dir.string());
    RunConfig cfg = parse_config(read_file(dir / "config.ini"));
    cfg.directory = dir.string();

    ojson manifest;
    try {
        manifest = ojson::parse(read_file(dir / "manifest.json"));
        if (!manifest.is_object() || !manifest.contains("config_hash") || !manifest.contains("cells") ||
            !manifest.at("cells").is_object())
            throw RunnerError("missing fields");
    } catch (const std::exception& e) {
        throw RunnerError("corrupted manifest in " + dir.string() + ": " + e.what());
    }
    const std::string stored = manifest.at("config_hash").is_string() ? manifest.at("config_hash").get<std::string>() : "";
    if (stored != cfg.hash_hex())
        throw RunnerError("config hash mismatch: manifest has '" + stored + "', config.ini hashes to " + cfg.hash_hex());

    std::map<std::string, CellResult> done;
    for (const Cell& cell : expand_cells(cfg)) {
        const auto& cells = manifest.at("cells");
        if (!cells.contains(cell.key())) continue;
        const auto& e = cells.at(cell.key());
        if (!e.is_object() || e.value("status", std::string()) != "complete") continue;
        try {
            done[cell.key()] = summarize(cfg, cell, load_cell(dir, cfg, cell));
        } catch (const RunnerError& err) {
            // incomplete files: run the cell again
            if (log) log("cell " + cell.key() + ": " + err.what() + "; rerunning");
        }
    }
    return execute(cfg, dir, std::move(done), workers, log);
}

std::vector<ChiBenchRow> chi_benchmark(const RunConfig& cfg, const std::vector<int>& chis, int workers,
                                       const LogFn& log) {
    if (chis.size() < 2) throw ConfigError("chi benchmark needs at least two chi values");
    const fs::path dir(cfg.directory);
    std::vector<ChiBenchRow> rows;
    std::vector<RunReport> reps;
    for (int chi : chis) {
        RunConfig c = cfg;
        c.evolution.chi_max = chi;
        c.ground_state.chi_max = chi;
        c.directory = (dir / ("chi_" + std::to_string(chi))).string();
        if (log) log("chi " + std::to_string(chi));
        if (fs::exists(fs::path(c.directory) / "manifest.json")) {
            const RunConfig stored = load_config((fs::path(c.directory) / "config.ini").string());
            if (stored.hash() != c.hash()) throw RunnerError("existing " + c.directory + " holds a different config");
            reps.push_back(resume(c.directory, workers, log));
        } else {
            reps.push_back(run(c, workers, log));
        }
    }
    for (std::size_t k = 0; k < chis.size(); ++k)
        for (std::size_t i = 0; i < reps[k].cells.size(); ++i) {
            const auto& cr = reps[k].cells[i];
            ChiBenchRow row;
            row.chi = chis[k];
            row.cell = cr.cell;
            row.S_bar = cr.summary.window_entropy;
            row.C = cr.summary.cluster_at_eval;
            const auto& ref = reps[0].cells[i].summary;
            const Predicate dS = greater_than(row.S_bar, ref.window_entropy);
            const Predicate dC = greater_than(row.C, ref.cluster_at_eval);
            row.S_agrees = std::abs(dS.margin) <= 2.0 * dS.sigma;
            row.C_agrees = std::abs(dC.margin) <= 2.0 * dC.sigma;
            rows.push_back(row);
        }
    std::ostringstream os;
    os << "config_hash,code_version,cell,chi,S_bar,S_bar_stderr,C,C_stderr,S_agrees_with_chi" << chis.front()
       << ",C_agrees_with_chi" << chis.front() << "\n";
    for (const auto& r : rows)
        os << cfg.hash_hex() << ',' << code_version() << ',' << r.cell.key() << ',' << r.chi << ',' << fmt(r.S_bar.mean)
           << ',' << fmt(r.S_bar.stderr_) << ',' << fmt(r.C.mean) << ',' << fmt(r.C.stderr_) << ','
           << (r.S_agrees ? "true" : "false") << ',' << (r.C_agrees ? "true" : "false") << '\n';
    write_file(dir / "chi_bench.csv", os.str());
    return rows;
}

} // namespace nhmps
