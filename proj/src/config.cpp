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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nhmps/runner.hpp"

namespace nhmps {

namespace {

namespace pt = boost::property_tree;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects a number, got '" + raw + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ConfigError("'" + key + "' expects a number, got '" + raw + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects an integer, got '" + raw + "'");
    }
    if (used != s.size()) throw ConfigError("'" + key + "' expects an integer, got '" + raw + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects an unsigned integer, got '" + raw + "'");
    }
    if (used != s.size()) throw ConfigError("'" + key + "' expects an unsigned integer, got '" + raw + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        if constexpr (std::is_floating_point_v<T>) s += fmt(xs[i]);
        else s += std::to_string(xs[i]);
    }
    return s;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k{
        {"run", {"name"}},
        {"model", {"L", "J", "Delta", "filling"}},
        {"measurement", {"M", "P", "T", "t_off", "t_end", "sign_policy"}},
        {"evolution", {"dt", "chi_max", "two_site_weight_floor", "hybrid_policy", "krylov_dim", "krylov_tol"}},
        {"ground_state", {"chi_max", "max_sweeps", "e_tol"}},
        {"ensemble", {"R", "master_seed", "backend"}},
        {"sweep", {"P", "M", "L", "Delta"}},
        {"output", {"directory", "window_start", "window_end", "cluster_time", "cluster_threshold"}},
    };
    return k;
}

} // namespace

std::string to_string(BackendKind b) { return b == BackendKind::Mps ? "mps" : "oracle"; }

BackendKind backend_from_string(const std::string& s) {
    if (s == "mps") return BackendKind::Mps;
    if (s == "oracle" || s == "exact") return BackendKind::Oracle;
    throw ConfigError("unknown backend '" + s + "' (expected mps or oracle)");
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t x) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

const char* code_version() { return NHMPS_VERSION; }

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax error: ") + e.what());
    }
    const auto& known = known_keys();
    for (const auto& [section, body] : tree) {
        auto it = known.find(section);
        if (it == known.end()) {
            if (body.empty()) throw ConfigError("key '" + section + "' outside any section");
            throw ConfigError("unknown config section [" + section + "]");
        }
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }

    RunConfig c;
    auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
        const auto v = tree.get_optional<std::string>(pt::ptree::path_type(section + "/" + key, '/'));
        if (!v) return std::nullopt;
        return trim(*v);
    };
    auto num = [&](const char* s, const char* k, double& out) {
        if (auto v = get(s, k)) out = parse_double(std::string(s) + "." + k, *v);
    };
    auto integer = [&](const char* s, const char* k, int& out) {
        if (auto v = get(s, k)) out = static_cast<int>(parse_int(std::string(s) + "." + k, *v));
    };

    if (auto v = get("run", "name")) c.name = *v;

    integer("model", "L", c.model.L);
    num("model", "J", c.model.J);
    num("model", "Delta", c.model.Delta);
    c.model.filling = c.model.L / 2;
    integer("model", "filling", c.model.filling);

    num("measurement", "M", c.meas.M);
    num("measurement", "P", c.meas.P);
    num("measurement", "T", c.meas.T);
    num("measurement", "t_off", c.meas.t_off);
    num("measurement", "t_end", c.meas.t_end);
    if (auto v = get("measurement", "sign_policy")) {
        try {
            c.meas.sign_policy = sign_policy_from_string(*v);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }

    if (auto v = get("evolution", "dt")) {
        if (*v == "auto") c.auto_dt = true;
        else c.evolution.dt = parse_double("evolution.dt", *v);
    }
    integer("evolution", "chi_max", c.evolution.chi_max);
    num("evolution", "two_site_weight_floor", c.evolution.two_site_weight_floor);
    if (auto v = get("evolution", "hybrid_policy")) {
        try {
            c.evolution.hybrid_policy = hybrid_policy_from_string(*v);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }
    integer("evolution", "krylov_dim", c.evolution.krylov.krylov_dim);
    num("evolution", "krylov_tol", c.evolution.krylov.tol);

    c.ground_state.chi_max = c.evolution.chi_max;
    integer("ground_state", "chi_max", c.ground_state.chi_max);
    integer("ground_state", "max_sweeps", c.ground_state.max_sweeps);
    num("ground_state", "e_tol", c.ground_state.e_tol);

    integer("ensemble", "R", c.ensemble.R);
    if (auto v = get("ensemble", "master_seed")) c.ensemble.master_seed = parse_u64("ensemble.master_seed", *v);
    if (auto v = get("ensemble", "backend")) c.ensemble.backend = backend_from_string(*v);

    if (auto v = get("sweep", "P"))
        for (const auto& s : split_list(*v)) c.sweep.P.push_back(parse_double("sweep.P", s));
    if (auto v = get("sweep", "M"))
        for (const auto& s : split_list(*v)) c.sweep.M.push_back(parse_double("sweep.M", s));
    if (auto v = get("sweep", "L"))
        for (const auto& s : split_list(*v)) c.sweep.L.push_back(static_cast<int>(parse_int("sweep.L", s)));
    if (auto v = get("sweep", "Delta"))
        for (const auto& s : split_list(*v)) c.sweep.Delta.push_back(parse_double("sweep.Delta", s));

    if (auto v = get("output", "directory")) c.directory = *v;
    num("output", "window_start", c.analysis.window.t0);
    num("output", "window_end", c.analysis.window.t1);
    num("output", "cluster_time", c.analysis.cluster_time);
    num("output", "cluster_threshold", c.analysis.cluster_threshold);

    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    os << "[run]\nname = " << name << "\n";
    os << "\n[model]\nL = " << model.L << "\nJ = " << fmt(model.J) << "\nDelta = " << fmt(model.Delta)
       << "\nfilling = " << model.filling << "\n";
    os << "\n[measurement]\nM = " << fmt(meas.M) << "\nP = " << fmt(meas.P) << "\nT = " << fmt(meas.T)
       << "\nt_off = " << fmt(meas.t_off) << "\nt_end = " << fmt(meas.t_end)
       << "\nsign_policy = " << to_string(meas.sign_policy) << "\n";
    os << "\n[evolution]\ndt = " << (auto_dt ? std::string("auto") : fmt(evolution.dt))
       << "\nchi_max = " << evolution.chi_max << "\ntwo_site_weight_floor = " << fmt(evolution.two_site_weight_floor)
       << "\nhybrid_policy = " << to_string(evolution.hybrid_policy) << "\nkrylov_dim = " << evolution.krylov.krylov_dim
       << "\nkrylov_tol = " << fmt(evolution.krylov.tol) << "\n";
    os << "\n[ground_state]\nchi_max = " << ground_state.chi_max << "\nmax_sweeps = " << ground_state.max_sweeps
       << "\ne_tol = " << fmt(ground_state.e_tol) << "\n";
    os << "\n[ensemble]\nR = " << ensemble.R << "\nmaster_seed = " << ensemble.master_seed
       << "\nbackend = " << to_string(ensemble.backend) << "\n";
    os << "\n[sweep]\n";
    if (!sweep.P.empty()) os << "P = " << join(sweep.P) << "\n";
    if (!sweep.M.empty()) os << "M = " << join(sweep.M) << "\n";
    if (!sweep.L.empty()) os << "L = " << join(sweep.L) << "\n";
    if (!sweep.Delta.empty()) os << "Delta = " << join(sweep.Delta) << "\n";
    os << "\n[output]\nwindow_start = " << fmt(analysis.window.t0) << "\nwindow_end = " << fmt(analysis.window.t1)
       << "\ncluster_time = " << fmt(analysis.cluster_time)
       << "\ncluster_threshold = " << fmt(analysis.cluster_threshold) << "\n";
    return os.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

std::string RunConfig::hash_hex() const { return hex64(hash()); }

std::string Cell::key() const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "L%d_D%.6g_P%.6g_M%.6g", L, Delta, P, M);
    return buf;
}

std::vector<Cell> expand_cells(const RunConfig& cfg) {
    const std::vector<int> Ls = cfg.sweep.L.empty() ? std::vector<int>{cfg.model.L} : cfg.sweep.L;
    const std::vector<double> Ds = cfg.sweep.Delta.empty() ? std::vector<double>{cfg.model.Delta} : cfg.sweep.Delta;
    const std::vector<double> Ps = cfg.sweep.P.empty() ? std::vector<double>{cfg.meas.P} : cfg.sweep.P;
    const std::vector<double> Ms = cfg.sweep.M.empty() ? std::vector<double>{cfg.meas.M} : cfg.sweep.M;
    std::vector<Cell> out;
    for (int L : Ls)
        for (double d : Ds)
            for (double p : Ps)
                for (double m : Ms) out.push_back({L, d, p, m});
    return out;
}

ModelSpec cell_model(const RunConfig& cfg, const Cell& c) {
    ModelSpec m = cfg.model;
    if (c.L != cfg.model.L) m.filling = c.L / 2;
    m.L = c.L;
    m.Delta = c.Delta;
    return m;
}

MeasurementSpec cell_measurement(const RunConfig& cfg, const Cell& c) {
    MeasurementSpec m = cfg.meas;
    m.P = c.P;
    m.M = c.M;
    return m;
}

double auto_dt(const MeasurementSpec& meas) {
    // half of the largest step the dt <= 0.1 min(1/M, T) rule allows, commensurate with T
    const double n = std::ceil(20.0 * std::max(meas.M * meas.T, 1.0) - 1e-9);
    return meas.T / n;
}

EvolutionConfig cell_evolution(const RunConfig& cfg, const Cell& c) {
    EvolutionConfig e = cfg.evolution;
    if (cfg.auto_dt) e.dt = auto_dt(cell_measurement(cfg, c));
    return e;
}

BackendKind cell_backend(const RunConfig& cfg, const Cell& c) {
    if (cfg.ensemble.backend == BackendKind::Oracle && c.L <= 12) return BackendKind::Oracle;
    return BackendKind::Mps;
}

std::uint64_t cell_seed(const RunConfig& cfg, const Cell& c) {
    return splitmix64(cfg.ensemble.master_seed ^ fnv1a64(c.key()));
}

void RunConfig::validate() const {
    if (ensemble.R < 1) throw ConfigError("ensemble.R must be >= 1");
    if (ground_state.chi_max < 1 || ground_state.max_sweeps < 1) throw ConfigError("invalid ground_state settings");
    if (analysis.window.t1 < analysis.window.t0) throw ConfigError("output window_end precedes window_start");
    if (!(analysis.cluster_threshold >= 0.0 && analysis.cluster_threshold < 0.5))
        throw ConfigError("cluster_threshold must lie in [0, 0.5)");
    if (!sweep.L.empty() && model.filling != model.L / 2)
        throw ConfigError("an L sweep runs at half filling; drop model.filling");
    for (const Cell& c : expand_cells(*this)) {
        try {
            const ModelSpec m = cell_model(*this, c);
            m.validate();
            const MeasurementSpec ms = cell_measurement(*this, c);
            ms.validate();
            const EvolutionConfig ev = cell_evolution(*this, c);
            ev.validate(ms);
            auto commensurate = [](double span, double step) {
                const double r = span / step;
                return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
            };
            if (!commensurate(ms.T, ev.dt)) throw ConfigError("T must be a multiple of dt");
            if (!commensurate(ms.t_off, ms.T)) throw ConfigError("t_off must be a multiple of T");
            const double tail = ms.t_end - ms.t_off - std::floor((ms.t_end - ms.t_off) / ms.T + 1e-9) * ms.T;
            if (tail > 1e-12 && !commensurate(tail, ev.dt)) throw ConfigError("t_end - t_off must be a multiple of dt");
        } catch (const ConfigError& e) {
            throw ConfigError("cell " + c.key() + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError("cell " + c.key() + ": " + e.what());
        }
    }
}

std::vector<std::string> preset_names() {
    return {"zeno",
            "rare-strong",
            "weak-frequent",
            "weak-rare",
            "boundary-cluster",
            "noninteracting-cluster",
            "antiferro-cluster",
            "ferro-cluster",
            "sweep-small",
            "phase-diagram-production",
            "entanglement-slope-production",
            "cluster-scaling-production"};
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    c.name = name;
    c.ensemble.R = 40;
    auto exact_cell = [&](double M, double P) {
        c.model = ModelSpec::half_filled(12);
        c.meas.M = M;
        c.meas.P = P;
        c.ensemble.backend = BackendKind::Oracle;
    };
    auto cluster_cell = [&](double Delta) {
        c.model = ModelSpec::half_filled(16, Delta);
        c.meas.M = 0.5;
        c.meas.P = 1.0;
        c.evolution.chi_max = 32;
        c.ground_state.chi_max = 32;
    };
    if (name == "zeno") exact_cell(10.0, 1.0);
    else if (name == "rare-strong") exact_cell(10.0, 0.1);
    else if (name == "weak-frequent") exact_cell(0.1, 1.0);
    else if (name == "weak-rare") exact_cell(0.1, 0.1);
    else if (name == "boundary-cluster") cluster_cell(-0.5);
    else if (name == "noninteracting-cluster") cluster_cell(0.0);
    else if (name == "antiferro-cluster") cluster_cell(1.5);
    else if (name == "ferro-cluster") cluster_cell(-1.5);
    else if (name == "sweep-small") {
        exact_cell(1.0, 1.0);
        c.sweep.P = {0.1, 0.2, 0.3, 0.5, 0.8, 1.0};
        c.sweep.M = {0.1, 0.2, 0.3, 0.5, 1.0, 3.0, 10.0};
        c.sweep.L = {8, 12};
    } else if (name == "phase-diagram-production") {
        // weeks of CPU time; not meant for a workstation
        c.model = ModelSpec::half_filled(50);
        c.evolution.chi_max = 500;
        c.ground_state.chi_max = 500;
        c.sweep.P = {0.1, 0.2, 0.3, 0.5, 0.8, 1.0};
        c.sweep.M = {0.1, 0.2, 0.3, 0.5, 1.0, 3.0, 10.0};
    } else if (name == "entanglement-slope-production") {
        c.model = ModelSpec::half_filled(50);
        c.meas.M = 0.2;
        c.meas.P = 1.0;
        c.evolution.chi_max = 128;
        c.ground_state.chi_max = 128;
    } else if (name == "cluster-scaling-production") {
        c.model = ModelSpec::half_filled(50);
        c.meas.M = 0.5;
        c.meas.P = 1.0;
        c.evolution.chi_max = 64;
        c.ground_state.chi_max = 64;
        c.sweep.L = {16, 24, 32, 40, 50};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    c.directory = name;
    c.validate();
    return c;
}

} // namespace nhmps
