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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "nhmps/runner.hpp"
#include "nhmps/single_site.hpp"

using namespace nhmps;

namespace {

void log_line(const std::string& s) { std::cerr << "[nhmps] " << s << std::endl; }

void print_report(const RunReport& r) {
    std::printf("directory %s\nconfig_hash %s\ncells run %d, reused %d%s\n", r.directory.c_str(),
                r.config_hash.c_str(), r.cells_run, r.cells_reused, r.any_degraded ? "\nWARNING: degraded cells" : "");
}

std::vector<int> parse_chis(const std::string& s) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("bad chi list entry '" + item + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

RunConfig config_from(const std::string& file, const std::string& preset_name, const std::string& out_dir) {
    if (file.empty() == preset_name.empty()) throw ConfigError("give exactly one of --config or --preset");
    RunConfig c = file.empty() ? preset(preset_name) : load_config(file);
    if (!out_dir.empty()) c.directory = out_dir;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monitored hard-core boson chain simulator"};
    app.require_subcommand(1);
    int workers = 0;
    app.add_option("-w,--workers", workers, "Worker threads (default: NHMPS_WORKERS or all cores)");

    std::string config_file, preset_name, out_dir;
    auto* run_cmd = app.add_subcommand("run", "Run every cell of a config into a fresh artifact directory");
    run_cmd->add_option("-c,--config", config_file, "INI config file");
    run_cmd->add_option("-p,--preset", preset_name, "Named preset instead of a file");
    run_cmd->add_option("-o,--out", out_dir, "Override the artifact directory");

    std::string resume_dir;
    auto* resume_cmd = app.add_subcommand("resume", "Finish an interrupted run");
    resume_cmd->add_option("directory", resume_dir, "Artifact directory")->required();

    std::string chi_list = "16,64";
    auto* chi_cmd = app.add_subcommand("chi-bench", "Repeat a config at several bond dimensions");
    chi_cmd->add_option("-c,--config", config_file, "INI config file");
    chi_cmd->add_option("-p,--preset", preset_name, "Named preset instead of a file");
    chi_cmd->add_option("-o,--out", out_dir, "Override the artifact directory");
    chi_cmd->add_option("--chi", chi_list, "Comma separated bond dimensions")->capture_default_str();

    auto* show_cmd = app.add_subcommand("show-config", "Print the canonical form and hash of a config");
    show_cmd->add_option("-c,--config", config_file, "INI config file");
    show_cmd->add_option("-p,--preset", preset_name, "Named preset instead of a file");

    auto* presets_cmd = app.add_subcommand("presets", "List named presets");

    double occ = 0.5, phase = 0.0, M = 1.0, T = 0.1, t_end = 10.0;
    int trials = 1000;
    std::uint64_t seed = 1;
    std::string evolution = "nonlinear", mc = "nonhermitian", csv_out;
    auto* ss_cmd = app.add_subcommand("single-site", "Single-site protocol comparison as CSV");
    ss_cmd->add_option("--occupation", occ, "Initial |alpha|^2")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    ss_cmd->add_option("--phase", phase, "Relative phase of alpha")->capture_default_str();
    ss_cmd->add_option("-M", M, "Measurement strength")->check(CLI::NonNegativeNumber)->capture_default_str();
    ss_cmd->add_option("-T", T, "Measurement interval")->check(CLI::PositiveNumber)->capture_default_str();
    ss_cmd->add_option("--t-end", t_end, "Final time")->check(CLI::PositiveNumber)->capture_default_str();
    ss_cmd->add_option("--evolution", evolution, "ODE reference")
        ->check(CLI::IsMember({"lindblad", "noclick", "noclick-normalized", "nonlinear", "none"}))
        ->capture_default_str();
    ss_cmd->add_option("--mc", mc, "Monte Carlo protocol")
        ->check(CLI::IsMember({"conventional", "nonhermitian", "none"}))
        ->capture_default_str();
    ss_cmd->add_option("--trials", trials, "Monte Carlo trials (>= 100)")->capture_default_str();
    ss_cmd->add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();
    ss_cmd->add_option("--csv", csv_out, "Write CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            print_report(run(config_from(config_file, preset_name, out_dir), workers, log_line));
        } else if (*resume_cmd) {
            print_report(resume(resume_dir, workers, log_line));
        } else if (*chi_cmd) {
            const RunConfig c = config_from(config_file, preset_name, out_dir);
            const auto rows = chi_benchmark(c, parse_chis(chi_list), workers, log_line);
            bool agree = true;
            for (const auto& r : rows) agree = agree && r.S_agrees && r.C_agrees;
            std::printf("%s/chi_bench.csv written; %s\n", c.directory.c_str(),
                        agree ? "all cells agree within 2 sigma" : "some cells differ beyond 2 sigma");
        } else if (*show_cmd) {
            const RunConfig c = config_from(config_file, preset_name, "");
            c.validate();
            std::printf("# hash %s\n%s", c.hash_hex().c_str(), c.canonical().c_str());
        } else if (*presets_cmd) {
            for (const auto& n : preset_names()) std::printf("%s\n", n.c_str());
        } else if (*ss_cmd) {
            using namespace nhmps::single_site;
            const Qubit q0{std::polar(std::sqrt(occ), phase), cplx{std::sqrt(1.0 - occ), 0.0}};
            const State s0 = State::from_qubit(q0);
            Trajectory ode;
            if (evolution == "lindblad") ode = lindblad_evolve(s0, M, T, t_end);
            else if (evolution == "noclick") ode = noclick_postselect_evolve(s0, M, T, t_end, false);
            else if (evolution == "noclick-normalized") ode = noclick_postselect_evolve(s0, M, T, t_end, true);
            else if (evolution == "nonlinear") ode = nonlinear_master_evolve(s0, M, T, t_end);
            std::vector<AveragedPoint> avg;
            if (mc != "none") {
                const int steps = static_cast<int>(std::llround(t_end / T));
                avg = monte_carlo_average(q0, M, T, steps, trials, protocol_from_string(mc), seed);
            }
            const std::string csv = trajectory_csv(ode, avg);
            if (csv_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream f(csv_out);
                if (!f) throw std::runtime_error("cannot write " + csv_out);
                f << csv;
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const RunnerError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
