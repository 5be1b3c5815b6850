// Copyright 2026 The bellxt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "bellxt/errors.hpp"
#include "bellxt/io.hpp"
#include "bellxt/pbr.hpp"
#include "bellxt/sim.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

void emit_error(const std::string &kind, const std::string &message, int code, std::optional<int64_t> line = {}) {
    json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    if (line) {
        j["line"] = *line;
    }
    std::cerr << j.dump() << '\n';
}

// Flags the user actually passed, as config keys.
struct Flags {
    json values = json::object();

    template <typename T>
    void set(const char *key, const std::optional<T> &v) {
        if (v) {
            values[key] = *v;
        }
    }
};

bellxt::RunConfig load_config(const json &inherited, const std::string &config_path, const json &flags) {
    bellxt::RunConfig c;
    c = bellxt::RunConfig::merged(c, inherited);
    if (!config_path.empty()) {
        json file;
        try {
            file = json::parse(bellxt::read_file(config_path));
        } catch (const json::parse_error &e) {
            throw bellxt::InvalidArgument("config file '" + config_path + "': " + e.what());
        }
        c = bellxt::RunConfig::merged(c, file);
    }
    c = bellxt::RunConfig::merged(c, flags);
    c.validate();
    return c;
}

std::vector<double> parse_list(const std::string &s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::logic_error &) {
            throw bellxt::InvalidArgument("not a number: '" + item + "'");
        }
    }
    return out;
}

int cmd_simulate(const std::string &config_path, const Flags &flags, const std::string &out_path) {
    bellxt::RunConfig cfg = load_config(json::object(), config_path, flags.values);
    auto records = bellxt::sample_campaign(cfg.circuit, cfg.noise_model(), cfg.plan, cfg.scenario);
    std::ostringstream os;
    bellxt::write_trial_log(os, cfg.scenario, records, cfg.to_json());
    if (out_path == "-") {
        std::cout << os.str();
    } else {
        bellxt::write_file_atomic(out_path, os.str());
    }
    return 0;
}

int cmd_analyze(const std::string &config_path, const Flags &flags, const std::string &log_path,
                const std::string &out_dir) {
    bellxt::TrialLog log = bellxt::ingest_trial_log(log_path);
    json inherited = json::object();
    if (log.header && log.header->contains("config")) {
        inherited = log.header->at("config");
    }
    json overlay = flags.values;
    overlay["scenario"] = bellxt::scenario_to_json(log.scenario);
    bellxt::RunConfig cfg = load_config(inherited, config_path, overlay);
    const json cfg_json = cfg.to_json();
    const std::string hash = bellxt::config_hash(cfg_json);

    auto tests = log.by_test();
    auto reports = bellxt::run_campaign(tests, cfg.scenario, cfg.protocol, cfg.threads);

    fs::create_directories(fs::path(out_dir) / "tests");
    json merged = json::array();
    for (const auto &r : reports) {
        json j = bellxt::report_to_json(r);
        j["config_hash"] = hash;
        j["seed"] = cfg.plan.seed;
        char name[64];
        std::snprintf(name, sizeof(name), "test_%06lld.json", static_cast<long long>(r.test_id));
        bellxt::write_file_atomic(fs::path(out_dir) / "tests" / name, j.dump(2) + "\n");
        merged.push_back(std::move(j));
    }
    json out{
        {"format_version", bellxt::kFormatVersion},
        {"config", cfg_json},
        {"config_hash", hash},
        {"seed", cfg.plan.seed},
        {"reports", merged},
    };
    bellxt::write_file_atomic(fs::path(out_dir) / "reports.json", out.dump(2) + "\n");
    return 0;
}

int cmd_report(const std::string &config_path, const Flags &flags, const std::string &reports_path,
               const std::string &out_dir) {
    json in;
    try {
        in = json::parse(bellxt::read_file(reports_path));
    } catch (const json::parse_error &e) {
        throw bellxt::InvalidArgument("reports file '" + reports_path + "': " + e.what());
    }
    if (!in.is_object() || !in.contains("reports")) {
        throw bellxt::InvalidArgument("reports file must hold an object with a 'reports' array");
    }
    bellxt::RunConfig cfg = load_config(in.value("config", json::object()), config_path, flags.values);
    std::vector<bellxt::PbrReport> reports;
    for (const auto &r : in.at("reports")) {
        reports.push_back(bellxt::report_from_json(r));
    }
    auto summary = bellxt::summarize(
        reports, cfg.alphas, cfg.bin_width, cfg.device, cfg.pair, bellxt::to_string(cfg.circuit));
    const json cfg_json = cfg.to_json();
    fs::create_directories(out_dir);
    std::ostringstream csv;
    bellxt::write_summary_csv(csv, summary, bellxt::config_hash(cfg_json), cfg.plan.seed);
    bellxt::write_file_atomic(fs::path(out_dir) / "summary.csv", csv.str());
    bellxt::write_file_atomic(
        fs::path(out_dir) / "histogram.json", bellxt::histogram_to_json(summary, cfg_json).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"bellxt: Bell tests for nonlocality and signaling on two-qubit devices"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override it")->check(CLI::ExistingFile);

    // simulate
    auto *sim = app.add_subcommand("simulate", "Sample a campaign and write a JSONL trial log");
    std::optional<std::string> circuit, drift;
    std::optional<int64_t> n, m;
    std::optional<uint64_t> seed;
    std::optional<double> gamma_ba, gamma_ab, depol;
    bool independent = false;
    std::string sim_out = "-";
    sim->add_option("--circuit", circuit, "cnl or cl");
    sim->add_option("--n", n, "trials per test");
    sim->add_option("--m", m, "number of tests");
    sim->add_option("--seed", seed, "master seed");
    sim->add_option("--gamma-ba", gamma_ba, "probability of flipping Alice when y=1");
    sim->add_option("--gamma-ab", gamma_ab, "probability of flipping Bob when x=1");
    sim->add_option("--depolarizing", depol, "depolarizing strength");
    sim->add_option("--drift", drift, "drift schedule, e.g. 0-600:gamma_ba=0.1;600-1800:gamma_ab=0.3");
    sim->add_flag("--independent-inputs", independent, "draw separate inputs for every test");
    sim->add_option("-o,--out", sim_out, "output file, - for stdout");

    // analyze
    auto *ana = app.add_subcommand("analyze", "Run the PBR protocol on every test of a log");
    std::string log_path, ana_out;
    std::optional<int64_t> n_est, max_iter;
    std::optional<double> alpha, tol;
    std::optional<std::string> hypotheses, regularize;
    std::optional<int64_t> threads;
    std::optional<uint64_t> ana_seed;
    bool resort = false;
    ana->add_option("--log", log_path, "JSONL trial log")->required()->check(CLI::ExistingFile);
    ana->add_option("-o,--out", ana_out, "output directory")->required();
    ana->add_option("--n-est", n_est, "trials used for estimation");
    ana->add_option("--alpha", alpha, "significance level");
    ana->add_option("--hypotheses", hypotheses, "comma-separated, e.g. ns,owns-ab,owns-ba,l,q1ab");
    ana->add_option("--regularize", regularize, "auto, on or off");
    ana->add_option("--tol", tol, "projection tolerance");
    ana->add_option("--max-iterations", max_iter, "projection iteration budget");
    ana->add_option("--threads", threads, "worker threads");
    ana->add_option("--seed", ana_seed, "seed recorded for provenance");
    ana->add_flag("--resort", resort, "sort records by trial_index instead of failing");

    // report
    auto *rep = app.add_subcommand("report", "Summarize per-test reports into a CSV table and histogram");
    std::string reports_path, rep_out;
    std::optional<std::string> alphas, device, pair, rep_circuit;
    std::optional<double> bin_width;
    std::optional<uint64_t> rep_seed;
    rep->add_option("--reports", reports_path, "reports.json written by analyze")
        ->required()
        ->check(CLI::ExistingFile);
    rep->add_option("-o,--out", rep_out, "output directory")->required();
    rep->add_option("--alphas", alphas, "comma-separated significance levels");
    rep->add_option("--bin-width", bin_width, "histogram bin width");
    rep->add_option("--device", device, "device label");
    rep->add_option("--pair", pair, "qubit pair label");
    rep->add_option("--circuit", rep_circuit, "circuit label (cnl or cl)");
    rep->add_option("--seed", rep_seed, "seed recorded for provenance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        emit_error("UsageError", e.what(), kExitValidation);
        return kExitValidation;
    }

    try {
        Flags flags;
        if (*sim) {
            flags.set("circuit", circuit);
            flags.set("n_trials", n);
            flags.set("n_tests", m);
            flags.set("seed", seed);
            flags.set("gamma_ba", gamma_ba);
            flags.set("gamma_ab", gamma_ab);
            flags.set("depolarizing", depol);
            flags.set("drift", drift);
            if (independent) {
                flags.values["independent_inputs"] = true;
            }
            return cmd_simulate(config_path, flags, sim_out);
        }
        if (*ana) {
            flags.set("n_est", n_est);
            flags.set("alpha", alpha);
            flags.set("hypotheses", hypotheses);
            flags.set("regularize", regularize);
            flags.set("tol", tol);
            flags.set("max_iterations", max_iter);
            flags.set("threads", threads);
            flags.set("seed", ana_seed);
            if (resort) {
                flags.values["resort"] = true;
            }
            return cmd_analyze(config_path, flags, log_path, ana_out);
        }
        if (alphas) {
            flags.values["alphas"] = parse_list(*alphas);
        }
        flags.set("bin_width", bin_width);
        flags.set("device", device);
        flags.set("pair", pair);
        flags.set("circuit", rep_circuit);
        flags.set("seed", rep_seed);
        return cmd_report(config_path, flags, reports_path, rep_out);
    } catch (const bellxt::LineError &e) {
        emit_error(e.kind(), e.what(), kExitValidation, e.line);
        return kExitValidation;
    } catch (const bellxt::ValidationError &e) {
        emit_error(e.kind(), e.what(), kExitValidation);
        return kExitValidation;
    } catch (const bellxt::SolverError &e) {
        emit_error(e.kind(), e.what(), kExitSolver);
        return kExitSolver;
    } catch (const std::exception &e) {
        emit_error("IOError", e.what(), 1);
        return 1;
    }
}
