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

#include "bellxt/pbr.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "bellxt/errors.hpp"

namespace bellxt {

void ProtocolConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1)");
    }
    if (n_est < 1) {
        throw InvalidArgument("n_est must be positive");
    }
    if (hypotheses.empty()) {
        throw InvalidArgument("at least one hypothesis is required");
    }
    std::set<Hypothesis> seen(hypotheses.begin(), hypotheses.end());
    if (seen.size() != hypotheses.size()) {
        throw InvalidArgument("hypotheses must not repeat");
    }
    if (tol && !(*tol > 0.0)) {
        throw InvalidArgument("tol must be positive");
    }
    if (max_iterations < 1) {
        throw InvalidArgument("max_iterations must be positive");
    }
}

bool ProtocolConfig::regularizes(Hypothesis h) const {
    switch (regularize) {
        case Regularize::On:
            return true;
        case Regularize::Off:
            return false;
        case Regularize::Auto:
            break;
    }
    return h == Hypothesis::Q1 || h == Hypothesis::Q1AB;
}

TrialSplit split_trials(std::span<const TrialRecord> log, int64_t n_est, bool resort) {
    if (n_est <= 0 || n_est >= static_cast<int64_t>(log.size())) {
        throw TooFewTrials(
            "need 0 < n_est < number of trials (n_est=" + std::to_string(n_est) +
            ", trials=" + std::to_string(log.size()) + ")");
    }
    std::vector<TrialRecord> sorted(log.begin(), log.end());
    auto by_index = [](const TrialRecord &a, const TrialRecord &b) { return a.trial_index < b.trial_index; };
    if (resort) {
        std::stable_sort(sorted.begin(), sorted.end(), by_index);
    }
    for (size_t i = 1; i < sorted.size(); i++) {
        if (sorted[i].trial_index <= sorted[i - 1].trial_index) {
            throw OrderError(
                "trial indices must be strictly increasing (index " + std::to_string(sorted[i].trial_index) +
                " follows " + std::to_string(sorted[i - 1].trial_index) + ")");
        }
    }
    TrialSplit out;
    out.estimation.assign(sorted.begin(), sorted.begin() + n_est);
    out.testing.assign(sorted.begin() + n_est, sorted.end());
    return out;
}

PbrTable build_pbrs_from_numerator(
    const Correlation &numerator, const HypothesisSet &set, bool regularized, const KlOptions &options) {
    PbrTable t;
    t.hypothesis = set.id();
    t.regularized = regularized;
    t.validity_polytope = set.validity_polytope();
    try {
        t.projection = kl_project(numerator, set, options);
        const size_t nc = numerator.probs().size();
        t.ratios.resize(nc);
        for (size_t c = 0; c < nc; c++) {
            t.ratios[c] = numerator.at(c) / std::max(t.projection.minimizer.at(c), kRatioFloor);
        }
        const Scenario &sc = numerator.scenario();
        PolytopeSet validity = PolytopeSet::build(t.validity_polytope, sc);
        double bound = validity.maximize_bell_functional(t.ratios).value;
        t.epsilon = std::max(0.0, bound - 1.0);
        if (t.epsilon > 0.0) {
            for (double &r : t.ratios) {
                r /= 1.0 + t.epsilon;
            }
        }
        t.validity_bound = validity.maximize_bell_functional(t.ratios).value;
        t.ns_bound = t.validity_polytope == PolytopeKind::NS
                         ? t.validity_bound
                         : PolytopeSet::build(PolytopeKind::NS, sc).maximize_bell_functional(t.ratios).value;
    } catch (const SolverError &e) {
        throw SolverFailure(to_string(set.id()), e.what());
    }
    return t;
}

PbrTable build_pbrs(
    const Correlation &est_freqs, const HypothesisSet &set, bool regularize_to_ns, const KlOptions &options) {
    if (!regularize_to_ns) {
        return build_pbrs_from_numerator(est_freqs, set, false, options);
    }
    Correlation g;
    try {
        g = kl_project(est_freqs, HypothesisSet::build(Hypothesis::NS, est_freqs.scenario()), options).minimizer;
    } catch (const SolverError &e) {
        throw SolverFailure(to_string(set.id()), std::string("NS regularization: ") + e.what());
    }
    return build_pbrs_from_numerator(g, set, true, options);
}

double test_statistic(const PbrTable &pbrs, const CountsTable &test_counts) {
    const auto &counts = test_counts.counts();
    if (counts.size() != pbrs.ratios.size()) {
        throw InvalidArgument("test_statistic: counts and ratios have different shapes");
    }
    double log_t = 0.0;
    for (size_t c = 0; c < counts.size(); c++) {
        if (counts[c] == 0) {
            continue;
        }
        if (pbrs.ratios[c] <= 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        log_t += static_cast<double>(counts[c]) * std::log(pbrs.ratios[c]);
    }
    return log_t;
}

double p_value_bound(double log_t) {
    if (std::isnan(log_t)) {
        throw InvalidArgument("p_value_bound: log_t is NaN");
    }
    if (log_t <= 0.0) {
        return 1.0;
    }
    return std::min(std::exp(-log_t), 1.0);
}

const HypothesisOutcome *PbrReport::find(Hypothesis h) const {
    for (const auto &o : outcomes) {
        if (o.hypothesis == h) {
            return &o;
        }
    }
    return nullptr;
}

void apply_indirect_rejection(std::vector<HypothesisOutcome> &outcomes) {
    for (auto &o : outcomes) {
        o.indirect = false;
        for (const auto &s : outcomes) {
            if (s.rejected && is_subset(o.hypothesis, s.hypothesis)) {
                o.indirect = true;
            }
        }
    }
}

Protocol::Protocol(Scenario scenario, ProtocolConfig config)
    : scenario_(std::move(scenario)),
      config_(std::move(config)),
      ns_(HypothesisSet::build(Hypothesis::NS, scenario_)) {
    config_.validate();
    for (Hypothesis h : config_.hypotheses) {
        sets_.push_back(HypothesisSet::build(h, scenario_));
    }
}

PbrReport Protocol::run(std::span<const TrialRecord> log) const {
    if (log.empty()) {
        throw TooFewTrials("empty trial log");
    }
    for (const auto &r : log) {
        if (r.test_id != log.front().test_id) {
            throw InvalidArgument("run_protocol expects the records of a single test");
        }
    }
    TrialSplit split = split_trials(log, config_.n_est, config_.resort);
    CountsTable est_counts = CountsTable::from_trials(scenario_, split.estimation);
    CountsTable test_counts = CountsTable::from_trials(scenario_, split.testing);
    Correlation f = frequencies_from_counts(est_counts);

    KlOptions kopt;
    kopt.tol = config_.tol;
    kopt.max_iterations = config_.max_iterations;

    std::optional<Correlation> g;
    PbrReport report;
    report.test_id = log.front().test_id;
    report.n_trials = static_cast<int64_t>(log.size());
    report.n_est = config_.n_est;
    report.alpha = config_.alpha;
    for (const auto &set : sets_) {
        bool reg = config_.regularizes(set.id());
        HypothesisOutcome o;
        o.hypothesis = set.id();
        if (reg) {
            if (!g) {
                try {
                    g = kl_project(f, ns_, kopt).minimizer;
                } catch (const SolverError &e) {
                    throw SolverFailure(to_string(set.id()), std::string("NS regularization: ") + e.what());
                }
            }
            o.pbrs = build_pbrs_from_numerator(*g, set, true, kopt);
        } else {
            o.pbrs = build_pbrs_from_numerator(f, set, false, kopt);
        }
        o.log_t = test_statistic(o.pbrs, test_counts);
        o.p_upper = p_value_bound(o.log_t);
        o.rejected = o.p_upper < config_.alpha;
        report.outcomes.push_back(std::move(o));
    }
    apply_indirect_rejection(report.outcomes);
    return report;
}

PbrReport run_protocol(std::span<const TrialRecord> log, const Scenario &scenario, const ProtocolConfig &config) {
    return Protocol(scenario, config).run(log);
}

std::vector<PbrReport> run_campaign(
    const std::vector<std::vector<TrialRecord>> &tests, const Scenario &scenario, const ProtocolConfig &config,
    int threads) {
    Protocol protocol(scenario, config);
    std::vector<PbrReport> out(tests.size());
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&]() {
        for (size_t i = next++; i < tests.size(); i = next++) {
            try {
                out[i] = protocol.run(tests[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) {
                    error = std::current_exception();
                }
                return;
            }
        }
    };
    int n = std::max(1, std::min<int>(threads, static_cast<int>(tests.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < n; k++) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

}  // namespace bellxt
