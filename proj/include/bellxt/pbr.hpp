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

#ifndef BELLXT_PBR_HPP
#define BELLXT_PBR_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bellxt/hypothesis.hpp"
#include "bellxt/kl.hpp"
#include "bellxt/scenario.hpp"

namespace bellxt {

/// Denominators of the ratios are floored here before division.
inline constexpr double kRatioFloor = 1e-12;

enum class Regularize { Auto, On, Off };

struct ProtocolConfig {
    int64_t n_est = 600;
    double alpha = 0.05;
    /// Auto regularizes to NS for Q1 and Q1AB only.
    Regularize regularize = Regularize::Auto;
    std::vector<Hypothesis> hypotheses = {
        Hypothesis::L, Hypothesis::Q1AB, Hypothesis::NS, Hypothesis::OWNS_AnotB, Hypothesis::OWNS_BnotA};
    /// Solver tolerance; unset means the kl-engine defaults.
    std::optional<double> tol;
    long max_iterations = kKlIterationBudget;
    /// Sort records by trial_index instead of rejecting unordered logs.
    bool resort = false;

    /// Throws InvalidArgument on alpha outside (0,1), n_est < 1, an empty or
    /// repeated hypothesis list, or a non-positive tol.
    void validate() const;
    bool regularizes(Hypothesis h) const;
};

struct TrialSplit {
    std::vector<TrialRecord> estimation;
    std::vector<TrialRecord> testing;
};

/// First n_est records (in trial_index order) for estimation, the rest for
/// testing. Throws TooFewTrials unless 0 < n_est < log.size(), and OrderError
/// if trial indices are not strictly increasing (sorted instead when `resort`,
/// which still rejects repeated indices).
TrialSplit split_trials(std::span<const TrialRecord> log, int64_t n_est, bool resort = false);

/// Prediction-based ratios for one hypothesis.
struct PbrTable {
    Hypothesis hypothesis = Hypothesis::NS;
    std::vector<double> ratios;
    /// Renormalization excess: the ratios were divided by 1 + epsilon.
    double epsilon = 0.0;
    /// Polytope over which sum R P(x,y) P <= 1 is certified.
    PolytopeKind validity_polytope = PolytopeKind::NS;
    /// LP maximum of sum R P(x,y) P over validity_polytope, after renormalization.
    double validity_bound = 0.0;
    /// LP maximum of the same functional over NS, after renormalization.
    double ns_bound = 0.0;
    bool regularized = false;
    /// KL projection of the numerator onto the hypothesis set.
    KlResult projection;
};

/// Ratios numerator / max(P*, 1e-12) with P* the KL projection of the
/// numerator onto `set`; the numerator is `est_freqs`, or its KL projection onto
/// NS when `regularize_to_ns`. Solver errors are rethrown as SolverFailure
/// naming the hypothesis.
PbrTable build_pbrs(
    const Correlation &est_freqs, const HypothesisSet &set, bool regularize_to_ns, const KlOptions &options = {});

/// As build_pbrs, with the numerator (already regularized or not) supplied.
PbrTable build_pbrs_from_numerator(
    const Correlation &numerator, const HypothesisSet &set, bool regularized, const KlOptions &options = {});

/// sum N log R over the testing counts; -infinity if a cell with R = 0 occurred.
double test_statistic(const PbrTable &pbrs, const CountsTable &test_counts);

/// min(exp(-log_t), 1).
double p_value_bound(double log_t);

struct HypothesisOutcome {
    Hypothesis hypothesis = Hypothesis::NS;
    double log_t = 0.0;
    double p_upper = 1.0;
    bool rejected = false;
    /// Rejected directly or through a rejected superset.
    bool indirect = false;
    PbrTable pbrs;
};

struct PbrReport {
    int64_t test_id = 0;
    int64_t n_trials = 0;
    int64_t n_est = 0;
    double alpha = 0.05;
    std::vector<HypothesisOutcome> outcomes;

    const HypothesisOutcome *find(Hypothesis h) const;
};

/// Combination rule: indirect[H] is true iff some run hypothesis S with H a
/// subset of S was rejected. Fills `indirect` in place.
void apply_indirect_rejection(std::vector<HypothesisOutcome> &outcomes);

/// Runs the protocol for one Bell test. Holds the hypothesis sets so they are
/// built once per campaign; run() is const and safe to call concurrently.
class Protocol {
   public:
    Protocol(Scenario scenario, ProtocolConfig config);

    const ProtocolConfig &config() const {
        return config_;
    }
    const Scenario &scenario() const {
        return scenario_;
    }

    /// `log` holds the records of a single test. Throws TooFewTrials,
    /// OrderError, EmptySetting (estimation half missing a setting),
    /// InvalidArgument (mixed test ids or labels out of range) or SolverFailure.
    PbrReport run(std::span<const TrialRecord> log) const;

   private:
    Scenario scenario_;
    ProtocolConfig config_;
    std::vector<HypothesisSet> sets_;
    HypothesisSet ns_;
};

PbrReport run_protocol(std::span<const TrialRecord> log, const Scenario &scenario, const ProtocolConfig &config);

/// Runs every test on `threads` workers; the result order matches `tests`.
std::vector<PbrReport> run_campaign(
    const std::vector<std::vector<TrialRecord>> &tests, const Scenario &scenario, const ProtocolConfig &config,
    int threads = 1);

}  // namespace bellxt

#endif
