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

#ifndef BELLXT_SIM_HPP
#define BELLXT_SIM_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bellxt/scenario.hpp"

namespace bellxt {

/// Two-qubit circuits. Qubit 1 is Alice's, qubit 2 is Bob's.
///  - CNL: H(1), CNOT(1->2), Z(1), Ry(pi/4)(2); maximal CHSH violation.
///  - CL:  T(1); a product state with no violation.
/// Before measuring in the computational basis, H is applied to qubit 1 iff
/// x = 1 and to qubit 2 iff y = 1.
enum class CircuitKind { CNL, CL };

std::string to_string(CircuitKind kind);
std::optional<CircuitKind> parse_circuit(const std::string &name);

/// Amplitudes over |q1 q2>, index 2 q1 + q2.
using StateVector = std::array<std::complex<double>, 4>;

/// The state right before the input-dependent Hadamards.
StateVector prepare_state(CircuitKind kind);

/// Exact Born-rule table of the circuit in the (2,2,2,2) scenario with the
/// given input distribution.
Correlation ideal_correlation(CircuitKind kind, const Scenario &scenario = Scenario());

struct NoiseParams {
    /// Probability that Alice's outcome is flipped when y = 1.
    double gamma_ba = 0.0;
    /// Probability that Bob's outcome is flipped when x = 1.
    double gamma_ab = 0.0;
    /// Weight of two-qubit depolarizing (mixing toward uniform outcomes).
    double depolarizing = 0.0;
    bool operator==(const NoiseParams &) const = default;
};

/// Overrides for trials in [begin, end); unset fields keep the base value.
struct DriftSegment {
    int64_t begin = 0;
    int64_t end = 0;
    std::optional<double> gamma_ba;
    std::optional<double> gamma_ab;
    std::optional<double> depolarizing;
};

struct NoiseModel {
    NoiseParams base;
    /// Empty, or segments that partition [0, n_trials) in order.
    std::vector<DriftSegment> drift;

    /// Throws InvalidArgument on probabilities outside [0,1] or segments that do
    /// not partition [0, n_trials).
    void validate(int64_t n_trials) const;
    NoiseParams at(int64_t trial_index) const;
};

/// Parses "0-600:gamma_ab=0.3,gamma_ba=0.1;600-1800:gamma_ba=0.3".
/// Keys: gamma_ba, gamma_ab, depolarizing. Throws InvalidArgument.
std::vector<DriftSegment> parse_drift(const std::string &schedule);

/// Depolarizing toward uniform outcomes with weight lambda, then Alice's flip
/// (when y = 1) and Bob's flip (when x = 1).
Correlation apply_noise(const Correlation &ideal, const NoiseParams &noise);

Correlation noisy_correlation(CircuitKind kind, const NoiseModel &noise, int64_t trial_index,
                              const Scenario &scenario = Scenario());

struct CampaignPlan {
    int64_t n_trials = 1800;
    int64_t n_tests = 100;
    uint64_t seed = 0;
    /// Draw a separate input sequence for each test instead of sharing one.
    bool independent_inputs = false;
};

/// Stable 64-bit mixing step (splitmix64 finalizer).
uint64_t splitmix64(uint64_t x);
/// Seed of stream `stream` derived from a master seed.
uint64_t derive_seed(uint64_t master, uint64_t stream);
/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64 &rng);

/// Input pairs (x, y) drawn from the scenario's input distribution.
std::vector<std::pair<int, int>> draw_inputs(const Scenario &scenario, int64_t n, uint64_t seed);

/// One (a, b) draw from the setting's row of `p`.
std::pair<int, int> sample_outcome(const Correlation &p, int x, int y, std::mt19937_64 &rng);

/// A test whose trial k is drawn from source(k) with input inputs[k].
std::vector<TrialRecord> sample_test(
    const std::function<Correlation(int64_t)> &source, std::span<const std::pair<int, int>> inputs, int64_t test_id,
    uint64_t seed);

/// Records for every (test i, trial k), ordered by test then trial. Task k uses
/// input (x_k, y_k) for all of its shots and shot i goes to test i. Test i draws
/// outcomes from stream derive_seed(seed, 2i + 1); shared inputs come from
/// stream 0 and independent inputs from stream 2i + 2.
std::vector<TrialRecord> sample_campaign(
    CircuitKind kind, const NoiseModel &noise, const CampaignPlan &plan, const Scenario &scenario = Scenario());

}  // namespace bellxt

#endif
