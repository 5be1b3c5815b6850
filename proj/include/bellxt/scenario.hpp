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

#ifndef BELLXT_SCENARIO_HPP
#define BELLXT_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bellxt {

/// Absolute tolerance on per-setting normalization of a Correlation.
inline constexpr double kNormalizationTol = 1e-12;
/// Rows off by at most this much are renormalized on ingestion instead of rejected.
inline constexpr double kRenormalizeTol = 1e-9;

/// A bipartite Bell scenario: input/output cardinalities for Alice (x, a) and
/// Bob (y, b), plus the distribution P(x,y) the inputs are drawn from.
///
/// Tables over the scenario are dense arrays indexed by `index(a, b, x, y)`;
/// the four cells of one setting (x, y) are contiguous.
class Scenario {
   public:
    /// The CHSH scenario (2,2,2,2) with uniform inputs.
    Scenario();
    /// Throws InvalidArgument unless every cardinality is >= 2 and `input_dist`
    /// (row-major over (x, y); empty means uniform) is a distribution within 1e-12.
    Scenario(int n_x, int n_y, int n_a, int n_b, std::vector<double> input_dist = {});

    int n_x() const {
        return n_x_;
    }
    int n_y() const {
        return n_y_;
    }
    int n_a() const {
        return n_a_;
    }
    int n_b() const {
        return n_b_;
    }
    size_t num_settings() const {
        return static_cast<size_t>(n_x_ * n_y_);
    }
    size_t cells_per_setting() const {
        return static_cast<size_t>(n_a_ * n_b_);
    }
    size_t num_cells() const {
        return num_settings() * cells_per_setting();
    }
    size_t setting_index(int x, int y) const {
        return static_cast<size_t>(x * n_y_ + y);
    }
    size_t index(int a, int b, int x, int y) const {
        return (setting_index(x, y) * n_a_ + a) * n_b_ + b;
    }
    double input_prob(int x, int y) const {
        return input_dist_[setting_index(x, y)];
    }
    const std::vector<double> &input_dist() const {
        return input_dist_;
    }
    /// Per-cell weight P(x,y) of the setting the cell belongs to.
    std::vector<double> cell_weights() const;

    bool is_chsh() const {
        return n_x_ == 2 && n_y_ == 2 && n_a_ == 2 && n_b_ == 2;
    }
    bool same_shape(const Scenario &other) const {
        return n_x_ == other.n_x_ && n_y_ == other.n_y_ && n_a_ == other.n_a_ && n_b_ == other.n_b_;
    }
    bool operator==(const Scenario &other) const = default;

   private:
    int n_x_;
    int n_y_;
    int n_a_;
    int n_b_;
    std::vector<double> input_dist_;
};

/// A table {P(a,b|x,y)} of conditional probabilities. Also used for relative
/// frequencies and regularized estimates. Immutable after construction.
class Correlation {
   public:
    /// The uniform table of the default scenario.
    Correlation();
    /// Throws InvalidArgument if any entry is negative or a setting's row does
    /// not sum to 1 within kNormalizationTol.
    Correlation(Scenario scenario, std::vector<double> probs);

    /// Like the checked constructor, but rows off by at most kRenormalizeTol
    /// (and entries down to -kRenormalizeTol) are clipped and rescaled.
    static Correlation renormalized(Scenario scenario, std::vector<double> probs);

    static Correlation uniform(const Scenario &scenario);

    const Scenario &scenario() const {
        return scenario_;
    }
    std::span<const double> probs() const {
        return probs_;
    }
    const std::vector<double> &values() const {
        return probs_;
    }
    double operator()(int a, int b, int x, int y) const {
        return probs_[scenario_.index(a, b, x, y)];
    }
    double at(size_t cell) const {
        return probs_[cell];
    }

   private:
    struct Unchecked {};
    Correlation(Unchecked, Scenario scenario, std::vector<double> probs);

    Scenario scenario_;
    std::vector<double> probs_;
};

/// One (a, b, x, y) event of a Bell test.
struct TrialRecord {
    int64_t test_id = 0;
    int64_t trial_index = 0;
    int x = 0;
    int y = 0;
    int a = 0;
    int b = 0;
    bool operator==(const TrialRecord &) const = default;
};

/// Occurrence counts N_{a,b,x,y} and per-setting totals N_{x,y}.
class CountsTable {
   public:
    explicit CountsTable(const Scenario &scenario);
    /// Throws InvalidArgument if a record's labels are outside the scenario.
    static CountsTable from_trials(const Scenario &scenario, std::span<const TrialRecord> trials);

    void add(int a, int b, int x, int y, int64_t times = 1);

    const Scenario &scenario() const {
        return scenario_;
    }
    int64_t count(int a, int b, int x, int y) const {
        return counts_[scenario_.index(a, b, x, y)];
    }
    int64_t count_at(size_t cell) const {
        return counts_[cell];
    }
    int64_t per_setting(int x, int y) const {
        return per_setting_[scenario_.setting_index(x, y)];
    }
    int64_t total() const {
        return total_;
    }
    const std::vector<int64_t> &counts() const {
        return counts_;
    }

   private:
    Scenario scenario_;
    std::vector<int64_t> counts_;
    std::vector<int64_t> per_setting_;
    int64_t total_ = 0;
};

/// f(a,b|x,y) = N_{a,b,x,y} / N_{x,y}. Throws EmptySetting if some N_{x,y} is 0.
Correlation frequencies_from_counts(const CountsTable &counts);

/// Alice's marginal sum_b P(a,b|x,y).
double marginal_a(const Correlation &p, int a, int x, int y);
/// Bob's marginal sum_a P(a,b|x,y).
double marginal_b(const Correlation &p, int b, int x, int y);

struct SignalingDeficit {
    /// max |P(a|x,y) - P(a|x,y')|: how much Bob's input moves Alice's marginals.
    double b_to_a = 0.0;
    /// max |P(b|x,y) - P(b|x',y)|: how much Alice's input moves Bob's marginals.
    double a_to_b = 0.0;
};

SignalingDeficit signaling_deficit(const Correlation &p);

/// sum_{a,b,x,y} coeffs[a,b,x,y] P(x,y) P(a,b|x,y), with P(x,y) from the
/// correlation's scenario.
double bell_functional(const Correlation &p, std::span<const double> coeffs);

/// Coefficients R with bell_functional(P, R) = E00 + E01 + E10 - E11, the CHSH
/// correlator expression. Requires a (2,2,2,2) scenario.
std::vector<double> chsh_coefficients(const Scenario &scenario);

/// The PR box P(a,b|x,y) = 1/2 if a xor b == x*y. Requires a (2,2,2,2) scenario.
Correlation pr_box(const Scenario &scenario);

/// The deterministic local strategy a = alice[x], b = bob[y].
Correlation deterministic_strategy(const Scenario &scenario, std::span<const int> alice, std::span<const int> bob);

}  // namespace bellxt

#endif
