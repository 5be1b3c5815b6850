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

#ifndef BELLXT_MOMENT_HPP
#define BELLXT_MOMENT_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bellxt/scenario.hpp"

namespace bellxt {

/// Moment-matrix outer approximations of the quantum set in the (2,2,2,2)
/// scenario. Each binary measurement is represented by the projector onto
/// outcome 0: A_x for Alice, B_y for Bob.
///  - One:       basis {1, A0, A1, B0, B1}                       (5 x 5)
///  - OnePlusAB: basis above plus {A0B0, A0B1, A1B0, A1B1}       (9 x 9)
enum class MomentLevel { One, OnePlusAB };

std::string to_string(MomentLevel level);

/// A product of projectors: Alice's letters (measurement labels x) followed by
/// Bob's (y). The two parties commute, so every operator word splits this way.
struct MomentWord {
    std::vector<int> alice;
    std::vector<int> bob;
    auto operator<=>(const MomentWord &) const = default;
    std::string str() const;
};

/// Set of correlations admitting a real symmetric moment matrix Gamma >= 0 at
/// the given level whose entries reproduce them, intersected with P >= 0.
/// Contains Q and is contained in NS.
///
/// Moments are indexed by "labels": the distinct canonical operator words that
/// occur as entries <w_i^dag w_j>. Label 0 is always the identity. Words are
/// reduced by projector idempotence (A_x A_x = A_x) and identified with their
/// adjoint, which makes the relaxation real.
class MomentSet {
   public:
    /// Throws UnsupportedScenario unless the scenario is (2,2,2,2).
    static MomentSet build(MomentLevel level, const Scenario &scenario);

    MomentLevel level() const {
        return level_;
    }
    const Scenario &scenario() const {
        return scenario_;
    }
    const std::vector<MomentWord> &basis() const {
        return basis_;
    }
    Eigen::Index dim() const {
        return static_cast<Eigen::Index>(basis_.size());
    }
    const std::vector<MomentWord> &labels() const {
        return labels_;
    }
    size_t num_labels() const {
        return labels_.size();
    }
    /// Label of entry (i, j) of the moment matrix.
    int entry_label(Eigen::Index i, Eigen::Index j) const {
        return entry_label_[static_cast<size_t>(i * dim() + j)];
    }
    int alice_label(int x) const {
        return alice_label_[static_cast<size_t>(x)];
    }
    int bob_label(int y) const {
        return bob_label_[static_cast<size_t>(y)];
    }
    int joint_label(int x, int y) const {
        return joint_label_[static_cast<size_t>(2 * x + y)];
    }
    /// True for labels fixed by the probabilities (identity, A_x, B_y, A_xB_y).
    bool is_linked(int label) const {
        return linked_[static_cast<size_t>(label)];
    }

    /// Gamma with entry (i, j) = moments[entry_label(i, j)].
    Eigen::MatrixXd matrix(std::span<const double> moments) const;
    /// Indicator matrix of the entries carrying `label`.
    Eigen::MatrixXd label_indicator(int label) const;

    /// P(0,0|x,y) = <A_xB_y>, P(0,1|x,y) = <A_x> - <A_xB_y>,
    /// P(1,0|x,y) = <B_y> - <A_xB_y>, P(1,1|x,y) = 1 - <A_x> - <B_y> + <A_xB_y>,
    /// written as probs = linkage() * moments. Rows sum to <1> per setting.
    const Eigen::MatrixXd &linkage() const {
        return linkage_;
    }
    /// linkage() * moments, without validation.
    std::vector<double> probabilities(std::span<const double> moments) const;

    /// Moments of four independent fair classical bits: (1/2)^(number of
    /// distinct letters). Their matrix is positive definite and their
    /// probabilities are the uniform correlation.
    const std::vector<double> &interior_moments() const {
        return interior_;
    }

    /// Least-squares fit of the linked moments to P (exact when P is
    /// no-signaling); free moments are taken from interior_moments().
    std::vector<double> fit_moments(const Correlation &p) const;

   private:
    MomentSet(MomentLevel level, Scenario scenario) : level_(level), scenario_(std::move(scenario)) {}

    MomentLevel level_;
    Scenario scenario_;
    std::vector<MomentWord> basis_;
    std::vector<MomentWord> labels_;
    std::vector<int> entry_label_;
    std::vector<int> alice_label_;
    std::vector<int> bob_label_;
    std::vector<int> joint_label_;
    std::vector<bool> linked_;
    Eigen::MatrixXd linkage_;
    std::vector<double> interior_;
};

struct MomentProjection {
    bool member = false;
    /// Euclidean distance in probability space from P to a point certified to be
    /// in the set (so an upper bound on the true distance; 0 up to round-off
    /// when P itself is certified).
    double distance = 0.0;
    /// The certified point.
    std::vector<double> nearest;
    /// Smallest eigenvalue of the best completion found for the no-signaling
    /// part of P.
    double min_eigenvalue = 0.0;
    long iterations = 0;
    bool certified_by_alternating_projections = false;
};

struct MomentProjectionOptions {
    /// Dykstra rounds tried before falling back to the barrier solve.
    long alternating_iterations = 300;
    long max_newton_steps = 20000;
};

/// Membership of P in the set. Alternating projections with Dykstra corrections
/// between the affine moment constraints (fixed by P) and the PSD cone are tried
/// first; if they do not certify a PSD completion, a barrier solve maximizes
/// the smallest eigenvalue over completions. A certified point is then formed
/// by mixing the no-signaling part of P toward the uniform correlation just
/// enough to restore positivity. Throws IterationLimit if the barrier solve
/// runs out of budget.
MomentProjection project_to_moment_set(
    const Correlation &p, const MomentSet &set, double tol, const MomentProjectionOptions &options = {});

/// Dykstra alternating projections onto {Gamma : entries with a common label are
/// equal, entries of labels with a value in `fixed` equal it} intersected with the
/// PSD cone (eigenvalues clipped at 0). `fixed` is indexed by label.
/// Returns the final affine iterate.
Eigen::MatrixXd dykstra_project(
    const MomentSet &set, const Eigen::MatrixXd &start, std::span<const std::optional<double>> fixed, long iterations);

/// Orthogonal projection onto the PSD cone.
Eigen::MatrixXd psd_project(const Eigen::MatrixXd &m);

/// Certified upper bound on sum coeffs P(x,y) P over the set: the exact LP
/// maximum over NS, which contains it.
double max_functional_bound(std::span<const double> coeffs, const MomentSet &set);

}  // namespace bellxt

#endif
