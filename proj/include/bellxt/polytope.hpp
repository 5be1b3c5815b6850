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

#ifndef BELLXT_POLYTOPE_HPP
#define BELLXT_POLYTOPE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bellxt/scenario.hpp"
#include "bellxt/simplex.hpp"

namespace bellxt {

/// The polytopal hypothesis sets.
///  - NS: no-signaling in both directions.
///  - OWNS_AnotB: Alice cannot signal to Bob (Bob's marginals independent of x).
///  - OWNS_BnotA: Bob cannot signal to Alice (Alice's marginals independent of y).
///  - L: Bell-local correlations, the convex hull of deterministic strategies.
enum class PolytopeKind { NS, OWNS_AnotB, OWNS_BnotA, L };

std::string to_string(PolytopeKind kind);

struct LinearConstraint {
    enum class Type { Equal, GreaterEqual };
    std::vector<double> coeffs;
    double rhs = 0.0;
    Type type = Type::Equal;

    /// Amount by which `p` violates the constraint (0 when satisfied).
    double violation(std::span<const double> p) const;
};

struct LinearMaximum {
    double value = 0.0;
    Correlation argument;
    /// Index into v_rep() of the optimal vertex, for L.
    std::optional<size_t> vertex;
};

class PolytopeSet {
   public:
    static PolytopeSet build(PolytopeKind kind, const Scenario &scenario);

    PolytopeKind kind() const {
        return kind_;
    }
    const Scenario &scenario() const {
        return scenario_;
    }
    /// Nonnegativity, per-setting normalization and the kind's defining
    /// equalities. For L this is the NS description plus, in the (2,2,2,2)
    /// scenario, the eight CHSH facets (which makes it complete there).
    const std::vector<LinearConstraint> &h_rep() const {
        return h_rep_;
    }
    /// Deterministic strategies; only populated for L.
    const std::vector<Correlation> &v_rep() const {
        return v_rep_;
    }

    /// Largest violation of any H-representation constraint.
    double h_rep_violation(const Correlation &p) const;

    /// For NS/OWNS: every H-constraint holds within tol. For L: the L1 distance
    /// from p to the convex hull of v_rep(), decided by LP, is at most tol.
    bool contains(const Correlation &p, double tol) const;

    /// L1 distance from p to conv(v_rep()). L only.
    double hull_distance(const Correlation &p) const;

    /// Exact LP maximum of sum_c objective[c] * P[c] over the set. Ties among
    /// optimal L vertices go to the lowest vertex index.
    LinearMaximum maximize(std::span<const double> objective) const;

    /// maximize() of the Bell functional sum R P(x,y) P, i.e. with the scenario's
    /// input distribution folded into the objective.
    LinearMaximum maximize_bell_functional(std::span<const double> coeffs) const;

   private:
    PolytopeSet(PolytopeKind kind, Scenario scenario);

    PolytopeKind kind_;
    Scenario scenario_;
    std::vector<LinearConstraint> h_rep_;
    std::vector<Correlation> v_rep_;
};

/// Every deterministic strategy of the scenario, ordered with Alice's outputs
/// most significant (a_0 first) and then Bob's.
std::vector<Correlation> deterministic_vertices(const Scenario &scenario);

}  // namespace bellxt

#endif
