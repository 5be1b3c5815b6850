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

#ifndef BELLXT_HYPOTHESIS_HPP
#define BELLXT_HYPOTHESIS_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bellxt/moment.hpp"
#include "bellxt/polytope.hpp"

namespace bellxt {

/// Null hypotheses, from smallest to largest set:
/// L < Q1AB < Q1 < NS < OWNS_AnotB, OWNS_BnotA.
enum class Hypothesis { L, Q1AB, Q1, NS, OWNS_AnotB, OWNS_BnotA };

/// Stable short names: "L", "Q1AB", "Q1", "NS", "OWNS_AnotB", "OWNS_BnotA".
std::string to_string(Hypothesis h);
/// Accepts the short names case-insensitively and the CLI spellings
/// l, q1, q1ab, ns, owns-ab, owns-ba.
std::optional<Hypothesis> parse_hypothesis(const std::string &name);

/// Every hypothesis in chain order.
const std::vector<Hypothesis> &all_hypotheses();

/// True if the set of `sub` is contained in the set of `super`.
bool is_subset(Hypothesis sub, Hypothesis super);

class HypothesisSet {
   public:
    static HypothesisSet build(Hypothesis h, const Scenario &scenario);

    Hypothesis id() const {
        return id_;
    }
    const Scenario &scenario() const;
    bool is_polytope() const {
        return std::holds_alternative<PolytopeSet>(set_);
    }
    const PolytopeSet &polytope() const {
        return std::get<PolytopeSet>(set_);
    }
    const MomentSet &moment_set() const {
        return std::get<MomentSet>(set_);
    }

    bool contains(const Correlation &p, double tol) const;

    /// Smallest polytope known to contain the set: itself for polytopes, NS for
    /// the moment sets. Bell-like inequalities are certified over this polytope.
    PolytopeKind validity_polytope() const;

   private:
    HypothesisSet(Hypothesis id, std::variant<PolytopeSet, MomentSet> set) : id_(id), set_(std::move(set)) {}

    Hypothesis id_;
    std::variant<PolytopeSet, MomentSet> set_;
};

}  // namespace bellxt

#endif
