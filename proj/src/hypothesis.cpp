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

#include "bellxt/hypothesis.hpp"

#include <algorithm>
#include <cctype>

namespace bellxt {

std::string to_string(Hypothesis h) {
    switch (h) {
        case Hypothesis::L:
            return "L";
        case Hypothesis::Q1AB:
            return "Q1AB";
        case Hypothesis::Q1:
            return "Q1";
        case Hypothesis::NS:
            return "NS";
        case Hypothesis::OWNS_AnotB:
            return "OWNS_AnotB";
        case Hypothesis::OWNS_BnotA:
            return "OWNS_BnotA";
    }
    return "?";
}

std::optional<Hypothesis> parse_hypothesis(const std::string &name) {
    std::string s = name;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    std::replace(s.begin(), s.end(), '_', '-');
    if (s == "l") {
        return Hypothesis::L;
    }
    if (s == "q1ab") {
        return Hypothesis::Q1AB;
    }
    if (s == "q1") {
        return Hypothesis::Q1;
    }
    if (s == "ns") {
        return Hypothesis::NS;
    }
    if (s == "owns-ab" || s == "owns-anotb") {
        return Hypothesis::OWNS_AnotB;
    }
    if (s == "owns-ba" || s == "owns-bnota") {
        return Hypothesis::OWNS_BnotA;
    }
    return std::nullopt;
}

const std::vector<Hypothesis> &all_hypotheses() {
    static const std::vector<Hypothesis> all = {
        Hypothesis::L, Hypothesis::Q1AB, Hypothesis::Q1, Hypothesis::NS, Hypothesis::OWNS_AnotB, Hypothesis::OWNS_BnotA};
    return all;
}

bool is_subset(Hypothesis sub, Hypothesis super) {
    if (sub == super) {
        return true;
    }
    bool sub_in_chain = sub != Hypothesis::OWNS_AnotB && sub != Hypothesis::OWNS_BnotA;
    if (super == Hypothesis::OWNS_AnotB || super == Hypothesis::OWNS_BnotA) {
        return sub_in_chain;
    }
    return sub_in_chain && static_cast<int>(sub) < static_cast<int>(super);
}

HypothesisSet HypothesisSet::build(Hypothesis h, const Scenario &scenario) {
    switch (h) {
        case Hypothesis::L:
            return {h, PolytopeSet::build(PolytopeKind::L, scenario)};
        case Hypothesis::Q1AB:
            return {h, MomentSet::build(MomentLevel::OnePlusAB, scenario)};
        case Hypothesis::Q1:
            return {h, MomentSet::build(MomentLevel::One, scenario)};
        case Hypothesis::NS:
            return {h, PolytopeSet::build(PolytopeKind::NS, scenario)};
        case Hypothesis::OWNS_AnotB:
            return {h, PolytopeSet::build(PolytopeKind::OWNS_AnotB, scenario)};
        case Hypothesis::OWNS_BnotA:
            return {h, PolytopeSet::build(PolytopeKind::OWNS_BnotA, scenario)};
    }
    return {h, PolytopeSet::build(PolytopeKind::NS, scenario)};
}

const Scenario &HypothesisSet::scenario() const {
    return is_polytope() ? polytope().scenario() : moment_set().scenario();
}

bool HypothesisSet::contains(const Correlation &p, double tol) const {
    if (is_polytope()) {
        return polytope().contains(p, tol);
    }
    return project_to_moment_set(p, moment_set(), tol).member;
}

PolytopeKind HypothesisSet::validity_polytope() const {
    return is_polytope() ? polytope().kind() : PolytopeKind::NS;
}

}  // namespace bellxt
