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

#ifndef BELLXT_KL_HPP
#define BELLXT_KL_HPP

#include <limits>
#include <optional>

#include "bellxt/hypothesis.hpp"
#include "bellxt/scenario.hpp"

namespace bellxt {

/// Returned by kl_divergence when P vanishes somewhere f does not.
inline constexpr double kInfiniteDivergence = std::numeric_limits<double>::infinity();

inline constexpr double kPolytopeKlTol = 1e-8;
inline constexpr double kMomentKlTol = 1e-7;
inline constexpr long kKlIterationBudget = 200000;

/// sum_{a,b,x,y} P(x,y) f log(f / P) in nats, with P(x,y) from f's scenario.
/// Cells with f = 0 contribute 0.
double kl_divergence(const Correlation &f, const Correlation &p);

struct KlOptions {
    /// Stopping tolerance on the duality gap; defaults to kPolytopeKlTol or
    /// kMomentKlTol depending on the set.
    std::optional<double> tol;
    /// Frank-Wolfe iterations (polytopes) or Newton steps (moment sets).
    long max_iterations = kKlIterationBudget;
    /// Polytopes only: start from (uniform + deterministic vertex k) / 2
    /// instead of the uniform correlation.
    std::optional<size_t> start_vertex;
};

struct KlResult {
    Correlation minimizer;
    double divergence = 0.0;
    /// Certified bound on divergence minus the optimum.
    double duality_gap = 0.0;
    long iterations = 0;
    /// False when the budget ran out before the gap reached the tolerance.
    bool certified = false;
};

/// The KL projection argmin_{P in set} D(f || P).
///
/// Polytopes: pairwise Frank-Wolfe over an active set of vertices, starting
/// from the deterministic strategies with equal weights, using the exact LP
/// oracle for the linear subproblem and an exact line search. The reported gap
/// is the Frank-Wolfe gap.
///
/// Moment sets: log-barrier path following over the moments, with Gamma >= 0
/// and P >= 0 as barrier terms. The reported gap is barrier_parameter / t.
///
/// Running out of budget does not throw; the best iterate is returned with
/// certified = false.
KlResult kl_project(const Correlation &f, const HypothesisSet &set, const KlOptions &options = {});

}  // namespace bellxt

#endif
