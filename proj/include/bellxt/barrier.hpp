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

#ifndef BELLXT_BARRIER_HPP
#define BELLXT_BARRIER_HPP

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <vector>

namespace bellxt {

/// Convex objective: returns f(z) and, when the pointers are non-null, fills
/// its gradient and Hessian.
using ObjectiveFn = std::function<double(const Eigen::VectorXd &z, Eigen::VectorXd *grad, Eigen::MatrixXd *hess)>;

/// minimize objective(z) subject to
///   lmi[0] + sum_i z_i lmi[i+1]  positive definite   (skipped if lmi is empty)
///   lin_b + lin_a z               componentwise > 0   (skipped if lin_a has no rows)
struct BarrierProblem {
    Eigen::Index num_vars = 0;
    std::vector<Eigen::MatrixXd> lmi;
    Eigen::MatrixXd lin_a;
    Eigen::VectorXd lin_b;
    ObjectiveFn objective;

    /// Self-concordance parameter of the log barrier: matrix size plus number of
    /// linear constraints. At a centered point with weight t the objective is
    /// within barrier_parameter() / t of the optimum.
    double barrier_parameter() const;
    bool strictly_feasible(const Eigen::VectorXd &z) const;
};

struct BarrierOptions {
    /// Stop once barrier_parameter / t <= tol.
    double tol = 1e-7;
    /// Budget of Newton steps over all centering rounds.
    long max_newton_steps = 200000;
    double t0 = 1.0;
    double growth = 8.0;
    /// Centering stops when the squared Newton decrement drops below this.
    double centering_tol = 1e-12;
    /// Called after every Newton step; returning true ends the solve early.
    std::function<bool(const Eigen::VectorXd &z, double t)> stop;
};

struct BarrierResult {
    Eigen::VectorXd z;
    double objective = 0.0;
    /// barrier_parameter / t at the last completed centering (infinite if none).
    double gap = std::numeric_limits<double>::infinity();
    long newton_steps = 0;
    bool converged = false;
    bool stopped_early = false;
};

/// Log-barrier path following with damped (backtracking) Newton centering.
/// Throws InvalidArgument if z0 is not strictly feasible. Running out of Newton
/// steps is reported through `converged == false`, not thrown.
BarrierResult barrier_minimize(const BarrierProblem &problem, Eigen::VectorXd z0, const BarrierOptions &options = {});

}  // namespace bellxt

#endif
