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

#ifndef BELLXT_TESTS_KL_ORACLE_HPP
#define BELLXT_TESTS_KL_ORACLE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bellxt/barrier.hpp"
#include "bellxt/kl.hpp"
#include "bellxt/polytope.hpp"

namespace bellxt::testutil {

/// KL projection onto a polytope computed from its H-representation alone:
/// the equalities are eliminated through a null-space basis and the
/// inequalities become log-barrier terms. Independent of the vertex-based
/// Frank-Wolfe path. For L this relies on the H-representation being complete
/// (true at (2,2,2,2) with the CHSH facets).
inline double polytope_kl_oracle(const Correlation &f, const PolytopeSet &set, double tol = 1e-12) {
    const Scenario &sc = f.scenario();
    const Eigen::Index nc = static_cast<Eigen::Index>(sc.num_cells());
    std::vector<const LinearConstraint *> eq, ineq;
    for (const auto &lc : set.h_rep()) {
        (lc.type == LinearConstraint::Type::Equal ? eq : ineq).push_back(&lc);
    }
    Eigen::MatrixXd e(static_cast<Eigen::Index>(eq.size()), nc);
    for (size_t i = 0; i < eq.size(); i++) {
        for (Eigen::Index c = 0; c < nc; c++) {
            e(static_cast<Eigen::Index>(i), c) = eq[i]->coeffs[static_cast<size_t>(c)];
        }
    }
    Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(e).kernel();
    Eigen::VectorXd q0 = Eigen::VectorXd::Constant(nc, 1.0 / static_cast<double>(sc.cells_per_setting()));
    Eigen::MatrixXd g(static_cast<Eigen::Index>(ineq.size()), nc);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(ineq.size()));
    for (size_t i = 0; i < ineq.size(); i++) {
        for (Eigen::Index c = 0; c < nc; c++) {
            g(static_cast<Eigen::Index>(i), c) = ineq[i]->coeffs[static_cast<size_t>(c)];
        }
        rhs[static_cast<Eigen::Index>(i)] = ineq[i]->rhs;
    }
    std::vector<double> w = sc.cell_weights();
    Eigen::VectorXd wf(nc);
    for (Eigen::Index c = 0; c < nc; c++) {
        wf[c] = w[static_cast<size_t>(c)] * f.at(static_cast<size_t>(c));
    }
    BarrierProblem pr;
    pr.num_vars = kernel.cols();
    pr.lin_a = g * kernel;
    pr.lin_b = g * q0 - rhs;
    pr.objective = [&](const Eigen::VectorXd &z, Eigen::VectorXd *grad, Eigen::MatrixXd *hess) {
        Eigen::VectorXd q = q0 + kernel * z;
        double v = 0.0;
        Eigen::VectorXd dq = Eigen::VectorXd::Zero(nc), hq = Eigen::VectorXd::Zero(nc);
        for (Eigen::Index c = 0; c < nc; c++) {
            if (wf[c] > 0.0) {
                if (!(q[c] > 0.0)) {
                    return std::numeric_limits<double>::infinity();
                }
                v += wf[c] * std::log(f.at(static_cast<size_t>(c)) / q[c]);
                dq[c] = -wf[c] / q[c];
                hq[c] = wf[c] / (q[c] * q[c]);
            }
        }
        if (grad) {
            *grad = kernel.transpose() * dq;
        }
        if (hess) {
            *hess = kernel.transpose() * hq.asDiagonal() * kernel;
        }
        return v;
    };
    BarrierOptions bo;
    bo.tol = tol;
    BarrierResult r = barrier_minimize(pr, Eigen::VectorXd::Zero(kernel.cols()), bo);
    return r.objective;
}

/// Expectation-maximization over mixture weights of the given vertices
/// (multiplicative updates that never leave the simplex).
inline double vertex_em_kl(const Correlation &f, const std::vector<Correlation> &vertices, long iterations) {
    const size_t nv = vertices.size();
    const size_t nc = f.probs().size();
    std::vector<double> w = f.scenario().cell_weights();
    std::vector<double> pi(nv, 1.0 / static_cast<double>(nv));
    std::vector<double> q(nc);
    auto mix = [&]() {
        std::fill(q.begin(), q.end(), 0.0);
        for (size_t j = 0; j < nv; j++) {
            for (size_t c = 0; c < nc; c++) {
                q[c] += pi[j] * vertices[j].at(c);
            }
        }
    };
    for (long it = 0; it < iterations; it++) {
        mix();
        double total = 0.0;
        for (size_t j = 0; j < nv; j++) {
            double s = 0.0;
            for (size_t c = 0; c < nc; c++) {
                if (f.at(c) > 0.0) {
                    s += w[c] * f.at(c) * vertices[j].at(c) / q[c];
                }
            }
            pi[j] *= s;
            total += pi[j];
        }
        for (auto &p : pi) {
            p /= total;
        }
    }
    mix();
    double d = 0.0;
    for (size_t c = 0; c < nc; c++) {
        if (f.at(c) > 0.0) {
            d += w[c] * f.at(c) * std::log(f.at(c) / q[c]);
        }
    }
    return d;
}

}  // namespace bellxt::testutil

#endif
