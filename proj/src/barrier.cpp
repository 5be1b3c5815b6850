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

#include "bellxt/barrier.hpp"

#include <cmath>

#include "bellxt/errors.hpp"

namespace bellxt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd lmi_matrix(const BarrierProblem &pr, const Eigen::VectorXd &z) {
    Eigen::MatrixXd m = pr.lmi[0];
    for (Eigen::Index i = 0; i < pr.num_vars; i++) {
        if (z[i] != 0.0) {
            m.noalias() += z[i] * pr.lmi[static_cast<size_t>(i) + 1];
        }
    }
    return m;
}

bool has_lmi(const BarrierProblem &pr) {
    return !pr.lmi.empty();
}

bool has_lin(const BarrierProblem &pr) {
    return pr.lin_a.rows() > 0;
}

// Barrier value -log det M - sum log l, or +inf outside the domain.
double barrier_value(const BarrierProblem &pr, const Eigen::VectorXd &z) {
    double v = 0.0;
    if (has_lin(pr)) {
        Eigen::VectorXd l = pr.lin_b + pr.lin_a * z;
        for (Eigen::Index i = 0; i < l.size(); i++) {
            if (!(l[i] > 0.0)) {
                return kInf;
            }
            v -= std::log(l[i]);
        }
    }
    if (has_lmi(pr)) {
        Eigen::LLT<Eigen::MatrixXd> llt(lmi_matrix(pr, z));
        if (llt.info() != Eigen::Success) {
            return kInf;
        }
        const auto &lm = llt.matrixLLT();
        for (Eigen::Index i = 0; i < lm.rows(); i++) {
            if (!(lm(i, i) > 0.0)) {
                return kInf;
            }
            v -= 2.0 * std::log(lm(i, i));
        }
    }
    return v;
}

void barrier_derivatives(const BarrierProblem &pr, const Eigen::VectorXd &z, Eigen::VectorXd &g, Eigen::MatrixXd &h) {
    if (has_lin(pr)) {
        Eigen::VectorXd l = pr.lin_b + pr.lin_a * z;
        Eigen::VectorXd inv = l.cwiseInverse();
        g.noalias() -= pr.lin_a.transpose() * inv;
        Eigen::MatrixXd scaled = inv.asDiagonal() * pr.lin_a;
        h.noalias() += scaled.transpose() * scaled;
    }
    if (has_lmi(pr)) {
        Eigen::MatrixXd m = lmi_matrix(pr, z);
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        Eigen::MatrixXd s = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
        s = 0.5 * (s + s.transpose());
        std::vector<Eigen::MatrixXd> sfs(static_cast<size_t>(pr.num_vars));
        for (Eigen::Index i = 0; i < pr.num_vars; i++) {
            const Eigen::MatrixXd &fi = pr.lmi[static_cast<size_t>(i) + 1];
            g[i] -= s.cwiseProduct(fi).sum();
            sfs[static_cast<size_t>(i)] = s * fi * s;
        }
        for (Eigen::Index i = 0; i < pr.num_vars; i++) {
            for (Eigen::Index j = 0; j <= i; j++) {
                double v = sfs[static_cast<size_t>(i)].cwiseProduct(pr.lmi[static_cast<size_t>(j) + 1]).sum();
                h(i, j) += v;
                if (i != j) {
                    h(j, i) += v;
                }
            }
        }
    }
}

}  // namespace

double BarrierProblem::barrier_parameter() const {
    double theta = static_cast<double>(lin_a.rows());
    if (!lmi.empty()) {
        theta += static_cast<double>(lmi[0].rows());
    }
    return theta;
}

bool BarrierProblem::strictly_feasible(const Eigen::VectorXd &z) const {
    return std::isfinite(barrier_value(*this, z));
}

BarrierResult barrier_minimize(const BarrierProblem &pr, Eigen::VectorXd z, const BarrierOptions &opt) {
    if (z.size() != pr.num_vars) {
        throw InvalidArgument("barrier_minimize: starting point has the wrong dimension");
    }
    if (has_lmi(pr) && static_cast<Eigen::Index>(pr.lmi.size()) != pr.num_vars + 1) {
        throw InvalidArgument("barrier_minimize: expected one LMI coefficient matrix per variable plus a constant");
    }
    if (!pr.strictly_feasible(z)) {
        throw InvalidArgument("barrier_minimize: starting point is not strictly feasible");
    }
    const double theta = pr.barrier_parameter();
    BarrierResult res;
    double t = opt.t0;
    const Eigen::Index n = pr.num_vars;

    auto total = [&](const Eigen::VectorXd &zz) {
        double b = barrier_value(pr, zz);
        if (!std::isfinite(b)) {
            return kInf;
        }
        double f = pr.objective(zz, nullptr, nullptr);
        return std::isfinite(f) ? t * f + b : kInf;
    };

    while (true) {
        // Centering for the current t.
        while (true) {
            if (res.newton_steps >= opt.max_newton_steps) {
                res.z = z;
                res.objective = pr.objective(z, nullptr, nullptr);
                return res;
            }
            Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
            Eigen::VectorXd fg = Eigen::VectorXd::Zero(n);
            Eigen::MatrixXd fh = Eigen::MatrixXd::Zero(n, n);
            pr.objective(z, &fg, &fh);
            g += t * fg;
            h += t * fh;
            barrier_derivatives(pr, z, g, h);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
            Eigen::VectorXd dz = ldlt.solve(-g);
            if (ldlt.info() != Eigen::Success || !dz.allFinite()) {
                double reg = 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
                dz = (h + reg * Eigen::MatrixXd::Identity(n, n)).ldlt().solve(-g);
            }
            double dec2 = -g.dot(dz);
            res.newton_steps++;
            if (!(dec2 > opt.centering_tol)) {
                break;
            }
            double cur = total(z);
            double step = 1.0;
            bool moved = false;
            for (int k = 0; k < 80; k++, step *= 0.5) {
                Eigen::VectorXd cand = z + step * dz;
                double v = total(cand);
                if (v <= cur - 0.25 * step * dec2) {
                    z = std::move(cand);
                    // A decrease below the resolution of the merit value is round-off.
                    moved = cur - v > 8 * std::numeric_limits<double>::epsilon() * std::abs(cur);
                    break;
                }
            }
            if (opt.stop && opt.stop(z, t)) {
                res.z = z;
                res.objective = pr.objective(z, nullptr, nullptr);
                res.stopped_early = true;
                return res;
            }
            if (!moved) {
                // Round-off floor: no representable decrease along the Newton step.
                break;
            }
        }
        res.gap = theta / t;
        if (res.gap <= opt.tol) {
            res.z = z;
            res.objective = pr.objective(z, nullptr, nullptr);
            res.converged = true;
            return res;
        }
        t *= opt.growth;
    }
}

}  // namespace bellxt
