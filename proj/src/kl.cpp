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

#include "bellxt/kl.hpp"

#include <algorithm>
#include <cmath>

#include "bellxt/barrier.hpp"
#include "bellxt/errors.hpp"

namespace bellxt {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); i++) {
        s += a[i] * b[i];
    }
    return s;
}

// Weighted target: wf[c] = P(x,y) f[c].
std::vector<double> weighted_target(const Correlation &f) {
    std::vector<double> w = f.scenario().cell_weights();
    for (size_t c = 0; c < w.size(); c++) {
        w[c] *= f.at(c);
    }
    return w;
}

Correlation clean_table(const Scenario &sc, std::vector<double> q) {
    for (double &v : q) {
        v = std::max(v, 0.0);
    }
    const size_t per = sc.cells_per_setting();
    for (size_t s = 0; s < sc.num_settings(); s++) {
        double total = 0.0;
        for (size_t k = 0; k < per; k++) {
            total += q[s * per + k];
        }
        for (size_t k = 0; k < per; k++) {
            q[s * per + k] /= total;
        }
    }
    return Correlation::renormalized(sc, std::move(q));
}

// phi'(g) = -sum wf d / (q + g d) is increasing on [0, gmax]; find its root or
// return gmax if it stays negative.
double exact_line_search(
    const std::vector<double> &wf, const std::vector<double> &q, const std::vector<double> &d, double gmax) {
    auto deriv = [&](double g) {
        double s = 0.0;
        for (size_t c = 0; c < q.size(); c++) {
            if (wf[c] > 0.0 && d[c] != 0.0) {
                double den = q[c] + g * d[c];
                if (!(den > 0.0)) {
                    return d[c] < 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
                }
                s -= wf[c] * d[c] / den;
            }
        }
        return s;
    };
    if (deriv(gmax) <= 0.0) {
        return gmax;
    }
    double lo = 0.0;
    double hi = gmax;
    for (int k = 0; k < 200 && hi - lo > 1e-17 * (1.0 + hi); k++) {
        double mid = 0.5 * (lo + hi);
        if (deriv(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

KlResult project_polytope(const Correlation &f, const PolytopeSet &set, const KlOptions &opt) {
    const Scenario &sc = f.scenario();
    const size_t nc = sc.num_cells();
    const double tol = opt.tol.value_or(kPolytopeKlTol);
    const std::vector<double> wf = weighted_target(f);

    std::vector<std::vector<double>> atoms;
    std::vector<double> alpha;
    auto det = deterministic_vertices(sc);
    for (const auto &v : det) {
        atoms.emplace_back(v.values());
        alpha.push_back(1.0 / static_cast<double>(det.size()));
    }
    if (opt.start_vertex) {
        if (*opt.start_vertex >= det.size()) {
            throw InvalidArgument("kl_project: start_vertex out of range");
        }
        for (auto &a : alpha) {
            a *= 0.5;
        }
        alpha[*opt.start_vertex] += 0.5;
    }
    auto rebuild = [&]() {
        std::vector<double> q(nc, 0.0);
        for (size_t j = 0; j < atoms.size(); j++) {
            for (size_t c = 0; c < nc; c++) {
                q[c] += alpha[j] * atoms[j][c];
            }
        }
        return q;
    };
    std::vector<double> q = rebuild();

    KlResult res{Correlation::uniform(sc)};
    std::vector<double> grad(nc);
    std::vector<double> neg_grad(nc);
    std::vector<double> d(nc);
    double gap = std::numeric_limits<double>::infinity();
    long it = 0;
    for (;; it++) {
        for (size_t c = 0; c < nc; c++) {
            grad[c] = wf[c] > 0.0 ? -wf[c] / q[c] : 0.0;
            neg_grad[c] = -grad[c];
        }
        LinearMaximum lmo = set.maximize(neg_grad);
        std::vector<double> s(lmo.argument.probs().begin(), lmo.argument.probs().end());
        gap = dot(grad, q) - dot(grad, s);
        if (gap <= tol || it >= opt.max_iterations) {
            break;
        }
        // Away atom: the active vertex with the largest gradient product.
        size_t away = 0;
        double worst = -std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < atoms.size(); j++) {
            double v = dot(grad, atoms[j]);
            if (v > worst) {
                worst = v;
                away = j;
            }
        }
        size_t sidx = atoms.size();
        for (size_t j = 0; j < atoms.size(); j++) {
            bool same = true;
            for (size_t c = 0; c < nc && same; c++) {
                same = std::abs(atoms[j][c] - s[c]) <= 1e-12;
            }
            if (same) {
                sidx = j;
                break;
            }
        }
        if (sidx == away) {
            // The away vertex is already optimal for the linear model; the gap
            // then comes from round-off in q.
            q = rebuild();
            continue;
        }
        for (size_t c = 0; c < nc; c++) {
            d[c] = s[c] - atoms[away][c];
        }
        double gmax = alpha[away];
        double g = exact_line_search(wf, q, d, gmax);
        if (sidx == atoms.size()) {
            atoms.push_back(s);
            alpha.push_back(0.0);
        }
        alpha[sidx] += g;
        alpha[away] -= g;
        for (size_t c = 0; c < nc; c++) {
            q[c] += g * d[c];
        }
        if (alpha[away] <= 0.0 || g >= gmax) {
            atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(away));
            alpha.erase(alpha.begin() + static_cast<std::ptrdiff_t>(away));
            q = rebuild();
        } else if (it % 64 == 63) {
            q = rebuild();
        }
    }
    res.minimizer = clean_table(sc, q);
    res.divergence = kl_divergence(f, res.minimizer);
    res.duality_gap = std::max(gap, 0.0);
    res.iterations = it;
    res.certified = gap <= tol;
    return res;
}

KlResult project_moment(const Correlation &f, const MomentSet &set, const KlOptions &opt) {
    const Scenario &sc = f.scenario();
    const double tol = opt.tol.value_or(kMomentKlTol);
    const std::vector<double> wf = weighted_target(f);
    const Eigen::Index nl = static_cast<Eigen::Index>(set.num_labels());
    const Eigen::Index nv = nl - 1;
    const Eigen::MatrixXd &link = set.linkage();
    const Eigen::Index nc = link.rows();

    BarrierProblem pr;
    pr.num_vars = nv;
    for (Eigen::Index l = 0; l < nl; l++) {
        pr.lmi.push_back(set.label_indicator(static_cast<int>(l)));
    }
    pr.lin_a = link.rightCols(nv);
    pr.lin_b = link.col(0);
    Eigen::VectorXd wfv = Eigen::Map<const Eigen::VectorXd>(wf.data(), nc);
    pr.objective = [&](const Eigen::VectorXd &z, Eigen::VectorXd *g, Eigen::MatrixXd *h) {
        Eigen::VectorXd q = pr.lin_b + pr.lin_a * z;
        double v = 0.0;
        Eigen::VectorXd dq = Eigen::VectorXd::Zero(nc);
        Eigen::VectorXd hq = Eigen::VectorXd::Zero(nc);
        for (Eigen::Index c = 0; c < nc; c++) {
            if (wfv[c] > 0.0) {
                if (!(q[c] > 0.0)) {
                    return std::numeric_limits<double>::infinity();
                }
                double fc = f.at(static_cast<size_t>(c));
                v += wfv[c] * (std::log(fc) - std::log(q[c]));
                dq[c] = -wfv[c] / q[c];
                hq[c] = wfv[c] / (q[c] * q[c]);
            }
        }
        if (g) {
            *g = pr.lin_a.transpose() * dq;
        }
        if (h) {
            *h = pr.lin_a.transpose() * hq.asDiagonal() * pr.lin_a;
        }
        return v;
    };
    Eigen::VectorXd z0(nv);
    for (Eigen::Index k = 0; k < nv; k++) {
        z0[k] = set.interior_moments()[static_cast<size_t>(k + 1)];
    }
    BarrierOptions bo;
    bo.tol = tol;
    bo.max_newton_steps = opt.max_iterations;
    BarrierResult br = barrier_minimize(pr, z0, bo);

    std::vector<double> m(static_cast<size_t>(nl));
    m[0] = 1.0;
    for (Eigen::Index k = 0; k < nv; k++) {
        m[static_cast<size_t>(k + 1)] = br.z[k];
    }
    KlResult res{clean_table(sc, set.probabilities(m))};
    res.divergence = kl_divergence(f, res.minimizer);
    res.duality_gap = br.gap;
    res.iterations = br.newton_steps;
    res.certified = br.converged;
    return res;
}

}  // namespace

double kl_divergence(const Correlation &f, const Correlation &p) {
    if (!f.scenario().same_shape(p.scenario())) {
        throw InvalidArgument("kl_divergence: tables belong to different scenarios");
    }
    std::vector<double> w = f.scenario().cell_weights();
    double s = 0.0;
    for (size_t c = 0; c < w.size(); c++) {
        double fc = f.at(c);
        if (fc > 0.0) {
            double pc = p.at(c);
            if (!(pc > 0.0)) {
                return kInfiniteDivergence;
            }
            s += w[c] * fc * std::log(fc / pc);
        }
    }
    // Both rows are normalized, so a negative sum is round-off.
    return std::max(s, 0.0);
}

KlResult kl_project(const Correlation &f, const HypothesisSet &set, const KlOptions &options) {
    if (!f.scenario().same_shape(set.scenario())) {
        throw InvalidArgument("kl_project: table and set belong to different scenarios");
    }
    if (options.tol && !(*options.tol > 0.0)) {
        throw InvalidArgument("kl_project: tol must be positive");
    }
    if (set.is_polytope()) {
        return project_polytope(f, set.polytope(), options);
    }
    return project_moment(f, set.moment_set(), options);
}

}  // namespace bellxt
