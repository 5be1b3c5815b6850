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

#include "bellxt/polytope.hpp"

#include <algorithm>
#include <cmath>

#include "bellxt/errors.hpp"

namespace bellxt {

namespace {

using Type = LinearConstraint::Type;

void add_nonnegativity(const Scenario &sc, std::vector<LinearConstraint> &out) {
    for (size_t c = 0; c < sc.num_cells(); c++) {
        LinearConstraint lc{std::vector<double>(sc.num_cells(), 0.0), 0.0, Type::GreaterEqual};
        lc.coeffs[c] = 1.0;
        out.push_back(std::move(lc));
    }
}

void add_normalization(const Scenario &sc, std::vector<LinearConstraint> &out) {
    size_t per = sc.cells_per_setting();
    for (size_t s = 0; s < sc.num_settings(); s++) {
        LinearConstraint lc{std::vector<double>(sc.num_cells(), 0.0), 1.0, Type::Equal};
        std::fill_n(lc.coeffs.begin() + s * per, per, 1.0);
        out.push_back(std::move(lc));
    }
}

// sum_b P(a,b|x,y') - sum_b P(a,b|x,0) = 0 for y' >= 1.
void add_alice_marginals(const Scenario &sc, std::vector<LinearConstraint> &out) {
    for (int x = 0; x < sc.n_x(); x++) {
        for (int a = 0; a < sc.n_a(); a++) {
            for (int y = 1; y < sc.n_y(); y++) {
                LinearConstraint lc{std::vector<double>(sc.num_cells(), 0.0), 0.0, Type::Equal};
                for (int b = 0; b < sc.n_b(); b++) {
                    lc.coeffs[sc.index(a, b, x, y)] += 1.0;
                    lc.coeffs[sc.index(a, b, x, 0)] -= 1.0;
                }
                out.push_back(std::move(lc));
            }
        }
    }
}

void add_bob_marginals(const Scenario &sc, std::vector<LinearConstraint> &out) {
    for (int y = 0; y < sc.n_y(); y++) {
        for (int b = 0; b < sc.n_b(); b++) {
            for (int x = 1; x < sc.n_x(); x++) {
                LinearConstraint lc{std::vector<double>(sc.num_cells(), 0.0), 0.0, Type::Equal};
                for (int a = 0; a < sc.n_a(); a++) {
                    lc.coeffs[sc.index(a, b, x, y)] += 1.0;
                    lc.coeffs[sc.index(a, b, 0, y)] -= 1.0;
                }
                out.push_back(std::move(lc));
            }
        }
    }
}

// The eight CHSH facets 2 - s * (E00 + E01 + E10 + E11 - 2 E_{x'y'}) >= 0.
void add_chsh_facets(const Scenario &sc, std::vector<LinearConstraint> &out) {
    for (int flip = 0; flip < 4; flip++) {
        for (int sign : {1, -1}) {
            LinearConstraint lc{std::vector<double>(sc.num_cells(), 0.0), -2.0, Type::GreaterEqual};
            for (int x = 0; x < 2; x++) {
                for (int y = 0; y < 2; y++) {
                    double s = (x * 2 + y == flip) ? -1.0 : 1.0;
                    for (int a = 0; a < 2; a++) {
                        for (int b = 0; b < 2; b++) {
                            double parity = ((a ^ b) == 0) ? 1.0 : -1.0;
                            lc.coeffs[sc.index(a, b, x, y)] = -sign * s * parity;
                        }
                    }
                }
            }
            out.push_back(std::move(lc));
        }
    }
}

std::vector<std::vector<double>> equality_rows(const std::vector<LinearConstraint> &h, std::vector<double> &rhs) {
    std::vector<std::vector<double>> rows;
    for (const auto &lc : h) {
        if (lc.type == Type::Equal) {
            rows.push_back(lc.coeffs);
            rhs.push_back(lc.rhs);
        }
    }
    return rows;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); i++) {
        s += a[i] * b[i];
    }
    return s;
}

const LpSolution &require_optimal(const LpSolution &sol) {
    if (sol.status == LpStatus::PivotLimit) {
        throw NumericalFailure("simplex exhausted its pivot budget");
    }
    if (sol.status != LpStatus::Optimal) {
        throw NumericalFailure("linear program over a hypothesis set was not solved to optimality");
    }
    return sol;
}

}  // namespace

std::string to_string(PolytopeKind kind) {
    switch (kind) {
        case PolytopeKind::NS:
            return "NS";
        case PolytopeKind::OWNS_AnotB:
            return "OWNS_AnotB";
        case PolytopeKind::OWNS_BnotA:
            return "OWNS_BnotA";
        case PolytopeKind::L:
            return "L";
    }
    return "?";
}

double LinearConstraint::violation(std::span<const double> p) const {
    double lhs = dot(coeffs, p);
    if (type == Type::Equal) {
        return std::abs(lhs - rhs);
    }
    return std::max(0.0, rhs - lhs);
}

LpSolution lp_optimize(const LinearProgram &lp) {
    LpSolution sol = solve_simplex(lp);
    if (sol.status == LpStatus::PivotLimit) {
        throw NumericalFailure("simplex exhausted its pivot budget");
    }
    if (sol.status == LpStatus::Infeasible) {
        throw InvalidArgument("linear program is infeasible");
    }
    if (sol.status == LpStatus::Unbounded) {
        throw InvalidArgument("linear program is unbounded");
    }
    return sol;
}

std::vector<Correlation> deterministic_vertices(const Scenario &sc) {
    std::vector<int> alice(sc.n_x(), 0);
    std::vector<int> bob(sc.n_y(), 0);
    size_t n_alice = 1;
    size_t n_bob = 1;
    for (int i = 0; i < sc.n_x(); i++) {
        n_alice *= static_cast<size_t>(sc.n_a());
    }
    for (int i = 0; i < sc.n_y(); i++) {
        n_bob *= static_cast<size_t>(sc.n_b());
    }
    std::vector<Correlation> out;
    out.reserve(n_alice * n_bob);
    for (size_t ca = 0; ca < n_alice; ca++) {
        size_t code = ca;
        for (int x = sc.n_x() - 1; x >= 0; x--) {
            alice[x] = static_cast<int>(code % sc.n_a());
            code /= sc.n_a();
        }
        for (size_t cb = 0; cb < n_bob; cb++) {
            code = cb;
            for (int y = sc.n_y() - 1; y >= 0; y--) {
                bob[y] = static_cast<int>(code % sc.n_b());
                code /= sc.n_b();
            }
            out.push_back(deterministic_strategy(sc, alice, bob));
        }
    }
    return out;
}

PolytopeSet::PolytopeSet(PolytopeKind kind, Scenario scenario) : kind_(kind), scenario_(std::move(scenario)) {}

PolytopeSet PolytopeSet::build(PolytopeKind kind, const Scenario &scenario) {
    PolytopeSet set(kind, scenario);
    add_nonnegativity(scenario, set.h_rep_);
    add_normalization(scenario, set.h_rep_);
    if (kind != PolytopeKind::OWNS_AnotB) {
        add_alice_marginals(scenario, set.h_rep_);
    }
    if (kind != PolytopeKind::OWNS_BnotA) {
        add_bob_marginals(scenario, set.h_rep_);
    }
    if (kind == PolytopeKind::L) {
        if (scenario.is_chsh()) {
            add_chsh_facets(scenario, set.h_rep_);
        }
        set.v_rep_ = deterministic_vertices(scenario);
    }
    return set;
}

double PolytopeSet::h_rep_violation(const Correlation &p) const {
    double worst = 0.0;
    for (const auto &lc : h_rep_) {
        worst = std::max(worst, lc.violation(p.probs()));
    }
    return worst;
}

double PolytopeSet::hull_distance(const Correlation &p) const {
    if (kind_ != PolytopeKind::L) {
        throw InvalidArgument("hull_distance is only defined for L");
    }
    // Variables: weights w_j, then s+ and s- per cell.
    size_t nv = v_rep_.size();
    size_t nc = scenario_.num_cells();
    LinearProgram lp;
    lp.sense = LpSense::Minimize;
    lp.objective.assign(nv + 2 * nc, 0.0);
    std::fill(lp.objective.begin() + static_cast<std::ptrdiff_t>(nv), lp.objective.end(), 1.0);
    for (size_t c = 0; c < nc; c++) {
        std::vector<double> row(nv + 2 * nc, 0.0);
        for (size_t j = 0; j < nv; j++) {
            row[j] = v_rep_[j].at(c);
        }
        row[nv + c] = 1.0;
        row[nv + nc + c] = -1.0;
        lp.eq_rows.push_back(std::move(row));
        lp.eq_rhs.push_back(p.at(c));
    }
    std::vector<double> simplex_row(nv + 2 * nc, 0.0);
    std::fill_n(simplex_row.begin(), nv, 1.0);
    lp.eq_rows.push_back(std::move(simplex_row));
    lp.eq_rhs.push_back(1.0);
    return std::max(0.0, require_optimal(solve_simplex(lp)).value);
}

bool PolytopeSet::contains(const Correlation &p, double tol) const {
    if (!(tol > 0.0)) {
        throw InvalidArgument("membership tolerance must be positive");
    }
    if (!p.scenario().same_shape(scenario_)) {
        throw InvalidArgument("correlation and set belong to different scenarios");
    }
    if (kind_ == PolytopeKind::L) {
        return hull_distance(p) <= tol;
    }
    return h_rep_violation(p) <= tol;
}

LinearMaximum PolytopeSet::maximize(std::span<const double> objective) const {
    size_t nc = scenario_.num_cells();
    if (objective.size() != nc) {
        throw InvalidArgument("objective has the wrong number of entries");
    }
    double scale = 0.0;
    for (double v : objective) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("objective coefficients must be finite");
        }
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) {
        scale = 1.0;
    }

    if (kind_ == PolytopeKind::L) {
        size_t nv = v_rep_.size();
        std::vector<double> vertex_values(nv);
        LinearProgram lp;
        lp.objective.resize(nv);
        for (size_t j = 0; j < nv; j++) {
            vertex_values[j] = dot(objective, v_rep_[j].probs());
            lp.objective[j] = vertex_values[j] / scale;
        }
        lp.eq_rows.push_back(std::vector<double>(nv, 1.0));
        lp.eq_rhs.push_back(1.0);
        const LpSolution sol = require_optimal(solve_simplex(lp));
        double value = sol.value * scale;
        size_t best = nv;
        for (size_t j = 0; j < nv; j++) {
            if (vertex_values[j] >= value - 1e-12 * scale) {
                best = j;
                break;
            }
        }
        if (best == nv) {
            throw NumericalFailure("LP optimum over L does not match any vertex");
        }
        return LinearMaximum{vertex_values[best], v_rep_[best], best};
    }

    LinearProgram lp;
    lp.objective.resize(nc);
    for (size_t c = 0; c < nc; c++) {
        lp.objective[c] = objective[c] / scale;
    }
    lp.eq_rows = equality_rows(h_rep_, lp.eq_rhs);
    const LpSolution sol = require_optimal(solve_simplex(lp));
    Correlation arg = Correlation::renormalized(scenario_, sol.x);
    return LinearMaximum{dot(objective, arg.probs()), std::move(arg), std::nullopt};
}

LinearMaximum PolytopeSet::maximize_bell_functional(std::span<const double> coeffs) const {
    if (coeffs.size() != scenario_.num_cells()) {
        throw InvalidArgument("coefficient table has the wrong number of entries");
    }
    std::vector<double> w = scenario_.cell_weights();
    for (size_t c = 0; c < w.size(); c++) {
        w[c] *= coeffs[c];
    }
    return maximize(w);
}

}  // namespace bellxt
