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

#ifndef BELLXT_SIMPLEX_HPP
#define BELLXT_SIMPLEX_HPP

#include <cstdint>
#include <vector>

namespace bellxt {

enum class LpSense { Maximize, Minimize };
enum class LpStatus { Optimal, Infeasible, Unbounded, PivotLimit };

/// optimize objective.x  s.t.  eq_rows x = eq_rhs,  le_rows x <= le_rhs,  x >= 0.
template <class Scalar>
struct LinearProgramT {
    std::vector<Scalar> objective;
    std::vector<std::vector<Scalar>> eq_rows;
    std::vector<Scalar> eq_rhs;
    std::vector<std::vector<Scalar>> le_rows;
    std::vector<Scalar> le_rhs;
    LpSense sense = LpSense::Maximize;
};

template <class Scalar>
struct LpSolutionT {
    LpStatus status = LpStatus::Infeasible;
    Scalar value{};
    std::vector<Scalar> x;
    int64_t pivots = 0;
};

/// Pivot threshold. Exact scalar types use 0.
template <class Scalar>
struct SimplexTolerance {
    static Scalar pivot() {
        return Scalar(0);
    }
    static Scalar feasibility() {
        return Scalar(0);
    }
};

template <>
struct SimplexTolerance<double> {
    static double pivot() {
        return 1e-11;
    }
    static double feasibility() {
        return 1e-9;
    }
};

namespace detail {

template <class Scalar>
class Tableau {
   public:
    using Row = std::vector<Scalar>;

    Tableau(size_t num_rows, size_t num_cols) : rows_(num_rows, Row(num_cols + 1, Scalar(0))), basis_(num_rows) {}

    Scalar &at(size_t r, size_t c) {
        return rows_[r][c];
    }
    Scalar &rhs(size_t r) {
        return rows_[r].back();
    }
    size_t num_rows() const {
        return rows_.size();
    }
    std::vector<size_t> &basis() {
        return basis_;
    }

    void pivot(size_t r, size_t c, Row &reduced, Scalar &objective_value) {
        Row &pr = rows_[r];
        Scalar inv = Scalar(1) / pr[c];
        for (auto &v : pr) {
            v *= inv;
        }
        pr[c] = Scalar(1);
        for (size_t i = 0; i < rows_.size(); i++) {
            if (i == r) {
                continue;
            }
            Scalar factor = rows_[i][c];
            if (factor == Scalar(0)) {
                continue;
            }
            Row &row = rows_[i];
            for (size_t k = 0; k < row.size(); k++) {
                row[k] -= factor * pr[k];
            }
            row[c] = Scalar(0);
        }
        Scalar factor = reduced[c];
        if (factor != Scalar(0)) {
            for (size_t k = 0; k + 1 < pr.size(); k++) {
                reduced[k] -= factor * pr[k];
            }
            reduced[c] = Scalar(0);
            objective_value += factor * pr.back();
        }
        basis_[r] = c;
    }

    void erase_row(size_t r) {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    }

   private:
    std::vector<Row> rows_;
    std::vector<size_t> basis_;
};

/// Bland's rule: lowest-index improving column enters; the ratio test breaks ties
/// by lowest basic variable index. `reduced` holds reduced costs for a maximization.
template <class Scalar>
LpStatus run_simplex(
    Tableau<Scalar> &t, std::vector<Scalar> &reduced, Scalar &objective_value, size_t allowed_cols, int64_t &pivots,
    int64_t max_pivots) {
    const Scalar eps = SimplexTolerance<Scalar>::pivot();
    while (true) {
        size_t enter = allowed_cols;
        for (size_t j = 0; j < allowed_cols; j++) {
            if (reduced[j] > eps) {
                enter = j;
                break;
            }
        }
        if (enter == allowed_cols) {
            return LpStatus::Optimal;
        }
        size_t leave = t.num_rows();
        Scalar best_ratio{};
        for (size_t i = 0; i < t.num_rows(); i++) {
            Scalar a = t.at(i, enter);
            if (!(a > eps)) {
                continue;
            }
            Scalar ratio = t.rhs(i) / a;
            if (leave == t.num_rows() || ratio < best_ratio ||
                (!(best_ratio < ratio) && t.basis()[i] < t.basis()[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == t.num_rows()) {
            return LpStatus::Unbounded;
        }
        if (pivots >= max_pivots) {
            return LpStatus::PivotLimit;
        }
        t.pivot(leave, enter, reduced, objective_value);
        pivots++;
    }
}

}  // namespace detail

/// Two-phase dense tableau simplex with Bland's anti-cycling rule.
template <class Scalar>
LpSolutionT<Scalar> solve_simplex(const LinearProgramT<Scalar> &lp, int64_t max_pivots = 1000000) {
    const Scalar eps = SimplexTolerance<Scalar>::pivot();
    const size_t n = lp.objective.size();
    const size_t m_eq = lp.eq_rows.size();
    const size_t m_le = lp.le_rows.size();
    const size_t m = m_eq + m_le;
    const size_t structural = n + m_le;  // original + slack columns
    const size_t cols = structural + m;  // + one artificial per row

    detail::Tableau<Scalar> t(m, cols);
    for (size_t i = 0; i < m; i++) {
        const auto &row = i < m_eq ? lp.eq_rows[i] : lp.le_rows[i - m_eq];
        Scalar rhs = i < m_eq ? lp.eq_rhs[i] : lp.le_rhs[i - m_eq];
        for (size_t j = 0; j < n && j < row.size(); j++) {
            t.at(i, j) = row[j];
        }
        if (i >= m_eq) {
            t.at(i, n + (i - m_eq)) = Scalar(1);
        }
        t.rhs(i) = rhs;
        if (rhs < Scalar(0)) {
            for (size_t j = 0; j < structural; j++) {
                t.at(i, j) = -t.at(i, j);
            }
            t.rhs(i) = -rhs;
        }
        t.at(i, structural + i) = Scalar(1);
        t.basis()[i] = structural + i;
    }

    LpSolutionT<Scalar> sol;
    // Phase 1: maximize -sum(artificials).
    std::vector<Scalar> reduced(cols, Scalar(0));
    Scalar phase_value(0);
    for (size_t i = 0; i < m; i++) {
        for (size_t j = 0; j < structural; j++) {
            reduced[j] += t.at(i, j);
        }
        phase_value -= t.rhs(i);
    }
    LpStatus status = detail::run_simplex(t, reduced, phase_value, structural, sol.pivots, max_pivots);
    if (status == LpStatus::PivotLimit) {
        sol.status = status;
        return sol;
    }
    if (phase_value < -SimplexTolerance<Scalar>::feasibility()) {
        sol.status = LpStatus::Infeasible;
        return sol;
    }
    // Drive zero-valued artificials out of the basis; rows with no structural
    // entry left are redundant and dropped.
    for (size_t i = 0; i < t.num_rows();) {
        if (t.basis()[i] < structural) {
            i++;
            continue;
        }
        size_t col = structural;
        for (size_t j = 0; j < structural; j++) {
            if (t.at(i, j) > eps || t.at(i, j) < -eps) {
                col = j;
                break;
            }
        }
        if (col == structural) {
            t.erase_row(i);
            continue;
        }
        Scalar ignored(0);
        std::vector<Scalar> scratch(cols, Scalar(0));
        t.pivot(i, col, scratch, ignored);
        sol.pivots++;
        i++;
    }

    // Phase 2.
    std::vector<Scalar> cost(cols, Scalar(0));
    for (size_t j = 0; j < n; j++) {
        cost[j] = lp.sense == LpSense::Maximize ? lp.objective[j] : -lp.objective[j];
    }
    std::fill(reduced.begin(), reduced.end(), Scalar(0));
    Scalar value(0);
    for (size_t j = 0; j < structural; j++) {
        reduced[j] = cost[j];
    }
    for (size_t i = 0; i < t.num_rows(); i++) {
        Scalar cb = cost[t.basis()[i]];
        if (cb == Scalar(0)) {
            continue;
        }
        for (size_t j = 0; j < structural; j++) {
            reduced[j] -= cb * t.at(i, j);
        }
        value += cb * t.rhs(i);
    }
    for (size_t i = 0; i < t.num_rows(); i++) {
        reduced[t.basis()[i]] = Scalar(0);
    }
    status = detail::run_simplex(t, reduced, value, structural, sol.pivots, max_pivots);
    sol.status = status;
    if (status != LpStatus::Optimal) {
        return sol;
    }
    sol.x.assign(n, Scalar(0));
    for (size_t i = 0; i < t.num_rows(); i++) {
        size_t b = t.basis()[i];
        if (b < n) {
            sol.x[b] = t.rhs(i);
        }
    }
    sol.value = Scalar(0);
    for (size_t j = 0; j < n; j++) {
        sol.value += lp.objective[j] * sol.x[j];
    }
    return sol;
}

using LinearProgram = LinearProgramT<double>;
using LpSolution = LpSolutionT<double>;

/// Solves `lp` in double precision. Throws NumericalFailure if the pivot budget
/// is exhausted, InvalidArgument if the program is infeasible or unbounded.
LpSolution lp_optimize(const LinearProgram &lp);

}  // namespace bellxt

#endif
