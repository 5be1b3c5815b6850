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

#include "bellxt/moment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "bellxt/barrier.hpp"
#include "bellxt/errors.hpp"
#include "bellxt/polytope.hpp"

namespace bellxt {

namespace {

std::vector<int> reduce(std::vector<int> w) {
    w.erase(std::unique(w.begin(), w.end()), w.end());
    return w;
}

std::vector<int> reversed(std::vector<int> w) {
    std::reverse(w.begin(), w.end());
    return w;
}

// <u^dag v> as a canonical word.
MomentWord product_label(const MomentWord &u, const MomentWord &v) {
    MomentWord w;
    w.alice = reversed(u.alice);
    w.alice.insert(w.alice.end(), v.alice.begin(), v.alice.end());
    w.alice = reduce(std::move(w.alice));
    w.bob = reversed(u.bob);
    w.bob.insert(w.bob.end(), v.bob.begin(), v.bob.end());
    w.bob = reduce(std::move(w.bob));
    MomentWord adj{reversed(w.alice), reversed(w.bob)};
    return std::min(w, adj);
}

size_t distinct_letters(const std::vector<int> &w) {
    return std::set<int>(w.begin(), w.end()).size();
}

double min_eigenvalue(const Eigen::MatrixXd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

}  // namespace

std::string to_string(MomentLevel level) {
    return level == MomentLevel::One ? "Q1" : "Q1AB";
}

std::string MomentWord::str() const {
    std::string s;
    for (int x : alice) {
        s += "A" + std::to_string(x);
    }
    for (int y : bob) {
        s += "B" + std::to_string(y);
    }
    return s.empty() ? "1" : s;
}

MomentSet MomentSet::build(MomentLevel level, const Scenario &scenario) {
    if (!scenario.is_chsh()) {
        throw UnsupportedScenario("moment sets are implemented for the (2,2,2,2) scenario only");
    }
    MomentSet s(level, scenario);
    s.basis_ = {{{}, {}}, {{0}, {}}, {{1}, {}}, {{}, {0}}, {{}, {1}}};
    if (level == MomentLevel::OnePlusAB) {
        for (int x = 0; x < 2; x++) {
            for (int y = 0; y < 2; y++) {
                s.basis_.push_back({{x}, {y}});
            }
        }
    }
    const size_t n = s.basis_.size();
    std::map<MomentWord, int> index;
    s.entry_label_.resize(n * n);
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            MomentWord w = product_label(s.basis_[i], s.basis_[j]);
            auto it = index.find(w);
            if (it == index.end()) {
                it = index.emplace(w, static_cast<int>(s.labels_.size())).first;
                s.labels_.push_back(w);
            }
            s.entry_label_[i * n + j] = it->second;
        }
    }
    s.linked_.assign(s.labels_.size(), false);
    s.linked_[0] = true;
    for (int x = 0; x < 2; x++) {
        s.alice_label_.push_back(index.at({{x}, {}}));
        s.bob_label_.push_back(index.at({{}, {x}}));
        s.linked_[static_cast<size_t>(s.alice_label_.back())] = true;
        s.linked_[static_cast<size_t>(s.bob_label_.back())] = true;
    }
    for (int x = 0; x < 2; x++) {
        for (int y = 0; y < 2; y++) {
            s.joint_label_.push_back(index.at({{x}, {y}}));
            s.linked_[static_cast<size_t>(s.joint_label_.back())] = true;
        }
    }

    s.linkage_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(scenario.num_cells()), static_cast<Eigen::Index>(s.labels_.size()));
    for (int x = 0; x < 2; x++) {
        for (int y = 0; y < 2; y++) {
            auto row = [&](int a, int b) { return static_cast<Eigen::Index>(scenario.index(a, b, x, y)); };
            int ax = s.alice_label(x), by = s.bob_label(y), m = s.joint_label(x, y);
            s.linkage_(row(0, 0), m) = 1;
            s.linkage_(row(0, 1), ax) = 1;
            s.linkage_(row(0, 1), m) = -1;
            s.linkage_(row(1, 0), by) = 1;
            s.linkage_(row(1, 0), m) = -1;
            s.linkage_(row(1, 1), 0) = 1;
            s.linkage_(row(1, 1), ax) = -1;
            s.linkage_(row(1, 1), by) = -1;
            s.linkage_(row(1, 1), m) = 1;
        }
    }
    for (const auto &w : s.labels_) {
        s.interior_.push_back(std::ldexp(1.0, -static_cast<int>(distinct_letters(w.alice) + distinct_letters(w.bob))));
    }
    return s;
}

Eigen::MatrixXd MomentSet::matrix(std::span<const double> moments) const {
    const Eigen::Index n = dim();
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; i++) {
        for (Eigen::Index j = 0; j < n; j++) {
            m(i, j) = moments[static_cast<size_t>(entry_label(i, j))];
        }
    }
    return m;
}

Eigen::MatrixXd MomentSet::label_indicator(int label) const {
    const Eigen::Index n = dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; i++) {
        for (Eigen::Index j = 0; j < n; j++) {
            if (entry_label(i, j) == label) {
                m(i, j) = 1.0;
            }
        }
    }
    return m;
}

std::vector<double> MomentSet::probabilities(std::span<const double> moments) const {
    Eigen::Map<const Eigen::VectorXd> mv(moments.data(), static_cast<Eigen::Index>(moments.size()));
    Eigen::VectorXd q = linkage_ * mv;
    return {q.data(), q.data() + q.size()};
}

std::vector<double> MomentSet::fit_moments(const Correlation &p) const {
    if (!p.scenario().same_shape(scenario_)) {
        throw InvalidArgument("fit_moments: correlation belongs to a different scenario");
    }
    std::vector<int> cols;
    for (size_t k = 1; k < labels_.size(); k++) {
        if (linked_[k]) {
            cols.push_back(static_cast<int>(k));
        }
    }
    const Eigen::Index cells = linkage_.rows();
    Eigen::MatrixXd a(cells, static_cast<Eigen::Index>(cols.size()));
    for (size_t c = 0; c < cols.size(); c++) {
        a.col(static_cast<Eigen::Index>(c)) = linkage_.col(cols[c]);
    }
    Eigen::VectorXd rhs(cells);
    for (Eigen::Index c = 0; c < cells; c++) {
        rhs[c] = p.at(static_cast<size_t>(c)) - linkage_(c, 0);
    }
    Eigen::VectorXd theta = a.colPivHouseholderQr().solve(rhs);
    std::vector<double> m = interior_;
    m[0] = 1.0;
    for (size_t c = 0; c < cols.size(); c++) {
        m[static_cast<size_t>(cols[c])] = theta[static_cast<Eigen::Index>(c)];
    }
    return m;
}

Eigen::MatrixXd psd_project(const Eigen::MatrixXd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

Eigen::MatrixXd affine_project(
    const MomentSet &set, const Eigen::MatrixXd &m, std::span<const std::optional<double>> fixed) {
    std::vector<double> sum(set.num_labels(), 0.0);
    std::vector<int> count(set.num_labels(), 0);
    const Eigen::Index n = set.dim();
    for (Eigen::Index i = 0; i < n; i++) {
        for (Eigen::Index j = 0; j < n; j++) {
            int l = set.entry_label(i, j);
            sum[static_cast<size_t>(l)] += m(i, j);
            count[static_cast<size_t>(l)]++;
        }
    }
    std::vector<double> value(set.num_labels());
    for (size_t l = 0; l < value.size(); l++) {
        value[l] = fixed[l].has_value() ? *fixed[l] : sum[l] / count[l];
    }
    return set.matrix(value);
}

}  // namespace

Eigen::MatrixXd dykstra_project(
    const MomentSet &set, const Eigen::MatrixXd &start, std::span<const std::optional<double>> fixed, long iterations) {
    if (fixed.size() != set.num_labels()) {
        throw InvalidArgument("dykstra_project: expected one optional value per label");
    }
    Eigen::MatrixXd x = affine_project(set, start, fixed);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (long k = 0; k < iterations; k++) {
        Eigen::MatrixXd y = psd_project(x + p);
        p = x + p - y;
        Eigen::MatrixXd xn = affine_project(set, y + q, fixed);
        q = y + q - xn;
        x = std::move(xn);
    }
    return x;
}

MomentProjection project_to_moment_set(
    const Correlation &p, const MomentSet &set, double tol, const MomentProjectionOptions &options) {
    if (!(tol > 0.0)) {
        throw InvalidArgument("project_to_moment_set: tol must be positive");
    }
    MomentProjection res;
    std::vector<double> fit = set.fit_moments(p);
    std::vector<double> p_ns = set.probabilities(fit);

    // Phase 1: alternating projections with the linked moments held fixed.
    std::vector<std::optional<double>> fixed(set.num_labels());
    for (size_t l = 0; l < set.num_labels(); l++) {
        if (set.is_linked(static_cast<int>(l))) {
            fixed[l] = fit[l];
        }
    }
    Eigen::MatrixXd x = set.matrix(fit);
    Eigen::MatrixXd pc = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    Eigen::MatrixXd qc = pc;
    double s = min_eigenvalue(x);
    bool certified = s >= 0.0;
    for (long k = 0; k < options.alternating_iterations && !certified; k++) {
        Eigen::MatrixXd y = psd_project(x + pc);
        pc = x + pc - y;
        Eigen::MatrixXd xn = affine_project(set, y + qc, fixed);
        qc = y + qc - xn;
        x = std::move(xn);
        s = min_eigenvalue(x);
        certified = s >= 0.0;
        res.iterations++;
    }
    res.certified_by_alternating_projections = certified;

    // Phase 2: maximize the smallest eigenvalue over completions.
    if (!certified) {
        std::vector<int> free_labels;
        for (size_t l = 0; l < set.num_labels(); l++) {
            if (!set.is_linked(static_cast<int>(l))) {
                free_labels.push_back(static_cast<int>(l));
            }
        }
        const Eigen::Index nf = static_cast<Eigen::Index>(free_labels.size());
        BarrierProblem pr;
        pr.num_vars = nf + 1;
        Eigen::MatrixXd f0 = Eigen::MatrixXd::Zero(set.dim(), set.dim());
        for (size_t l = 0; l < set.num_labels(); l++) {
            if (set.is_linked(static_cast<int>(l))) {
                f0 += fit[l] * set.label_indicator(static_cast<int>(l));
            }
        }
        pr.lmi.push_back(f0);
        for (int l : free_labels) {
            pr.lmi.push_back(set.label_indicator(l));
        }
        pr.lmi.push_back(-Eigen::MatrixXd::Identity(set.dim(), set.dim()));
        pr.objective = [nf](const Eigen::VectorXd &z, Eigen::VectorXd *g, Eigen::MatrixXd *) {
            if (g) {
                (*g)[nf] = -1.0;
            }
            return -z[nf];
        };
        Eigen::VectorXd z0(nf + 1);
        for (Eigen::Index k = 0; k < nf; k++) {
            z0[k] = set.interior_moments()[static_cast<size_t>(free_labels[static_cast<size_t>(k)])];
        }
        std::vector<double> start = fit;
        for (Eigen::Index k = 0; k < nf; k++) {
            start[static_cast<size_t>(free_labels[static_cast<size_t>(k)])] = z0[k];
        }
        z0[nf] = min_eigenvalue(set.matrix(start)) - 1.0;
        BarrierOptions bo;
        bo.tol = std::max(1e-2 * tol, 1e-11);
        bo.max_newton_steps = options.max_newton_steps;
        bo.stop = [nf](const Eigen::VectorXd &z, double) { return z[nf] > 0.0; };
        BarrierResult br = barrier_minimize(pr, z0, bo);
        res.iterations += br.newton_steps;
        if (!br.converged && !br.stopped_early) {
            throw IterationLimit("project_to_moment_set: barrier solve exhausted its Newton budget");
        }
        for (Eigen::Index k = 0; k < nf; k++) {
            start[static_cast<size_t>(free_labels[static_cast<size_t>(k)])] = br.z[k];
        }
        // The iterate is strictly feasible, so the completion's spectrum lies above z[nf].
        s = std::max(br.z[nf], min_eigenvalue(set.matrix(start)));
    }
    res.min_eigenvalue = s;

    // Mix toward the uniform correlation until the completion is PSD and every
    // probability is nonnegative.
    double lambda0 = min_eigenvalue(set.matrix(set.interior_moments()));
    double tau = s >= 0.0 ? 0.0 : -s / (lambda0 - s);
    const double u = 1.0 / static_cast<double>(set.scenario().cells_per_setting());
    for (double q : p_ns) {
        if (q < 0.0) {
            tau = std::max(tau, -q / (u - q));
        }
    }
    res.nearest.resize(p_ns.size());
    double d2 = 0.0;
    for (size_t c = 0; c < p_ns.size(); c++) {
        res.nearest[c] = (1.0 - tau) * p_ns[c] + tau * u;
        double d = p.at(c) - res.nearest[c];
        d2 += d * d;
    }
    res.distance = std::sqrt(d2);
    res.member = res.distance < tol;
    return res;
}

double max_functional_bound(std::span<const double> coeffs, const MomentSet &set) {
    return PolytopeSet::build(PolytopeKind::NS, set.scenario()).maximize_bell_functional(coeffs).value;
}

}  // namespace bellxt
