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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bellxt/errors.hpp"
#include "qubit_oracle.hpp"
#include "test_util.hpp"

using namespace bellxt;

namespace {

const double kTsirelson = 2.0 * std::sqrt(2.0);

double min_eig(const Eigen::MatrixXd &m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues()[0];
}

Correlation isotropic_pr(const Scenario &sc, double v) {
    return testutil::mixture({pr_box(sc), Correlation::uniform(sc)}, {v, 1 - v});
}

}  // namespace

TEST(MomentSet, BasisSizes) {
    Scenario sc;
    MomentSet one = MomentSet::build(MomentLevel::One, sc);
    MomentSet ab = MomentSet::build(MomentLevel::OnePlusAB, sc);
    EXPECT_EQ(one.dim(), 5);
    EXPECT_EQ(ab.dim(), 9);
    EXPECT_EQ(one.basis()[1].str(), "A0");
    EXPECT_EQ(ab.basis()[8].str(), "A1B1");
    // 1, A0, A1, B0, B1, A0A1, B0B1 and the four AxBy.
    EXPECT_EQ(one.num_labels(), 11u);
    EXPECT_EQ(one.entry_label(0, 0), 0);
    EXPECT_EQ(one.entry_label(1, 1), one.alice_label(0));  // A0 A0 = A0
    EXPECT_EQ(one.entry_label(1, 2), one.entry_label(2, 1));
    EXPECT_THROW(MomentSet::build(MomentLevel::One, Scenario(3, 2, 2, 2)), UnsupportedScenario);
}

TEST(MomentSet, LinkageRowsAreNormalized) {
    Scenario sc;
    std::mt19937_64 rng(3);
    for (auto level : {MomentLevel::One, MomentLevel::OnePlusAB}) {
        MomentSet set = MomentSet::build(level, sc);
        std::vector<double> m(set.num_labels());
        for (auto &v : m) {
            v = testutil::uniform01(rng);
        }
        m[0] = 1.0;
        std::vector<double> q = set.probabilities(m);
        for (size_t s = 0; s < 4; s++) {
            EXPECT_NEAR(q[4 * s] + q[4 * s + 1] + q[4 * s + 2] + q[4 * s + 3], 1.0, 1e-15);
        }
    }
}

// The fair-coin moments are the Gram matrix of indicator functions on the 16
// equally likely outcomes of four independent bits.
TEST(MomentSet, InteriorPointIsFairCoinGramMatrix) {
    Scenario sc;
    for (auto level : {MomentLevel::One, MomentLevel::OnePlusAB}) {
        MomentSet set = MomentSet::build(level, sc);
        const auto n = set.dim();
        Eigen::MatrixXd feats(16, n);
        for (int o = 0; o < 16; o++) {
            int bits[2][2] = {{(o >> 3) & 1, (o >> 2) & 1}, {(o >> 1) & 1, o & 1}};
            for (Eigen::Index i = 0; i < n; i++) {
                double v = 1.0;
                for (int x : set.basis()[static_cast<size_t>(i)].alice) {
                    v *= bits[0][x] == 0;
                }
                for (int y : set.basis()[static_cast<size_t>(i)].bob) {
                    v *= bits[1][y] == 0;
                }
                feats(o, i) = v;
            }
        }
        Eigen::MatrixXd gram = feats.transpose() * feats / 16.0;
        Eigen::MatrixXd g = set.matrix(set.interior_moments());
        EXPECT_LT((gram - g).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_GT(min_eig(g), 1e-3);
        for (double q : set.probabilities(set.interior_moments())) {
            EXPECT_DOUBLE_EQ(q, 0.25);
        }
    }
}

TEST(MomentProjection, UniformIsMember) {
    Scenario sc;
    for (auto level : {MomentLevel::One, MomentLevel::OnePlusAB}) {
        MomentProjection r = project_to_moment_set(Correlation::uniform(sc), MomentSet::build(level, sc), 1e-9);
        EXPECT_TRUE(r.member);
        EXPECT_LT(r.distance, 1e-12);
        EXPECT_TRUE(r.certified_by_alternating_projections);
    }
}

TEST(MomentProjection, PrBoxIsOutsideLevelOne) {
    Scenario sc;
    MomentSet set = MomentSet::build(MomentLevel::One, sc);
    // Oracle: the CHSH operator of any qubit realization is bounded by 2 sqrt 2.
    double best = 0.0;
    for (int i = 0; i < 64; i++) {
        double t = M_PI * i / 64;
        best = std::max(best, testutil::chsh_operator_max_eigenvalue(0, M_PI / 2, t, t - M_PI / 2));
    }
    EXPECT_NEAR(best, kTsirelson, 1e-3);
    MomentProjection r = project_to_moment_set(pr_box(sc), set, 1e-9);
    EXPECT_FALSE(r.member);
    // CHSH changes by at most 4 per unit of Euclidean distance (each cell weight is +-1),
    // so any point of the set is at least (4 - 2 sqrt 2) / 4 away from the PR box.
    EXPECT_GE(r.distance, (4 - kTsirelson) / 4 - 1e-9);
    EXPECT_LT(r.distance, 1.0);
    EXPECT_LE(bell_functional(Correlation::renormalized(sc, r.nearest), chsh_coefficients(sc)), kTsirelson + 1e-6);
}

TEST(MomentProjection, TsirelsonRealizationIsMember) {
    Scenario sc;
    testutil::QubitModel model = testutil::tsirelson_model();
    Correlation p = Correlation::renormalized(sc, model.probabilities(sc));
    EXPECT_NEAR(bell_functional(p, chsh_coefficients(sc)), kTsirelson, 1e-12);
    for (auto level : {MomentLevel::One, MomentLevel::OnePlusAB}) {
        MomentSet set = MomentSet::build(level, sc);
        // Independent certificate: the realization's own moment matrix.
        Eigen::MatrixXd g = model.moment_matrix(set);
        EXPECT_GT(min_eig(g), -1e-12);
        std::vector<double> fit = set.fit_moments(p);
        EXPECT_NEAR(g(0, 1), fit[static_cast<size_t>(set.alice_label(0))], 1e-12);
        EXPECT_NEAR(g(1, 3), fit[static_cast<size_t>(set.joint_label(0, 0))], 1e-12);
        MomentProjection r = project_to_moment_set(p, set, 1e-6);
        EXPECT_TRUE(r.member) << to_string(level) << " distance " << r.distance;
    }
}

TEST(MomentProjection, IsotropicPrBoundaryAtLevelOne) {
    Scenario sc;
    MomentSet set = MomentSet::build(MomentLevel::One, sc);
    // CHSH of v PR + (1 - v) U is 4v, so the Tsirelson bound puts the boundary at v = 1/sqrt 2.
    EXPECT_TRUE(project_to_moment_set(isotropic_pr(sc, 0.70), set, 1e-7).member);
    EXPECT_FALSE(project_to_moment_set(isotropic_pr(sc, 0.72), set, 1e-7).member);
}

TEST(MomentProjection, Idempotent) {
    Scenario sc;
    std::mt19937_64 rng(41);
    auto vertices = testutil::ns_vertices(sc);
    for (auto level : {MomentLevel::One, MomentLevel::OnePlusAB}) {
        MomentSet set = MomentSet::build(level, sc);
        for (int i = 0; i < 20; i++) {
            Correlation p = testutil::random_mixture(vertices, rng);
            MomentProjection r = project_to_moment_set(p, set, 1e-7);
            Correlation q = Correlation::renormalized(sc, r.nearest);
            MomentProjection again = project_to_moment_set(q, set, 1e-7);
            EXPECT_TRUE(again.member);
            EXPECT_LE(again.distance, 1e-7);
        }
    }
}

TEST(MomentProjection, LocalPointsAreMembers) {
    Scenario sc;
    std::mt19937_64 rng(42);
    auto det = deterministic_vertices(sc);
    for (auto level : {MomentLevel::One, MomentLevel::OnePlusAB}) {
        MomentSet set = MomentSet::build(level, sc);
        for (int i = 0; i < 16; i++) {
            EXPECT_TRUE(project_to_moment_set(det[static_cast<size_t>(i)], set, 1e-7).member) << i;
            EXPECT_TRUE(project_to_moment_set(testutil::random_mixture(det, rng), set, 1e-7).member);
        }
    }
}

TEST(MomentProjection, SignalingTablesAreNotMembers) {
    Scenario sc;
    std::mt19937_64 rng(43);
    MomentSet set = MomentSet::build(MomentLevel::OnePlusAB, sc);
    for (int i = 0; i < 20; i++) {
        Correlation p = testutil::random_correlation(sc, rng);
        if (signaling_deficit(p).b_to_a > 1e-3) {
            EXPECT_FALSE(project_to_moment_set(p, set, 1e-7).member);
        }
    }
}

TEST(MomentProjection, RequiresPositiveTolerance) {
    Scenario sc;
    EXPECT_THROW(
        project_to_moment_set(Correlation::uniform(sc), MomentSet::build(MomentLevel::One, sc), 0.0), InvalidArgument);
}

TEST(MaxFunctionalBound, NoSignalingValues) {
    Scenario sc;
    MomentSet set = MomentSet::build(MomentLevel::One, sc);
    std::vector<double> ones(16, 1.0);
    EXPECT_NEAR(max_functional_bound(ones, set), 1.0, 1e-12);
    EXPECT_NEAR(max_functional_bound(chsh_coefficients(sc), set), 4.0, 1e-9);
}

// Projected gradient ascent of CHSH over level-1 moment matrices, projecting
// with the Dykstra operator, reaches the Tsirelson bound.
TEST(MomentSet, ChshMaximumOverLevelOneIsTsirelson) {
    Scenario sc;
    MomentSet set = MomentSet::build(MomentLevel::One, sc);
    // CHSH = sum_xy s_xy (1 - 2<A_x> - 2<B_y> + 4<A_xB_y>), written per label.
    std::vector<double> coeff(set.num_labels(), 0.0);
    for (int x = 0; x < 2; x++) {
        for (int y = 0; y < 2; y++) {
            double sgn = (x & y) ? -1.0 : 1.0;
            coeff[0] += sgn;
            coeff[static_cast<size_t>(set.alice_label(x))] -= 2 * sgn;
            coeff[static_cast<size_t>(set.bob_label(y))] -= 2 * sgn;
            coeff[static_cast<size_t>(set.joint_label(x, y))] += 4 * sgn;
        }
    }
    std::vector<int> count(set.num_labels(), 0);
    for (Eigen::Index i = 0; i < set.dim(); i++) {
        for (Eigen::Index j = 0; j < set.dim(); j++) {
            count[static_cast<size_t>(set.entry_label(i, j))]++;
        }
    }
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(set.dim(), set.dim());
    for (size_t l = 1; l < set.num_labels(); l++) {
        grad += coeff[l] / count[l] * set.label_indicator(static_cast<int>(l));
    }
    auto chsh_of = [&](const Eigen::MatrixXd &g) {
        double v = coeff[0];
        for (Eigen::Index i = 0; i < set.dim(); i++) {
            for (Eigen::Index j = 0; j < set.dim(); j++) {
                size_t l = static_cast<size_t>(set.entry_label(i, j));
                if (l != 0) {
                    v += coeff[l] / count[l] * g(i, j);
                }
            }
        }
        return v;
    };
    std::vector<std::optional<double>> fixed(set.num_labels());
    fixed[0] = 1.0;
    Eigen::MatrixXd g = set.matrix(set.interior_moments());
    for (int k = 0; k < 300; k++) {
        g = dykstra_project(set, g + 0.05 * grad, fixed, 200);
    }
    EXPECT_GT(min_eig(g), -1e-4);
    EXPECT_NEAR(chsh_of(g), kTsirelson, 1e-3);
}
