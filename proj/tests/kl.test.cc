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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bellxt/errors.hpp"
#include "kl_oracle.hpp"
#include "qubit_oracle.hpp"
#include "test_util.hpp"

using namespace bellxt;

namespace {

const Hypothesis kPolytopes[] = {Hypothesis::L, Hypothesis::NS, Hypothesis::OWNS_AnotB, Hypothesis::OWNS_BnotA};

// Alice's outcome is flipped with probability gamma when y = 1, applied to a
// random no-signaling table.
Correlation flip_alice_when_y1(const Correlation &p, double gamma) {
    const Scenario &sc = p.scenario();
    std::vector<double> q(p.values());
    for (int x = 0; x < 2; x++) {
        for (int b = 0; b < 2; b++) {
            double p0 = p(0, b, x, 1), p1 = p(1, b, x, 1);
            q[sc.index(0, b, x, 1)] = (1 - gamma) * p0 + gamma * p1;
            q[sc.index(1, b, x, 1)] = (1 - gamma) * p1 + gamma * p0;
        }
    }
    return Correlation::renormalized(sc, q);
}

}  // namespace

TEST(KlDivergence, ClosedForms) {
    Scenario sc;
    std::mt19937_64 rng(1);
    Correlation f = testutil::random_correlation(sc, rng);
    EXPECT_EQ(kl_divergence(f, f), 0.0);
    std::vector<double> one(16, 0.0);
    for (size_t s = 0; s < 4; s++) {
        one[4 * s + s % 4] = 1.0;
    }
    EXPECT_NEAR(kl_divergence(Correlation(sc, one), Correlation::uniform(sc)), std::log(4.0), 1e-15);
    EXPECT_EQ(kl_divergence(Correlation::uniform(sc), Correlation(sc, one)), kInfiniteDivergence);
    for (int i = 0; i < 20; i++) {
        EXPECT_GE(kl_divergence(testutil::random_correlation(sc, rng), testutil::random_correlation(sc, rng)), 0.0);
    }
}

TEST(KlDivergence, UsesInputDistribution) {
    Scenario sc(2, 2, 2, 2, {0.7, 0.1, 0.1, 0.1});
    std::vector<double> one(16, 0.25);
    one[0] = 1.0;
    one[1] = one[2] = one[3] = 0.0;
    EXPECT_NEAR(kl_divergence(Correlation(sc, one), Correlation::uniform(sc)), 0.7 * std::log(4.0), 1e-15);
}

// The PR box's KL projection onto L. Oracle 1: the symmetric family
// P_v = v/2 on the PR support, (1 - v)/2 off it, which is local for v <= 3/4,
// minimized by golden-section search. Oracle 2: EM over the 16 vertices.
TEST(KlProject, PrBoxOntoLocalSetMatchesOracles) {
    Scenario sc;
    Correlation pr = pr_box(sc);
    PolytopeSet lset = PolytopeSet::build(PolytopeKind::L, sc);
    auto family = [&](double v) {
        std::vector<double> p(16);
        for (size_t c = 0; c < 16; c++) {
            p[c] = pr.at(c) > 0 ? v / 2 : (1 - v) / 2;
        }
        return Correlation(sc, p);
    };
    double best_v = 0.5, best = kInfiniteDivergence;
    for (int i = 0; i <= 2500; i++) {
        double v = 0.5 + 0.25 * i / 2500.0;
        double d = kl_divergence(pr, family(v));
        if (d < best) {
            best = d;
            best_v = v;
        }
    }
    double lo = std::max(0.5, best_v - 1e-4), hi = std::min(0.75, best_v + 1e-4);
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int k = 0; k < 100; k++) {
        double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
        if (kl_divergence(pr, family(m1)) < kl_divergence(pr, family(m2))) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    double v_star = 0.5 * (lo + hi);
    EXPECT_TRUE(lset.contains(family(v_star), 1e-9));
    double grid_oracle = kl_divergence(pr, family(v_star));
    double em_oracle = testutil::vertex_em_kl(pr, lset.v_rep(), 200000);

    KlResult r = kl_project(pr, HypothesisSet::build(Hypothesis::L, sc));
    EXPECT_TRUE(r.certified);
    EXPECT_NEAR(r.divergence, grid_oracle, 1e-6);
    EXPECT_NEAR(r.divergence, em_oracle, 1e-6);
    EXPECT_LE(r.divergence - em_oracle, r.duality_gap + 1e-12);
}

TEST(KlProject, MembersProjectToThemselves) {
    Scenario sc;
    std::mt19937_64 rng(2);
    auto det = deterministic_vertices(sc);
    for (Hypothesis h : {Hypothesis::L, Hypothesis::Q1AB, Hypothesis::Q1, Hypothesis::NS, Hypothesis::OWNS_AnotB,
                         Hypothesis::OWNS_BnotA}) {
        HypothesisSet set = HypothesisSet::build(h, sc);
        Correlation f = testutil::mixture({testutil::random_mixture(det, rng), Correlation::uniform(sc)}, {0.8, 0.2});
        KlResult r = kl_project(f, set);
        EXPECT_TRUE(r.certified) << to_string(h);
        EXPECT_LE(r.divergence, set.is_polytope() ? kPolytopeKlTol : kMomentKlTol) << to_string(h);
        for (size_t c = 0; c < 16; c++) {
            EXPECT_NEAR(r.minimizer.at(c), f.at(c), 1e-3) << to_string(h);
        }
    }
}

TEST(KlProject, SignalingTableOntoNoSignaling) {
    Scenario sc;
    std::mt19937_64 rng(3);
    auto vertices = testutil::ns_vertices(sc);
    HypothesisSet ns = HypothesisSet::build(Hypothesis::NS, sc);
    for (double gamma : {0.05, 0.15, 0.3}) {
        Correlation f = flip_alice_when_y1(testutil::mixture({pr_box(sc), deterministic_vertices(sc)[5]}, {0.5, 0.5}), gamma);
        ASSERT_GT(signaling_deficit(f).b_to_a, 0.0);
        KlResult r = kl_project(f, ns);
        SignalingDeficit d = signaling_deficit(r.minimizer);
        EXPECT_LT(d.b_to_a, 1e-9);
        EXPECT_LT(d.a_to_b, 1e-9);
        EXPECT_GT(r.divergence, 0.0);
        double oracle = testutil::polytope_kl_oracle(f, ns.polytope());
        EXPECT_NEAR(r.divergence, oracle, 1e-8);
        // Still in OWNS_AnotB, so that projection is free.
        EXPECT_LE(kl_project(f, HypothesisSet::build(Hypothesis::OWNS_AnotB, sc)).divergence, kPolytopeKlTol);
    }
}

TEST(KlProject, MinimizersAreFeasible) {
    Scenario sc;
    std::mt19937_64 rng(4);
    for (Hypothesis h : all_hypotheses()) {
        HypothesisSet set = HypothesisSet::build(h, sc);
        for (int i = 0; i < 10; i++) {
            Correlation f = testutil::random_correlation(sc, rng);
            KlResult r = kl_project(f, set);
            EXPECT_TRUE(r.certified);
            EXPECT_TRUE(set.contains(r.minimizer, 1e-7)) << to_string(h);
            for (size_t c = 0; c < 16; c++) {
                EXPECT_GT(r.minimizer.at(c), 0.0);
            }
        }
    }
}

TEST(KlProject, DivergencesFollowInclusions) {
    Scenario sc;
    std::mt19937_64 rng(5);
    std::vector<HypothesisSet> sets;
    for (Hypothesis h : all_hypotheses()) {
        sets.push_back(HypothesisSet::build(h, sc));
    }
    auto vertices = testutil::ns_vertices(sc);
    for (int i = 0; i < 20; i++) {
        Correlation f = i % 2 ? testutil::random_correlation(sc, rng)
                              : testutil::mixture({testutil::random_mixture(vertices, rng), pr_box(sc)}, {0.5, 0.5});
        std::vector<double> d;
        for (const auto &s : sets) {
            d.push_back(kl_project(f, s).divergence);
        }
        const double slack = 2 * kMomentKlTol;
        EXPECT_GE(d[0] + slack, d[1]);
        EXPECT_GE(d[1] + slack, d[2]);
        EXPECT_GE(d[2] + slack, d[3]);
        EXPECT_GE(d[3] + slack, std::max(d[4], d[5]));
        EXPECT_GE(std::min(d[4], d[5]), 0.0);
    }
}

TEST(KlProject, GapBoundsSuboptimality) {
    Scenario sc;
    std::mt19937_64 rng(6);
    for (Hypothesis h : kPolytopes) {
        HypothesisSet set = HypothesisSet::build(h, sc);
        for (int i = 0; i < 50; i++) {
            Correlation f = testutil::random_correlation(sc, rng);
            KlResult r = kl_project(f, set);
            double oracle = testutil::polytope_kl_oracle(f, set.polytope());
            EXPECT_LE(r.divergence - oracle, r.duality_gap + 1e-11) << to_string(h) << " " << i;
            EXPECT_GE(r.divergence - oracle, -1e-11) << to_string(h) << " " << i;
            EXPECT_LE(r.duality_gap, kPolytopeKlTol);
        }
    }
}

TEST(KlProject, MinimizerIndependentOfStart) {
    Scenario sc;
    std::mt19937_64 rng(7);
    for (Hypothesis h : kPolytopes) {
        HypothesisSet set = HypothesisSet::build(h, sc);
        for (int i = 0; i < 5; i++) {
            Correlation f = testutil::random_correlation(sc, rng);
            KlOptions a;
            a.tol = 1e-14;
            KlOptions b = a;
            b.start_vertex = static_cast<size_t>(3 * i + 1);
            KlResult ra = kl_project(f, set, a);
            KlResult rb = kl_project(f, set, b);
            for (size_t c = 0; c < 16; c++) {
                EXPECT_NEAR(ra.minimizer.at(c), rb.minimizer.at(c), 1e-6) << to_string(h);
            }
        }
    }
}

TEST(KlProject, MomentSetsAgainstTsirelsonAndPrBox) {
    Scenario sc;
    Correlation t = Correlation::renormalized(sc, testutil::tsirelson_model().probabilities(sc));
    Correlation pr = pr_box(sc);
    for (Hypothesis h : {Hypothesis::Q1, Hypothesis::Q1AB}) {
        HypothesisSet set = HypothesisSet::build(h, sc);
        KlResult rt = kl_project(t, set);
        EXPECT_LT(rt.divergence, 1e-6);
        KlResult rp = kl_project(pr, set);
        EXPECT_TRUE(rp.certified);
        EXPECT_LE(bell_functional(rp.minimizer, chsh_coefficients(sc)), 2 * std::sqrt(2.0) + 1e-6);
        EXPECT_GT(rp.divergence, kl_project(pr, HypothesisSet::build(Hypothesis::NS, sc)).divergence + 0.01);
        EXPECT_LT(rp.divergence, kl_project(pr, HypothesisSet::build(Hypothesis::L, sc)).divergence);
    }
}

TEST(KlProject, ZeroCellsAndBudget) {
    Scenario sc;
    std::vector<double> p(16, 0.0);
    for (size_t s = 0; s < 4; s++) {
        p[4 * s] = 0.6;
        p[4 * s + 3] = 0.4;
    }
    Correlation f(sc, p);
    for (Hypothesis h : all_hypotheses()) {
        KlResult r = kl_project(f, HypothesisSet::build(h, sc));
        EXPECT_TRUE(r.certified);
        for (size_t c = 0; c < 16; c++) {
            if (f.at(c) > 0) {
                EXPECT_GT(r.minimizer.at(c), 0.0);
            }
        }
    }
    KlOptions tiny;
    tiny.max_iterations = 2;
    KlResult r = kl_project(pr_box(sc), HypothesisSet::build(Hypothesis::L, sc), tiny);
    EXPECT_FALSE(r.certified);
    EXPECT_GT(r.duality_gap, kPolytopeKlTol);
    KlOptions bad;
    bad.tol = 0.0;
    EXPECT_THROW(kl_project(f, HypothesisSet::build(Hypothesis::NS, sc), bad), InvalidArgument);
}

TEST(Hypothesis, NamesAndInclusions) {
    for (Hypothesis h : all_hypotheses()) {
        EXPECT_EQ(parse_hypothesis(to_string(h)), h);
    }
    EXPECT_EQ(parse_hypothesis("owns-ba"), Hypothesis::OWNS_BnotA);
    EXPECT_EQ(parse_hypothesis("q1ab"), Hypothesis::Q1AB);
    EXPECT_FALSE(parse_hypothesis("q3").has_value());
    EXPECT_TRUE(is_subset(Hypothesis::L, Hypothesis::OWNS_AnotB));
    EXPECT_TRUE(is_subset(Hypothesis::Q1AB, Hypothesis::Q1));
    EXPECT_FALSE(is_subset(Hypothesis::NS, Hypothesis::Q1));
    EXPECT_FALSE(is_subset(Hypothesis::OWNS_AnotB, Hypothesis::OWNS_BnotA));
}
