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

#include "bellxt/io.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "bellxt/errors.hpp"

using namespace bellxt;
using nlohmann::json;

namespace {

TrialLog parse(const std::string &text, std::optional<Scenario> sc = std::nullopt) {
    std::istringstream in(text);
    return read_trial_log(in, sc);
}

template <typename E>
int64_t line_of(const std::string &text) {
    try {
        parse(text);
    } catch (const E &e) {
        return e.line;
    }
    return -1;
}

PbrReport synthetic_report(int64_t id, const std::vector<double> &p) {
    PbrReport r;
    r.test_id = id;
    r.n_trials = 1800;
    r.n_est = 600;
    const Hypothesis order[] = {Hypothesis::L, Hypothesis::Q1AB, Hypothesis::NS, Hypothesis::OWNS_AnotB,
                                Hypothesis::OWNS_BnotA};
    for (size_t i = 0; i < p.size(); i++) {
        HypothesisOutcome o;
        o.hypothesis = order[i];
        o.p_upper = p[i];
        o.log_t = p[i] >= 1 ? 0.0 : -std::log(p[i]);
        o.rejected = p[i] < 0.05;
        r.outcomes.push_back(o);
    }
    apply_indirect_rejection(r.outcomes);
    return r;
}

std::string csv_of(const std::vector<PbrReport> &reports) {
    auto s = summarize(reports, {0.05, 0.01}, 0.025, "sim", "0-1", "cl");
    std::ostringstream os;
    write_summary_csv(os, s, "0123456789abcdef", 7);
    return os.str();
}

}  // namespace

TEST(Ingest, WellFormed) {
    TrialLog log = parse(
        "{\"test_id\":0,\"trial_index\":0,\"x\":0,\"y\":1,\"a\":1,\"b\":0}\n"
        "\n"
        "{\"test_id\":0,\"trial_index\":1,\"x\":1,\"y\":1,\"a\":0,\"b\":0}\n"
        "{\"b\":1,\"a\":1,\"y\":0,\"x\":0,\"trial_index\":0,\"test_id\":3}\n");
    ASSERT_EQ(log.records.size(), 3u);
    EXPECT_EQ(log.records[0], (TrialRecord{0, 0, 0, 1, 1, 0}));
    EXPECT_EQ(log.records[2], (TrialRecord{3, 0, 0, 0, 1, 1}));
    EXPECT_FALSE(log.header.has_value());
    auto groups = log.by_test();
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(groups[0].size(), 2u);
    EXPECT_EQ(groups[1][0].test_id, 3);
}

TEST(Ingest, ErrorsCarryLineNumbers) {
    const std::string good = "{\"test_id\":0,\"trial_index\":0,\"x\":0,\"y\":0,\"a\":0,\"b\":0}\n";
    EXPECT_EQ(line_of<RangeError>(good + "{\"test_id\":0,\"trial_index\":1,\"x\":0,\"y\":0,\"a\":2,\"b\":0}\n"), 2);
    EXPECT_EQ(line_of<RangeError>("{\"test_id\":-1,\"trial_index\":1,\"x\":0,\"y\":0,\"a\":0,\"b\":0}\n"), 1);
    EXPECT_EQ(line_of<ParseError>(good + "\n{\"test_id\":0,\n"), 3);
    EXPECT_EQ(line_of<ParseError>(good + "{\"test_id\":0,\"trial_index\":1,\"x\":0,\"y\":0,\"a\":0}\n"), 2);
    EXPECT_EQ(line_of<ParseError>(good + "{\"test_id\":0,\"trial_index\":1,\"x\":0.5,\"y\":0,\"a\":0,\"b\":0}\n"), 2);
    EXPECT_EQ(line_of<ParseError>(good + "[1,2]\n"), 2);
    EXPECT_EQ(line_of<ParseError>(good + "{\"format_version\":1}\n"), 2);
    EXPECT_EQ(line_of<ParseError>("{\"format_version\":9}\n"), 1);
    try {
        parse(good + good);
        FAIL() << "expected DuplicateTrial";
    } catch (const DuplicateTrial &e) {
        EXPECT_EQ(e.test_id, 0);
        EXPECT_EQ(e.trial_index, 0);
    }
}

TEST(Ingest, HeaderDefinesScenario) {
    const std::string rec = "{\"test_id\":0,\"trial_index\":0,\"x\":2,\"y\":0,\"a\":0,\"b\":0}\n";
    EXPECT_THROW(parse(rec), RangeError);
    TrialLog log = parse("{\"format_version\":1,\"scenario\":{\"n_x\":3,\"n_y\":2,\"n_a\":2,\"n_b\":2}}\n" + rec);
    EXPECT_EQ(log.scenario.n_x(), 3);
    EXPECT_EQ(log.records.size(), 1u);
    EXPECT_NO_THROW(parse(rec, Scenario(3, 2, 2, 2)));
}

TEST(Ingest, ByteLevelRoundTrip) {
    Scenario sc;
    CampaignPlan plan{300, 4, 31, true};
    auto recs = sample_campaign(CircuitKind::CNL, NoiseModel{{0.1, 0.2, 0.05}, {}}, plan, sc);
    RunConfig cfg;
    std::ostringstream first;
    write_trial_log(first, sc, recs, cfg.to_json());
    std::istringstream in(first.str());
    TrialLog log = read_trial_log(in);
    EXPECT_EQ(log.records, recs);
    ASSERT_TRUE(log.header.has_value());
    EXPECT_EQ(log.header->at("config_hash"), config_hash(cfg.to_json()));
    std::ostringstream second;
    write_trial_log(second, log.scenario, log.records, log.header->at("config"));
    EXPECT_EQ(first.str(), second.str());
}

TEST(Config, PrecedenceAndValidation) {
    RunConfig defaults;
    RunConfig file = RunConfig::merged(defaults, json{{"n_est", 500}, {"alpha", 0.01}, {"hypotheses", "ns,l"}});
    RunConfig flags = RunConfig::merged(file, json{{"n_est", 400}});
    EXPECT_EQ(flags.protocol.n_est, 400);
    EXPECT_EQ(flags.protocol.alpha, 0.01);
    EXPECT_EQ(flags.protocol.hypotheses, (std::vector<Hypothesis>{Hypothesis::NS, Hypothesis::L}));
    EXPECT_THROW(RunConfig::merged(defaults, json{{"n_estimate", 1}}), InvalidArgument);
    EXPECT_THROW(RunConfig::merged(defaults, json{{"n_est", "many"}}), InvalidArgument);
    EXPECT_THROW(RunConfig::merged(defaults, json{{"hypotheses", "ns,q7"}}), InvalidArgument);
    EXPECT_THROW(RunConfig::merged(defaults, json{{"regularize", "maybe"}}), InvalidArgument);
    RunConfig bad = RunConfig::merged(defaults, json{{"drift", "0-10:gamma_ba=0.1"}});
    EXPECT_THROW(bad.validate(), InvalidArgument);
    // to_json round-trips through merged.
    RunConfig back = RunConfig::merged(defaults, flags.to_json());
    EXPECT_EQ(back.to_json(), flags.to_json());
}

TEST(Config, HashIsStableAndSensitive) {
    RunConfig a;
    RunConfig b;
    EXPECT_EQ(config_hash(a.to_json()), config_hash(b.to_json()));
    b.plan.seed = 1;
    EXPECT_NE(config_hash(a.to_json()), config_hash(b.to_json()));
    EXPECT_EQ(config_hash(a.to_json()).size(), 16u);
    // FNV-1a reference value for the empty object "{}".
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : std::string("{}")) {
        h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    }
    char want[17];
    std::snprintf(want, sizeof(want), "%016llx", static_cast<unsigned long long>(h));
    EXPECT_EQ(config_hash(json::object()), want);
}

TEST(Reports, JsonRoundTrip) {
    PbrReport r = synthetic_report(5, {0.01, 0.2, 1.0, 1.0, 0.04});
    r.outcomes[2].log_t = -std::numeric_limits<double>::infinity();
    r.outcomes[0].pbrs.ratios = {0.5, 1.25, 0.0, 2.0};
    r.outcomes[0].pbrs.validity_polytope = PolytopeKind::L;
    json j = report_to_json(r);
    EXPECT_EQ(j.at("hypotheses").at(2).at("log_t"), "-inf");
    PbrReport back = report_from_json(json::parse(j.dump()));
    EXPECT_EQ(back.test_id, 5);
    ASSERT_EQ(back.outcomes.size(), 5u);
    for (size_t i = 0; i < 5; i++) {
        EXPECT_EQ(back.outcomes[i].hypothesis, r.outcomes[i].hypothesis);
        EXPECT_EQ(back.outcomes[i].log_t, r.outcomes[i].log_t);
        EXPECT_EQ(back.outcomes[i].p_upper, r.outcomes[i].p_upper);
        EXPECT_EQ(back.outcomes[i].rejected, r.outcomes[i].rejected);
        EXPECT_EQ(back.outcomes[i].indirect, r.outcomes[i].indirect);
    }
    EXPECT_EQ(back.outcomes[0].pbrs.ratios, r.outcomes[0].pbrs.ratios);
    EXPECT_EQ(back.outcomes[0].pbrs.validity_polytope, PolytopeKind::L);
    EXPECT_THROW(report_from_json(json{{"format_version", 1}}), InvalidArgument);
}

TEST(Summary, NoRejections) {
    std::vector<PbrReport> reports;
    for (int i = 0; i < 100; i++) {
        reports.push_back(synthetic_report(i, {1, 1, 1, 1, 1}));
    }
    auto s = summarize(reports, {0.05, 0.01}, 0.025, "sim", "0-1", "cnl");
    for (size_t h = 0; h < 5; h++) {
        EXPECT_EQ(s.direct[h], (std::vector<int64_t>{0, 0}));
        EXPECT_EQ(s.indirect[h], (std::vector<int64_t>{0, 0}));
        EXPECT_EQ(s.histogram[h].size(), 40u);
        EXPECT_EQ(s.histogram[h].back(), 100);
    }
}

TEST(Summary, CountsAtEachAlpha) {
    std::vector<PbrReport> reports;
    for (int i = 0; i < 40; i++) {
        // 19 tests below 0.05 for Q1AB, 5 of them also below 0.01.
        const double q = i < 5 ? 0.005 : (i < 19 ? 0.03 : 0.5);
        reports.push_back(synthetic_report(i, {1, q, 1, 1, 1}));
    }
    auto s = summarize(reports, {0.05, 0.01}, 0.025, "sim", "0-1", "cnl");
    EXPECT_EQ(s.direct[1], (std::vector<int64_t>{19, 5}));
    EXPECT_EQ(s.indirect[0], (std::vector<int64_t>{19, 5}));  // L sits inside Q1AB
    EXPECT_EQ(s.indirect[2], (std::vector<int64_t>{0, 0}));
    int64_t total = 0;
    for (auto c : s.histogram[1]) {
        total += c;
    }
    EXPECT_EQ(total, 40);
    EXPECT_EQ(s.histogram[1][0], 5);
    EXPECT_EQ(s.histogram[1][1], 14);
}

TEST(Summary, IndirectNsIsUnionOfDirectRejections) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 0.2);
    std::vector<PbrReport> reports;
    for (int i = 0; i < 200; i++) {
        reports.push_back(synthetic_report(i, {u(rng), u(rng), u(rng), u(rng), u(rng)}));
    }
    auto s = summarize(reports, {0.05, 0.01}, 0.025, "sim", "0-1", "cl");
    for (size_t a = 0; a < 2; a++) {
        const double alpha = s.alphas[a];
        std::set<int64_t> ns, ab, ba;
        for (const auto &r : reports) {
            if (r.outcomes[2].p_upper < alpha) ns.insert(r.test_id);
            if (r.outcomes[3].p_upper < alpha) ab.insert(r.test_id);
            if (r.outcomes[4].p_upper < alpha) ba.insert(r.test_id);
        }
        std::set<int64_t> all = ns;
        all.insert(ab.begin(), ab.end());
        all.insert(ba.begin(), ba.end());
        EXPECT_EQ(s.indirect[2][a], static_cast<int64_t>(all.size()));
        EXPECT_EQ(s.direct[2][a], static_cast<int64_t>(ns.size()));
    }
}

TEST(Summary, PermutationInvariant) {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<PbrReport> reports;
    for (int i = 0; i < 50; i++) {
        reports.push_back(synthetic_report(i, {u(rng), u(rng), u(rng), u(rng), u(rng)}));
    }
    const std::string want = csv_of(reports);
    std::shuffle(reports.begin(), reports.end(), rng);
    EXPECT_EQ(csv_of(reports), want);
    EXPECT_NE(want.find("# format_version=1\n# config_hash=0123456789abcdef,seed=7\n"), std::string::npos);
}

TEST(Summary, MixedConfigurationsRejected) {
    auto a = synthetic_report(0, {1, 1, 1, 1, 1});
    auto b = synthetic_report(1, {1, 1, 1, 1, 1});
    b.n_est = 500;
    EXPECT_THROW(summarize({a, b}, {0.05}, 0.025, "", "", ""), InvalidArgument);
    EXPECT_THROW(summarize({a}, {1.5}, 0.025, "", "", ""), InvalidArgument);
    EXPECT_THROW(summarize({a}, {0.05}, 0.0, "", "", ""), InvalidArgument);
}

TEST(Summary, HistogramEdges) {
    EXPECT_EQ(histogram_bins(0.025), 40u);
    EXPECT_EQ(histogram_bins(0.3), 4u);
    EXPECT_EQ(histogram_bin(0.0, 0.025), 0u);
    EXPECT_EQ(histogram_bin(0.0249, 0.025), 0u);
    EXPECT_EQ(histogram_bin(0.025, 0.025), 1u);
    EXPECT_EQ(histogram_bin(0.05, 0.025), 2u);
    EXPECT_EQ(histogram_bin(0.999, 0.025), 39u);
    EXPECT_EQ(histogram_bin(1.0, 0.025), 39u);
}
