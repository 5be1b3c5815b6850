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

#include "bellxt/sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "bellxt/errors.hpp"

namespace bellxt {

namespace {

using cd = std::complex<double>;
using Gate = std::array<cd, 4>;  // row-major 2x2

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void apply_1q(StateVector &s, const Gate &g, int qubit) {
    // qubit 1 is the high bit of the index.
    const int stride = qubit == 1 ? 2 : 1;
    for (int base = 0; base < 4; base++) {
        if (base & stride) {
            continue;
        }
        cd a0 = s[static_cast<size_t>(base)];
        cd a1 = s[static_cast<size_t>(base | stride)];
        s[static_cast<size_t>(base)] = g[0] * a0 + g[1] * a1;
        s[static_cast<size_t>(base | stride)] = g[2] * a0 + g[3] * a1;
    }
}

void apply_cnot(StateVector &s) {
    std::swap(s[2], s[3]);
}

const Gate kH = {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
const Gate kZ = {1, 0, 0, -1};

Gate ry(double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return {c, -s, s, c};
}

Gate t_gate() {
    return {1, 0, 0, std::polar(1.0, M_PI / 4)};
}

double parse_probability(const std::string &text, const std::string &what) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception &) {
        throw InvalidArgument("drift: cannot parse " + what + " value '" + text + "'");
    }
    if (used != text.size()) {
        throw InvalidArgument("drift: cannot parse " + what + " value '" + text + "'");
    }
    return v;
}

void check_probability(double v, const std::string &what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidArgument(what + " must lie in [0, 1]");
    }
}

}  // namespace

std::string to_string(CircuitKind kind) {
    return kind == CircuitKind::CNL ? "cnl" : "cl";
}

std::optional<CircuitKind> parse_circuit(const std::string &name) {
    std::string s = name;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
    if (s == "cnl") {
        return CircuitKind::CNL;
    }
    if (s == "cl") {
        return CircuitKind::CL;
    }
    return std::nullopt;
}

StateVector prepare_state(CircuitKind kind) {
    StateVector s = {1, 0, 0, 0};
    if (kind == CircuitKind::CNL) {
        apply_1q(s, kH, 1);
        apply_cnot(s);
        apply_1q(s, kZ, 1);
        apply_1q(s, ry(M_PI / 4), 2);
    } else {
        apply_1q(s, t_gate(), 1);
    }
    return s;
}

Correlation ideal_correlation(CircuitKind kind, const Scenario &scenario) {
    if (!scenario.is_chsh()) {
        throw UnsupportedScenario("circuits are defined for the (2,2,2,2) scenario");
    }
    const StateVector prepared = prepare_state(kind);
    std::vector<double> p(16);
    for (int x = 0; x < 2; x++) {
        for (int y = 0; y < 2; y++) {
            StateVector s = prepared;
            if (x == 1) {
                apply_1q(s, kH, 1);
            }
            if (y == 1) {
                apply_1q(s, kH, 2);
            }
            for (int a = 0; a < 2; a++) {
                for (int b = 0; b < 2; b++) {
                    p[scenario.index(a, b, x, y)] = std::norm(s[static_cast<size_t>(2 * a + b)]);
                }
            }
        }
    }
    return Correlation::renormalized(scenario, std::move(p));
}

void NoiseModel::validate(int64_t n_trials) const {
    check_probability(base.gamma_ba, "gamma_ba");
    check_probability(base.gamma_ab, "gamma_ab");
    check_probability(base.depolarizing, "depolarizing");
    if (drift.empty()) {
        return;
    }
    int64_t expect = 0;
    for (const auto &seg : drift) {
        if (seg.begin != expect || seg.end <= seg.begin) {
            throw InvalidArgument("drift segments must partition [0, n_trials) in order");
        }
        for (const auto &[v, name] : {std::pair{seg.gamma_ba, "gamma_ba"}, std::pair{seg.gamma_ab, "gamma_ab"},
                                      std::pair{seg.depolarizing, "depolarizing"}}) {
            if (v) {
                check_probability(*v, name);
            }
        }
        expect = seg.end;
    }
    if (expect != n_trials) {
        throw InvalidArgument(
            "drift segments end at " + std::to_string(expect) + " but the campaign has " + std::to_string(n_trials) +
            " trials");
    }
}

NoiseParams NoiseModel::at(int64_t trial_index) const {
    NoiseParams p = base;
    for (const auto &seg : drift) {
        if (trial_index >= seg.begin && trial_index < seg.end) {
            p.gamma_ba = seg.gamma_ba.value_or(p.gamma_ba);
            p.gamma_ab = seg.gamma_ab.value_or(p.gamma_ab);
            p.depolarizing = seg.depolarizing.value_or(p.depolarizing);
            break;
        }
    }
    return p;
}

std::vector<DriftSegment> parse_drift(const std::string &schedule) {
    std::vector<DriftSegment> out;
    std::stringstream segs(schedule);
    std::string seg;
    while (std::getline(segs, seg, ';')) {
        if (seg.empty()) {
            continue;
        }
        auto colon = seg.find(':');
        auto dash = seg.find('-');
        if (colon == std::string::npos || dash == std::string::npos || dash > colon) {
            throw InvalidArgument("drift: expected 'begin-end:key=value,...' but got '" + seg + "'");
        }
        DriftSegment d;
        try {
            d.begin = std::stoll(seg.substr(0, dash));
            d.end = std::stoll(seg.substr(dash + 1, colon - dash - 1));
        } catch (const std::exception &) {
            throw InvalidArgument("drift: bad trial range in '" + seg + "'");
        }
        std::stringstream kvs(seg.substr(colon + 1));
        std::string kv;
        while (std::getline(kvs, kv, ',')) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw InvalidArgument("drift: expected key=value but got '" + kv + "'");
            }
            std::string key = kv.substr(0, eq);
            double v = parse_probability(kv.substr(eq + 1), key);
            if (key == "gamma_ba") {
                d.gamma_ba = v;
            } else if (key == "gamma_ab") {
                d.gamma_ab = v;
            } else if (key == "depolarizing") {
                d.depolarizing = v;
            } else {
                throw InvalidArgument("drift: unknown key '" + key + "'");
            }
        }
        out.push_back(d);
    }
    return out;
}

Correlation apply_noise(const Correlation &ideal, const NoiseParams &noise) {
    check_probability(noise.gamma_ba, "gamma_ba");
    check_probability(noise.gamma_ab, "gamma_ab");
    check_probability(noise.depolarizing, "depolarizing");
    const Scenario &sc = ideal.scenario();
    if (!sc.is_chsh()) {
        throw UnsupportedScenario("noise channels are defined for the (2,2,2,2) scenario");
    }
    std::vector<double> p(ideal.values());
    const double lam = noise.depolarizing;
    for (double &v : p) {
        v = (1 - lam) * v + lam * 0.25;
    }
    for (int x = 0; x < 2; x++) {
        for (int y = 0; y < 2; y++) {
            double q[2][2];
            for (int a = 0; a < 2; a++) {
                for (int b = 0; b < 2; b++) {
                    q[a][b] = p[sc.index(a, b, x, y)];
                }
            }
            if (y == 1) {
                const double g = noise.gamma_ba;
                for (int b = 0; b < 2; b++) {
                    double q0 = q[0][b], q1 = q[1][b];
                    q[0][b] = (1 - g) * q0 + g * q1;
                    q[1][b] = (1 - g) * q1 + g * q0;
                }
            }
            if (x == 1) {
                const double g = noise.gamma_ab;
                for (int a = 0; a < 2; a++) {
                    double q0 = q[a][0], q1 = q[a][1];
                    q[a][0] = (1 - g) * q0 + g * q1;
                    q[a][1] = (1 - g) * q1 + g * q0;
                }
            }
            for (int a = 0; a < 2; a++) {
                for (int b = 0; b < 2; b++) {
                    p[sc.index(a, b, x, y)] = q[a][b];
                }
            }
        }
    }
    return Correlation::renormalized(sc, std::move(p));
}

Correlation noisy_correlation(CircuitKind kind, const NoiseModel &noise, int64_t trial_index, const Scenario &scenario) {
    return apply_noise(ideal_correlation(kind, scenario), noise.at(trial_index));
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t master, uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x5EED5EEDULL));
}

double uniform01(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::pair<int, int>> draw_inputs(const Scenario &scenario, int64_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto &dist = scenario.input_dist();
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<size_t>(n));
    for (int64_t k = 0; k < n; k++) {
        double u = uniform01(rng);
        size_t s = 0;
        double acc = dist[0];
        while (u >= acc && s + 1 < dist.size()) {
            acc += dist[++s];
        }
        out.emplace_back(static_cast<int>(s) / scenario.n_y(), static_cast<int>(s) % scenario.n_y());
    }
    return out;
}

std::pair<int, int> sample_outcome(const Correlation &p, int x, int y, std::mt19937_64 &rng) {
    const Scenario &sc = p.scenario();
    double u = uniform01(rng);
    double acc = 0.0;
    int last_a = 0, last_b = 0;
    for (int a = 0; a < sc.n_a(); a++) {
        for (int b = 0; b < sc.n_b(); b++) {
            double w = p(a, b, x, y);
            if (w <= 0.0) {
                continue;
            }
            acc += w;
            last_a = a;
            last_b = b;
            if (u < acc) {
                return {a, b};
            }
        }
    }
    // u landed in the round-off gap above the row sum.
    return {last_a, last_b};
}

std::vector<TrialRecord> sample_test(
    const std::function<Correlation(int64_t)> &source, std::span<const std::pair<int, int>> inputs, int64_t test_id,
    uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TrialRecord> out;
    out.reserve(inputs.size());
    for (size_t k = 0; k < inputs.size(); k++) {
        auto [x, y] = inputs[k];
        Correlation p = source(static_cast<int64_t>(k));
        auto [a, b] = sample_outcome(p, x, y, rng);
        out.push_back({test_id, static_cast<int64_t>(k), x, y, a, b});
    }
    return out;
}

std::vector<TrialRecord> sample_campaign(
    CircuitKind kind, const NoiseModel &noise, const CampaignPlan &plan, const Scenario &scenario) {
    if (plan.n_trials < 1 || plan.n_tests < 1) {
        throw InvalidArgument("campaign needs at least one trial and one test");
    }
    noise.validate(plan.n_trials);
    // One correlation per distinct noise setting; drift has few segments.
    const Correlation ideal = ideal_correlation(kind, scenario);
    std::vector<size_t> which(static_cast<size_t>(plan.n_trials));
    std::vector<Correlation> tables;
    std::vector<NoiseParams> seen;
    for (int64_t k = 0; k < plan.n_trials; k++) {
        NoiseParams np = noise.at(k);
        auto it = std::find(seen.begin(), seen.end(), np);
        if (it == seen.end()) {
            seen.push_back(np);
            tables.push_back(apply_noise(ideal, np));
            it = seen.end() - 1;
        }
        which[static_cast<size_t>(k)] = static_cast<size_t>(it - seen.begin());
    }
    auto source = [&](int64_t k) { return tables[which[static_cast<size_t>(k)]]; };

    std::vector<std::pair<int, int>> shared;
    if (!plan.independent_inputs) {
        shared = draw_inputs(scenario, plan.n_trials, derive_seed(plan.seed, 0));
    }
    std::vector<TrialRecord> out;
    out.reserve(static_cast<size_t>(plan.n_trials * plan.n_tests));
    for (int64_t i = 0; i < plan.n_tests; i++) {
        const uint64_t ui = static_cast<uint64_t>(i);
        std::vector<std::pair<int, int>> own;
        if (plan.independent_inputs) {
            own = draw_inputs(scenario, plan.n_trials, derive_seed(plan.seed, 2 * ui + 2));
        }
        auto recs = sample_test(source, plan.independent_inputs ? own : shared, i, derive_seed(plan.seed, 2 * ui + 1));
        out.insert(out.end(), recs.begin(), recs.end());
    }
    return out;
}

}  // namespace bellxt
