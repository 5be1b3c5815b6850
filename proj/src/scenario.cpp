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

#include "bellxt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bellxt/errors.hpp"

namespace bellxt {

namespace {

void require_chsh(const Scenario &scenario, const char *what) {
    if (!scenario.is_chsh()) {
        throw UnsupportedScenario(std::string(what) + " requires the (2,2,2,2) scenario");
    }
}

}  // namespace

Scenario::Scenario() : Scenario(2, 2, 2, 2) {}

Scenario::Scenario(int n_x, int n_y, int n_a, int n_b, std::vector<double> input_dist)
    : n_x_(n_x), n_y_(n_y), n_a_(n_a), n_b_(n_b), input_dist_(std::move(input_dist)) {
    if (n_x < 2 || n_y < 2 || n_a < 2 || n_b < 2) {
        throw InvalidArgument("scenario cardinalities must all be >= 2");
    }
    size_t settings = num_settings();
    if (input_dist_.empty()) {
        input_dist_.assign(settings, 1.0 / static_cast<double>(settings));
        return;
    }
    if (input_dist_.size() != settings) {
        throw InvalidArgument(
            "input distribution has " + std::to_string(input_dist_.size()) + " entries, expected " +
            std::to_string(settings));
    }
    double total = 0.0;
    for (double p : input_dist_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw InvalidArgument("input distribution entries must be finite and nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
        throw InvalidArgument("input distribution must sum to 1");
    }
}

std::vector<double> Scenario::cell_weights() const {
    std::vector<double> w(num_cells());
    size_t per = cells_per_setting();
    for (size_t s = 0; s < num_settings(); s++) {
        std::fill_n(w.begin() + s * per, per, input_dist_[s]);
    }
    return w;
}

Correlation::Correlation(Unchecked, Scenario scenario, std::vector<double> probs)
    : scenario_(std::move(scenario)), probs_(std::move(probs)) {}

Correlation::Correlation(Scenario scenario, std::vector<double> probs)
    : scenario_(std::move(scenario)), probs_(std::move(probs)) {
    if (probs_.size() != scenario_.num_cells()) {
        throw InvalidArgument(
            "correlation table has " + std::to_string(probs_.size()) + " entries, expected " +
            std::to_string(scenario_.num_cells()));
    }
    size_t per = scenario_.cells_per_setting();
    for (size_t s = 0; s < scenario_.num_settings(); s++) {
        double row = 0.0;
        for (size_t k = 0; k < per; k++) {
            double v = probs_[s * per + k];
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw InvalidArgument("correlation entries must be finite and nonnegative");
            }
            row += v;
        }
        if (std::abs(row - 1.0) > kNormalizationTol) {
            throw InvalidArgument("correlation row for setting " + std::to_string(s) + " does not sum to 1");
        }
    }
}

Correlation Correlation::renormalized(Scenario scenario, std::vector<double> probs) {
    if (probs.size() != scenario.num_cells()) {
        throw InvalidArgument("correlation table has the wrong number of entries");
    }
    size_t per = scenario.cells_per_setting();
    for (size_t s = 0; s < scenario.num_settings(); s++) {
        double row = 0.0;
        for (size_t k = 0; k < per; k++) {
            double &v = probs[s * per + k];
            if (!std::isfinite(v) || v < -kRenormalizeTol) {
                throw InvalidArgument("correlation entries must be finite and nonnegative");
            }
            v = std::max(v, 0.0);
            row += v;
        }
        if (std::abs(row - 1.0) > kRenormalizeTol) {
            throw InvalidArgument(
                "correlation row for setting " + std::to_string(s) + " is off by more than the renormalization tolerance");
        }
        for (size_t k = 0; k < per; k++) {
            probs[s * per + k] /= row;
        }
    }
    return Correlation(Unchecked{}, std::move(scenario), std::move(probs));
}

Correlation::Correlation() : Correlation(uniform(Scenario())) {}

Correlation Correlation::uniform(const Scenario &scenario) {
    return Correlation(
        Unchecked{}, scenario,
        std::vector<double>(scenario.num_cells(), 1.0 / static_cast<double>(scenario.cells_per_setting())));
}

CountsTable::CountsTable(const Scenario &scenario)
    : scenario_(scenario), counts_(scenario.num_cells(), 0), per_setting_(scenario.num_settings(), 0) {}

CountsTable CountsTable::from_trials(const Scenario &scenario, std::span<const TrialRecord> trials) {
    CountsTable table(scenario);
    for (const auto &t : trials) {
        table.add(t.a, t.b, t.x, t.y);
    }
    return table;
}

void CountsTable::add(int a, int b, int x, int y, int64_t times) {
    if (x < 0 || x >= scenario_.n_x() || y < 0 || y >= scenario_.n_y() || a < 0 || a >= scenario_.n_a() || b < 0 ||
        b >= scenario_.n_b()) {
        throw InvalidArgument("trial labels outside the scenario");
    }
    if (times < 0) {
        throw InvalidArgument("negative count");
    }
    counts_[scenario_.index(a, b, x, y)] += times;
    per_setting_[scenario_.setting_index(x, y)] += times;
    total_ += times;
}

Correlation frequencies_from_counts(const CountsTable &counts) {
    const Scenario &sc = counts.scenario();
    std::vector<double> f(sc.num_cells());
    for (int x = 0; x < sc.n_x(); x++) {
        for (int y = 0; y < sc.n_y(); y++) {
            int64_t n = counts.per_setting(x, y);
            if (n == 0) {
                throw EmptySetting(x, y);
            }
            for (int a = 0; a < sc.n_a(); a++) {
                for (int b = 0; b < sc.n_b(); b++) {
                    f[sc.index(a, b, x, y)] =
                        static_cast<double>(counts.count(a, b, x, y)) / static_cast<double>(n);
                }
            }
        }
    }
    return Correlation::renormalized(sc, std::move(f));
}

double marginal_a(const Correlation &p, int a, int x, int y) {
    double s = 0.0;
    for (int b = 0; b < p.scenario().n_b(); b++) {
        s += p(a, b, x, y);
    }
    return s;
}

double marginal_b(const Correlation &p, int b, int x, int y) {
    double s = 0.0;
    for (int a = 0; a < p.scenario().n_a(); a++) {
        s += p(a, b, x, y);
    }
    return s;
}

SignalingDeficit signaling_deficit(const Correlation &p) {
    const Scenario &sc = p.scenario();
    SignalingDeficit d;
    for (int x = 0; x < sc.n_x(); x++) {
        for (int a = 0; a < sc.n_a(); a++) {
            for (int y = 0; y < sc.n_y(); y++) {
                for (int y2 = y + 1; y2 < sc.n_y(); y2++) {
                    d.b_to_a = std::max(d.b_to_a, std::abs(marginal_a(p, a, x, y) - marginal_a(p, a, x, y2)));
                }
            }
        }
    }
    for (int y = 0; y < sc.n_y(); y++) {
        for (int b = 0; b < sc.n_b(); b++) {
            for (int x = 0; x < sc.n_x(); x++) {
                for (int x2 = x + 1; x2 < sc.n_x(); x2++) {
                    d.a_to_b = std::max(d.a_to_b, std::abs(marginal_b(p, b, x, y) - marginal_b(p, b, x2, y)));
                }
            }
        }
    }
    return d;
}

double bell_functional(const Correlation &p, std::span<const double> coeffs) {
    const Scenario &sc = p.scenario();
    if (coeffs.size() != sc.num_cells()) {
        throw InvalidArgument("coefficient table has the wrong number of entries");
    }
    size_t per = sc.cells_per_setting();
    double total = 0.0;
    for (size_t s = 0; s < sc.num_settings(); s++) {
        double row = 0.0;
        for (size_t k = 0; k < per; k++) {
            row += coeffs[s * per + k] * p.at(s * per + k);
        }
        total += sc.input_dist()[s] * row;
    }
    return total;
}

std::vector<double> chsh_coefficients(const Scenario &scenario) {
    require_chsh(scenario, "CHSH coefficients");
    std::vector<double> r(scenario.num_cells());
    for (int x = 0; x < 2; x++) {
        for (int y = 0; y < 2; y++) {
            double w = scenario.input_prob(x, y);
            if (w <= 0.0) {
                throw InvalidArgument("CHSH coefficients need every setting to have positive input probability");
            }
            for (int a = 0; a < 2; a++) {
                for (int b = 0; b < 2; b++) {
                    int parity = (a ^ b ^ (x & y)) & 1;
                    r[scenario.index(a, b, x, y)] = (parity == 0 ? 1.0 : -1.0) / w;
                }
            }
        }
    }
    return r;
}

Correlation pr_box(const Scenario &scenario) {
    require_chsh(scenario, "PR box");
    std::vector<double> p(scenario.num_cells(), 0.0);
    for (int x = 0; x < 2; x++) {
        for (int y = 0; y < 2; y++) {
            for (int a = 0; a < 2; a++) {
                for (int b = 0; b < 2; b++) {
                    if ((a ^ b) == (x & y)) {
                        p[scenario.index(a, b, x, y)] = 0.5;
                    }
                }
            }
        }
    }
    return Correlation(scenario, std::move(p));
}

Correlation deterministic_strategy(const Scenario &scenario, std::span<const int> alice, std::span<const int> bob) {
    if (alice.size() != static_cast<size_t>(scenario.n_x()) || bob.size() != static_cast<size_t>(scenario.n_y())) {
        throw InvalidArgument("deterministic strategy needs one output per input");
    }
    std::vector<double> p(scenario.num_cells(), 0.0);
    for (int x = 0; x < scenario.n_x(); x++) {
        for (int y = 0; y < scenario.n_y(); y++) {
            int a = alice[x];
            int b = bob[y];
            if (a < 0 || a >= scenario.n_a() || b < 0 || b >= scenario.n_b()) {
                throw InvalidArgument("deterministic strategy output out of range");
            }
            p[scenario.index(a, b, x, y)] = 1.0;
        }
    }
    return Correlation(scenario, std::move(p));
}

}  // namespace bellxt
