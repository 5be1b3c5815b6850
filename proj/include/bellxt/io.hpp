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

#ifndef BELLXT_IO_HPP
#define BELLXT_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "bellxt/pbr.hpp"
#include "bellxt/scenario.hpp"
#include "bellxt/sim.hpp"

namespace bellxt {

inline constexpr int kFormatVersion = 1;

/// Everything that determines a run's outputs. Paths are deliberately not part
/// of it, so the hash only changes when results can change.
struct RunConfig {
    Scenario scenario;
    CircuitKind circuit = CircuitKind::CNL;
    NoiseParams noise;
    /// Drift schedule in parse_drift() syntax; empty for none.
    std::string drift;
    CampaignPlan plan;
    ProtocolConfig protocol;
    std::vector<double> alphas = {0.05, 0.01};
    double bin_width = 0.025;
    std::string device = "sim";
    std::string pair = "0-1";
    int threads = 1;

    NoiseModel noise_model() const;
    nlohmann::json to_json() const;
    /// Overlays the keys present in `j` on top of `base`. Unknown keys and
    /// ill-typed values throw InvalidArgument.
    static RunConfig merged(const RunConfig &base, const nlohmann::json &j);
    void validate() const;
};

/// 64-bit FNV-1a over the compact dump of `j` (object keys are sorted), as 16 hex digits.
std::string config_hash(const nlohmann::json &j);

struct TrialLog {
    Scenario scenario;
    /// The header object when the file had one.
    std::optional<nlohmann::json> header;
    std::vector<TrialRecord> records;

    /// Records split by test_id (ascending), file order kept within a test.
    std::vector<std::vector<TrialRecord>> by_test() const;
};

/// Reads a JSON-lines trial log. A first line carrying "format_version" is a
/// header and may define the scenario; otherwise `fallback` (or the default
/// scenario) is used. Blank lines are skipped. Throws ParseError, RangeError or
/// DuplicateTrial.
TrialLog read_trial_log(std::istream &in, const std::optional<Scenario> &fallback = std::nullopt);
TrialLog ingest_trial_log(const std::filesystem::path &path, const std::optional<Scenario> &fallback = std::nullopt);

nlohmann::json scenario_to_json(const Scenario &scenario);
Scenario scenario_from_json(const nlohmann::json &j);

void write_trial_log(
    std::ostream &out, const Scenario &scenario, const std::vector<TrialRecord> &records,
    const std::optional<nlohmann::json> &config = std::nullopt);

/// Non-finite numbers are written as the strings "inf", "-inf", "nan".
nlohmann::json report_to_json(const PbrReport &report);
/// Inverse of report_to_json for the fields the summary needs (diagnostics are
/// read back too, the projection minimizer is not).
PbrReport report_from_json(const nlohmann::json &j);

struct CampaignSummary {
    std::string device;
    std::string pair;
    std::string circuit;
    int64_t n_tests = 0;
    std::vector<double> alphas;
    double bin_width = 0.025;
    std::vector<Hypothesis> hypotheses;
    /// [hypothesis][alpha]: p_upper < alpha.
    std::vector<std::vector<int64_t>> direct;
    /// [hypothesis][alpha]: rejected directly or through a rejected superset.
    std::vector<std::vector<int64_t>> indirect;
    /// [hypothesis][bin] counts of p_upper; p_upper = 1 falls in the last bin.
    std::vector<std::vector<int64_t>> histogram;
};

size_t histogram_bins(double bin_width);
size_t histogram_bin(double p_upper, double bin_width);

/// Throws InvalidArgument if the reports disagree on hypotheses, n_est or
/// alpha, or if alphas / bin_width are out of range.
CampaignSummary summarize(
    const std::vector<PbrReport> &reports, const std::vector<double> &alphas, double bin_width,
    const std::string &device, const std::string &pair, const std::string &circuit);

void write_summary_csv(std::ostream &out, const CampaignSummary &summary, const std::string &hash, uint64_t seed);
nlohmann::json histogram_to_json(const CampaignSummary &summary, const nlohmann::json &config);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);
std::string read_file(const std::filesystem::path &path);

}  // namespace bellxt

#endif
