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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bellxt/errors.hpp"

namespace bellxt {

using nlohmann::json;

namespace {

std::string regularize_name(Regularize r) {
    switch (r) {
        case Regularize::On:
            return "on";
        case Regularize::Off:
            return "off";
        default:
            return "auto";
    }
}

Regularize parse_regularize(const std::string &s) {
    if (s == "auto") {
        return Regularize::Auto;
    }
    if (s == "on") {
        return Regularize::On;
    }
    if (s == "off") {
        return Regularize::Off;
    }
    throw InvalidArgument("regularize must be auto, on or off, got '" + s + "'");
}

json number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

double read_number(const json &j) {
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        const auto &s = j.get_ref<const std::string &>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        if (s == "nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
    }
    throw InvalidArgument("expected a number, got " + j.dump());
}

PolytopeKind parse_polytope(const std::string &s) {
    for (auto k : {PolytopeKind::NS, PolytopeKind::OWNS_AnotB, PolytopeKind::OWNS_BnotA, PolytopeKind::L}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw InvalidArgument("unknown polytope '" + s + "'");
}

Hypothesis hypothesis_or_throw(const std::string &s) {
    auto h = parse_hypothesis(s);
    if (!h) {
        throw InvalidArgument("unknown hypothesis '" + s + "'");
    }
    return *h;
}

std::vector<Hypothesis> parse_hypothesis_list(const json &j) {
    std::vector<Hypothesis> out;
    if (j.is_string()) {
        std::stringstream ss(j.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) {
            out.push_back(hypothesis_or_throw(item));
        }
    } else if (j.is_array()) {
        for (const auto &e : j) {
            out.push_back(hypothesis_or_throw(e.get<std::string>()));
        }
    } else {
        throw InvalidArgument("hypotheses must be a list or a comma-separated string");
    }
    return out;
}

template <typename T>
T get_as(const json &j, const char *key) {
    try {
        return j.get<T>();
    } catch (const json::exception &) {
        throw InvalidArgument(std::string("config key '") + key + "' has the wrong type: " + j.dump());
    }
}

int64_t get_int(const json &j, const char *key) {
    if (!j.is_number_integer()) {
        throw InvalidArgument(std::string("config key '") + key + "' must be an integer");
    }
    return j.get<int64_t>();
}

}  // namespace

NoiseModel RunConfig::noise_model() const {
    NoiseModel m;
    m.base = noise;
    if (!drift.empty()) {
        m.drift = parse_drift(drift);
    }
    return m;
}

json RunConfig::to_json() const {
    json hyps = json::array();
    for (Hypothesis h : protocol.hypotheses) {
        hyps.push_back(to_string(h));
    }
    return json{
        {"scenario", scenario_to_json(scenario)},
        {"circuit", to_string(circuit)},
        {"gamma_ba", noise.gamma_ba},
        {"gamma_ab", noise.gamma_ab},
        {"depolarizing", noise.depolarizing},
        {"drift", drift},
        {"n_trials", plan.n_trials},
        {"n_tests", plan.n_tests},
        {"seed", plan.seed},
        {"independent_inputs", plan.independent_inputs},
        {"n_est", protocol.n_est},
        {"alpha", protocol.alpha},
        {"regularize", regularize_name(protocol.regularize)},
        {"hypotheses", hyps},
        {"tol", protocol.tol ? json(*protocol.tol) : json(nullptr)},
        {"max_iterations", protocol.max_iterations},
        {"resort", protocol.resort},
        {"alphas", alphas},
        {"bin_width", bin_width},
        {"device", device},
        {"pair", pair},
    };
}

RunConfig RunConfig::merged(const RunConfig &base, const json &j) {
    if (!j.is_object()) {
        throw InvalidArgument("config must be a JSON object");
    }
    RunConfig c = base;
    for (const auto &[key, v] : j.items()) {
        const char *k = key.c_str();
        if (key == "scenario") {
            c.scenario = scenario_from_json(v);
        } else if (key == "circuit") {
            auto kind = parse_circuit(get_as<std::string>(v, k));
            if (!kind) {
                throw InvalidArgument("unknown circuit '" + v.get<std::string>() + "'");
            }
            c.circuit = *kind;
        } else if (key == "gamma_ba") {
            c.noise.gamma_ba = get_as<double>(v, k);
        } else if (key == "gamma_ab") {
            c.noise.gamma_ab = get_as<double>(v, k);
        } else if (key == "depolarizing") {
            c.noise.depolarizing = get_as<double>(v, k);
        } else if (key == "drift") {
            c.drift = get_as<std::string>(v, k);
        } else if (key == "n_trials") {
            c.plan.n_trials = get_int(v, k);
        } else if (key == "n_tests") {
            c.plan.n_tests = get_int(v, k);
        } else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
                throw InvalidArgument("config key 'seed' must be a non-negative integer");
            }
            c.plan.seed = v.get<uint64_t>();
        } else if (key == "independent_inputs") {
            c.plan.independent_inputs = get_as<bool>(v, k);
        } else if (key == "n_est") {
            c.protocol.n_est = get_int(v, k);
        } else if (key == "alpha") {
            c.protocol.alpha = get_as<double>(v, k);
        } else if (key == "regularize") {
            c.protocol.regularize = parse_regularize(get_as<std::string>(v, k));
        } else if (key == "hypotheses") {
            c.protocol.hypotheses = parse_hypothesis_list(v);
        } else if (key == "tol") {
            c.protocol.tol = v.is_null() ? std::nullopt : std::optional<double>(get_as<double>(v, k));
        } else if (key == "max_iterations") {
            c.protocol.max_iterations = static_cast<long>(get_int(v, k));
        } else if (key == "resort") {
            c.protocol.resort = get_as<bool>(v, k);
        } else if (key == "alphas") {
            c.alphas = get_as<std::vector<double>>(v, k);
        } else if (key == "bin_width") {
            c.bin_width = get_as<double>(v, k);
        } else if (key == "device") {
            c.device = get_as<std::string>(v, k);
        } else if (key == "pair") {
            c.pair = get_as<std::string>(v, k);
        } else if (key == "threads") {
            c.threads = static_cast<int>(get_int(v, k));
        } else {
            throw InvalidArgument("unknown config key '" + key + "'");
        }
    }
    return c;
}

void RunConfig::validate() const {
    protocol.validate();
    if (plan.n_trials < 1 || plan.n_tests < 1) {
        throw InvalidArgument("n_trials and n_tests must be positive");
    }
    noise_model().validate(plan.n_trials);
    if (alphas.empty()) {
        throw InvalidArgument("alphas must not be empty");
    }
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) {
            throw InvalidArgument("every alpha must lie in (0,1)");
        }
    }
    if (!(bin_width > 0.0 && bin_width <= 1.0)) {
        throw InvalidArgument("bin_width must lie in (0,1]");
    }
    if (threads < 1) {
        throw InvalidArgument("threads must be positive");
    }
}

std::string config_hash(const json &j) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json scenario_to_json(const Scenario &scenario) {
    return json{
        {"n_x", scenario.n_x()},
        {"n_y", scenario.n_y()},
        {"n_a", scenario.n_a()},
        {"n_b", scenario.n_b()},
        {"input_dist", scenario.input_dist()},
    };
}

Scenario scenario_from_json(const json &j) {
    if (!j.is_object()) {
        throw InvalidArgument("scenario must be a JSON object");
    }
    try {
        std::vector<double> dist;
        if (j.contains("input_dist")) {
            dist = j.at("input_dist").get<std::vector<double>>();
        }
        return Scenario(
            j.value("n_x", 2), j.value("n_y", 2), j.value("n_a", 2), j.value("n_b", 2), std::move(dist));
    } catch (const json::exception &e) {
        throw InvalidArgument(std::string("malformed scenario: ") + e.what());
    }
}

std::vector<std::vector<TrialRecord>> TrialLog::by_test() const {
    std::map<int64_t, std::vector<TrialRecord>> groups;
    for (const auto &r : records) {
        groups[r.test_id].push_back(r);
    }
    std::vector<std::vector<TrialRecord>> out;
    out.reserve(groups.size());
    for (auto &[id, g] : groups) {
        out.push_back(std::move(g));
    }
    return out;
}

TrialLog read_trial_log(std::istream &in, const std::optional<Scenario> &fallback) {
    TrialLog log;
    log.scenario = fallback.value_or(Scenario());
    std::set<std::pair<int64_t, int64_t>> seen;
    std::string line;
    int64_t lineno = 0;
    bool first = true;
    static const char *kFields[] = {"test_id", "trial_index", "x", "y", "a", "b"};
    while (std::getline(in, line)) {
        lineno++;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            throw ParseError(lineno, e.what());
        }
        if (!j.is_object()) {
            throw ParseError(lineno, "expected a JSON object");
        }
        if (j.contains("format_version")) {
            if (!first) {
                throw ParseError(lineno, "header must be the first record");
            }
            if (j.at("format_version") != kFormatVersion) {
                throw ParseError(lineno, "unsupported format_version " + j.at("format_version").dump());
            }
            if (j.contains("scenario")) {
                try {
                    log.scenario = scenario_from_json(j.at("scenario"));
                } catch (const ValidationError &e) {
                    throw ParseError(lineno, e.what());
                }
            }
            log.header = std::move(j);
            first = false;
            continue;
        }
        first = false;
        int64_t v[6];
        for (int i = 0; i < 6; i++) {
            auto it = j.find(kFields[i]);
            if (it == j.end()) {
                throw ParseError(lineno, std::string("missing field '") + kFields[i] + "'");
            }
            if (!it->is_number_integer()) {
                throw ParseError(lineno, std::string("field '") + kFields[i] + "' must be an integer");
            }
            v[i] = it->get<int64_t>();
        }
        const Scenario &sc = log.scenario;
        const int64_t limits[6] = {INT64_MAX, INT64_MAX, sc.n_x(), sc.n_y(), sc.n_a(), sc.n_b()};
        for (int i = 0; i < 6; i++) {
            if (v[i] < 0 || v[i] >= limits[i]) {
                throw RangeError(
                    lineno, std::string("field '") + kFields[i] + "' = " + std::to_string(v[i]) + " out of range");
            }
        }
        if (!seen.emplace(v[0], v[1]).second) {
            throw DuplicateTrial(v[0], v[1]);
        }
        log.records.push_back(
            {v[0], v[1], static_cast<int>(v[2]), static_cast<int>(v[3]), static_cast<int>(v[4]),
             static_cast<int>(v[5])});
    }
    return log;
}

TrialLog ingest_trial_log(const std::filesystem::path &path, const std::optional<Scenario> &fallback) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open trial log '" + path.string() + "'");
    }
    return read_trial_log(in, fallback);
}

void write_trial_log(
    std::ostream &out, const Scenario &scenario, const std::vector<TrialRecord> &records,
    const std::optional<json> &config) {
    json header{{"format_version", kFormatVersion}, {"scenario", scenario_to_json(scenario)}};
    if (config) {
        header["config"] = *config;
        header["config_hash"] = config_hash(*config);
        if (config->contains("seed")) {
            header["seed"] = config->at("seed");
        }
    }
    out << header.dump() << '\n';
    std::string buf;
    for (const auto &r : records) {
        buf.clear();
        buf += "{\"test_id\":" + std::to_string(r.test_id);
        buf += ",\"trial_index\":" + std::to_string(r.trial_index);
        buf += ",\"x\":" + std::to_string(r.x);
        buf += ",\"y\":" + std::to_string(r.y);
        buf += ",\"a\":" + std::to_string(r.a);
        buf += ",\"b\":" + std::to_string(r.b);
        buf += "}\n";
        out << buf;
    }
}

json report_to_json(const PbrReport &report) {
    json hyps = json::array();
    for (const auto &o : report.outcomes) {
        const PbrTable &t = o.pbrs;
        json ratios = json::array();
        for (double r : t.ratios) {
            ratios.push_back(number(r));
        }
        hyps.push_back(json{
            {"hypothesis", to_string(o.hypothesis)},
            {"log_t", number(o.log_t)},
            {"p_upper", number(o.p_upper)},
            {"rejected", o.rejected},
            {"indirect", o.indirect},
            {"diagnostics",
             {
                 {"ratios", ratios},
                 {"epsilon", number(t.epsilon)},
                 {"validity_polytope", to_string(t.validity_polytope)},
                 {"validity_bound", number(t.validity_bound)},
                 {"ns_bound", number(t.ns_bound)},
                 {"regularized", t.regularized},
                 {"kl_divergence", number(t.projection.divergence)},
                 {"duality_gap", number(t.projection.duality_gap)},
                 {"iterations", t.projection.iterations},
                 {"certified", t.projection.certified},
             }},
        });
    }
    return json{
        {"format_version", kFormatVersion},
        {"test_id", report.test_id},
        {"n_trials", report.n_trials},
        {"n_est", report.n_est},
        {"alpha", report.alpha},
        {"hypotheses", hyps},
    };
}

PbrReport report_from_json(const json &j) {
    try {
        if (j.at("format_version") != kFormatVersion) {
            throw InvalidArgument("unsupported report format_version " + j.at("format_version").dump());
        }
        PbrReport r;
        r.test_id = j.at("test_id").get<int64_t>();
        r.n_trials = j.at("n_trials").get<int64_t>();
        r.n_est = j.at("n_est").get<int64_t>();
        r.alpha = j.at("alpha").get<double>();
        for (const auto &h : j.at("hypotheses")) {
            HypothesisOutcome o;
            o.hypothesis = hypothesis_or_throw(h.at("hypothesis").get<std::string>());
            o.log_t = read_number(h.at("log_t"));
            o.p_upper = read_number(h.at("p_upper"));
            o.rejected = h.at("rejected").get<bool>();
            o.indirect = h.at("indirect").get<bool>();
            o.pbrs.hypothesis = o.hypothesis;
            if (h.contains("diagnostics")) {
                const json &d = h.at("diagnostics");
                for (const auto &v : d.at("ratios")) {
                    o.pbrs.ratios.push_back(read_number(v));
                }
                o.pbrs.epsilon = read_number(d.at("epsilon"));
                o.pbrs.validity_polytope = parse_polytope(d.at("validity_polytope").get<std::string>());
                o.pbrs.validity_bound = read_number(d.at("validity_bound"));
                o.pbrs.ns_bound = read_number(d.at("ns_bound"));
                o.pbrs.regularized = d.at("regularized").get<bool>();
                o.pbrs.projection.divergence = read_number(d.at("kl_divergence"));
                o.pbrs.projection.duality_gap = read_number(d.at("duality_gap"));
                o.pbrs.projection.iterations = d.at("iterations").get<long>();
                o.pbrs.projection.certified = d.at("certified").get<bool>();
            }
            r.outcomes.push_back(std::move(o));
        }
        return r;
    } catch (const json::exception &e) {
        throw InvalidArgument(std::string("malformed report: ") + e.what());
    }
}

size_t histogram_bins(double bin_width) {
    const double n = 1.0 / bin_width;
    const double r = std::round(n);
    return static_cast<size_t>(std::abs(n - r) < 1e-9 ? r : std::ceil(n));
}

size_t histogram_bin(double p_upper, double bin_width) {
    const size_t bins = histogram_bins(bin_width);
    if (!(p_upper > 0.0)) {
        return 0;
    }
    // Nudge so that values sitting on an edge, like 0.05 for width 0.025, land in the upper bin.
    const double pos = p_upper / bin_width * (1 + 1e-12);
    return std::min(bins - 1, static_cast<size_t>(pos));
}

CampaignSummary summarize(
    const std::vector<PbrReport> &reports, const std::vector<double> &alphas, double bin_width,
    const std::string &device, const std::string &pair, const std::string &circuit) {
    if (alphas.empty()) {
        throw InvalidArgument("alphas must not be empty");
    }
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) {
            throw InvalidArgument("every alpha must lie in (0,1)");
        }
    }
    if (!(bin_width > 0.0 && bin_width <= 1.0)) {
        throw InvalidArgument("bin_width must lie in (0,1]");
    }
    CampaignSummary s;
    s.device = device;
    s.pair = pair;
    s.circuit = circuit;
    s.n_tests = static_cast<int64_t>(reports.size());
    s.alphas = alphas;
    s.bin_width = bin_width;
    if (!reports.empty()) {
        for (const auto &o : reports.front().outcomes) {
            s.hypotheses.push_back(o.hypothesis);
        }
    }
    const size_t nh = s.hypotheses.size();
    s.direct.assign(nh, std::vector<int64_t>(alphas.size(), 0));
    s.indirect.assign(nh, std::vector<int64_t>(alphas.size(), 0));
    s.histogram.assign(nh, std::vector<int64_t>(histogram_bins(bin_width), 0));
    for (const auto &r : reports) {
        if (r.outcomes.size() != nh || r.n_est != reports.front().n_est || r.alpha != reports.front().alpha) {
            throw InvalidArgument("reports do not share a configuration");
        }
        for (size_t h = 0; h < nh; h++) {
            if (r.outcomes[h].hypothesis != s.hypotheses[h]) {
                throw InvalidArgument("reports do not share a configuration");
            }
            s.histogram[h][histogram_bin(r.outcomes[h].p_upper, bin_width)]++;
        }
        for (size_t a = 0; a < alphas.size(); a++) {
            std::vector<HypothesisOutcome> at = r.outcomes;
            for (auto &o : at) {
                o.rejected = o.p_upper < alphas[a];
            }
            apply_indirect_rejection(at);
            for (size_t h = 0; h < nh; h++) {
                s.direct[h][a] += at[h].rejected;
                s.indirect[h][a] += at[h].indirect;
            }
        }
    }
    return s;
}

void write_summary_csv(std::ostream &out, const CampaignSummary &s, const std::string &hash, uint64_t seed) {
    auto fmt = [](double a) {
        std::ostringstream os;
        os << a;
        return os.str();
    };
    out << "# format_version=" << kFormatVersion << '\n';
    out << "# config_hash=" << hash << ",seed=" << seed << '\n';
    out << "# device=" << s.device << ",pair=" << s.pair << ",circuit=" << s.circuit << ",tests=" << s.n_tests
        << '\n';
    out << "hypothesis";
    for (double a : s.alphas) {
        out << ",direct@" << fmt(a);
    }
    for (double a : s.alphas) {
        out << ",indirect@" << fmt(a);
    }
    out << '\n';
    for (size_t h = 0; h < s.hypotheses.size(); h++) {
        out << to_string(s.hypotheses[h]);
        for (int64_t c : s.direct[h]) {
            out << ',' << c;
        }
        for (int64_t c : s.indirect[h]) {
            out << ',' << c;
        }
        out << '\n';
    }
}

json histogram_to_json(const CampaignSummary &s, const json &config) {
    json hyps = json::object();
    for (size_t h = 0; h < s.hypotheses.size(); h++) {
        hyps[to_string(s.hypotheses[h])] = s.histogram[h];
    }
    return json{
        {"format_version", kFormatVersion},
        {"config", config},
        {"config_hash", config_hash(config)},
        {"seed", config.value("seed", json(nullptr))},
        {"device", s.device},
        {"pair", s.pair},
        {"circuit", s.circuit},
        {"n_tests", s.n_tests},
        {"bin_width", s.bin_width},
        {"bins", histogram_bins(s.bin_width)},
        {"counts", hyps},
    };
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InvalidArgument("cannot write '" + tmp.string() + "'");
        }
        out << content;
        if (!out.flush()) {
            throw InvalidArgument("write failed for '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidArgument("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace bellxt
