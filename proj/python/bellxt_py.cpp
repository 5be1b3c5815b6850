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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bellxt/errors.hpp"
#include "bellxt/io.hpp"
#include "bellxt/kl.hpp"
#include "bellxt/pbr.hpp"
#include "bellxt/sim.hpp"

namespace py = pybind11;
using namespace bellxt;

namespace {

Hypothesis hypothesis_arg(const std::string &name) {
    auto h = parse_hypothesis(name);
    if (!h) {
        throw InvalidArgument("unknown hypothesis '" + name + "'");
    }
    return *h;
}

CircuitKind circuit_arg(const std::string &name) {
    auto c = parse_circuit(name);
    if (!c) {
        throw InvalidArgument("unknown circuit '" + name + "'");
    }
    return *c;
}

py::array_t<int64_t> records_to_array(const std::vector<TrialRecord> &recs) {
    py::array_t<int64_t> out({static_cast<py::ssize_t>(recs.size()), static_cast<py::ssize_t>(6)});
    auto v = out.mutable_unchecked<2>();
    for (size_t i = 0; i < recs.size(); i++) {
        const auto &r = recs[i];
        const auto k = static_cast<py::ssize_t>(i);
        v(k, 0) = r.test_id;
        v(k, 1) = r.trial_index;
        v(k, 2) = r.x;
        v(k, 3) = r.y;
        v(k, 4) = r.a;
        v(k, 5) = r.b;
    }
    return out;
}

std::vector<TrialRecord> array_to_records(const py::array_t<int64_t, py::array::c_style | py::array::forcecast> &arr) {
    if (arr.ndim() != 2 || arr.shape(1) != 6) {
        throw InvalidArgument("records must have shape (n, 6): test_id, trial_index, x, y, a, b");
    }
    auto v = arr.unchecked<2>();
    std::vector<TrialRecord> out;
    out.reserve(static_cast<size_t>(arr.shape(0)));
    for (py::ssize_t i = 0; i < arr.shape(0); i++) {
        out.push_back({v(i, 0), v(i, 1), static_cast<int>(v(i, 2)), static_cast<int>(v(i, 3)),
                       static_cast<int>(v(i, 4)), static_cast<int>(v(i, 5))});
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_bellxt, m) {
    m.doc() = "Bell tests for nonlocality and signaling: core bindings";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<SolverError>(m, "SolverError", base.ptr());
    (void)validation;

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def(py::init<int, int, int, int, std::vector<double>>(), py::arg("n_x"), py::arg("n_y"), py::arg("n_a"),
             py::arg("n_b"), py::arg("input_dist") = std::vector<double>{})
        .def_property_readonly("n_x", &Scenario::n_x)
        .def_property_readonly("n_y", &Scenario::n_y)
        .def_property_readonly("n_a", &Scenario::n_a)
        .def_property_readonly("n_b", &Scenario::n_b)
        .def_property_readonly("input_dist", &Scenario::input_dist)
        .def("index", &Scenario::index, py::arg("a"), py::arg("b"), py::arg("x"), py::arg("y"));

    py::class_<Correlation>(m, "Correlation")
        .def(py::init<Scenario, std::vector<double>>(), py::arg("scenario"), py::arg("probs"))
        .def_static("uniform", &Correlation::uniform, py::arg("scenario") = Scenario())
        .def_property_readonly("scenario", &Correlation::scenario)
        .def_property_readonly("probs", &Correlation::values)
        .def("__call__", &Correlation::operator(), py::arg("a"), py::arg("b"), py::arg("x"), py::arg("y"));

    m.def("pr_box", &pr_box, py::arg("scenario") = Scenario());
    m.def("chsh_coefficients", &chsh_coefficients, py::arg("scenario") = Scenario());
    m.def("bell_functional", [](const Correlation &p, const std::vector<double> &c) { return bell_functional(p, c); });
    m.def("signaling_deficit", [](const Correlation &p) {
        SignalingDeficit d = signaling_deficit(p);
        return py::dict(py::arg("b_to_a") = d.b_to_a, py::arg("a_to_b") = d.a_to_b);
    });

    m.def("hypotheses", [] {
        std::vector<std::string> out;
        for (Hypothesis h : all_hypotheses()) {
            out.push_back(to_string(h));
        }
        return out;
    });
    m.def("kl_divergence", &kl_divergence, py::arg("f"), py::arg("p"));
    m.def(
        "kl_project",
        [](const Correlation &f, const std::string &hypothesis, std::optional<double> tol) {
            KlOptions opts;
            opts.tol = tol;
            KlResult r = kl_project(f, HypothesisSet::build(hypothesis_arg(hypothesis), f.scenario()), opts);
            return py::dict(py::arg("minimizer") = r.minimizer, py::arg("divergence") = r.divergence,
                            py::arg("duality_gap") = r.duality_gap, py::arg("iterations") = r.iterations,
                            py::arg("certified") = r.certified);
        },
        py::arg("f"), py::arg("hypothesis"), py::arg("tol") = py::none());
    m.def(
        "contains",
        [](const Correlation &p, const std::string &hypothesis, double tol) {
            return HypothesisSet::build(hypothesis_arg(hypothesis), p.scenario()).contains(p, tol);
        },
        py::arg("p"), py::arg("hypothesis"), py::arg("tol") = 1e-7);

    m.def("p_value_bound", &p_value_bound, py::arg("log_t"));
    m.def(
        "ideal_correlation", [](const std::string &c, const Scenario &sc) { return ideal_correlation(circuit_arg(c), sc); },
        py::arg("circuit"), py::arg("scenario") = Scenario());
    m.def(
        "sample_campaign",
        [](const std::string &circuit, int64_t n_trials, int64_t n_tests, uint64_t seed, double gamma_ba,
           double gamma_ab, double depolarizing, const std::string &drift, bool independent_inputs) {
            NoiseModel noise{{gamma_ba, gamma_ab, depolarizing}, {}};
            if (!drift.empty()) {
                noise.drift = parse_drift(drift);
            }
            CampaignPlan plan{n_trials, n_tests, seed, independent_inputs};
            std::vector<TrialRecord> recs;
            {
                py::gil_scoped_release release;
                recs = sample_campaign(circuit_arg(circuit), noise, plan, Scenario());
            }
            return records_to_array(recs);
        },
        py::arg("circuit"), py::arg("n_trials") = 1800, py::arg("n_tests") = 100, py::arg("seed") = 0,
        py::arg("gamma_ba") = 0.0, py::arg("gamma_ab") = 0.0, py::arg("depolarizing") = 0.0,
        py::arg("drift") = "", py::arg("independent_inputs") = false,
        "Returns an int64 array of shape (n_tests * n_trials, 6): test_id, trial_index, x, y, a, b.");
    m.def(
        "run_protocol",
        [](const py::array_t<int64_t, py::array::c_style | py::array::forcecast> &records, int64_t n_est,
           double alpha, std::optional<std::vector<std::string>> hypotheses, const std::string &regularize) {
            ProtocolConfig cfg;
            cfg.n_est = n_est;
            cfg.alpha = alpha;
            if (hypotheses) {
                cfg.hypotheses.clear();
                for (const auto &h : *hypotheses) {
                    cfg.hypotheses.push_back(hypothesis_arg(h));
                }
            }
            if (regularize == "on") {
                cfg.regularize = Regularize::On;
            } else if (regularize == "off") {
                cfg.regularize = Regularize::Off;
            } else if (regularize != "auto") {
                throw InvalidArgument("regularize must be auto, on or off");
            }
            auto recs = array_to_records(records);
            PbrReport report;
            {
                py::gil_scoped_release release;
                report = run_protocol(recs, Scenario(), cfg);
            }
            return py::module_::import("json").attr("loads")(report_to_json(report).dump());
        },
        py::arg("records"), py::arg("n_est") = 600, py::arg("alpha") = 0.05, py::arg("hypotheses") = py::none(),
        py::arg("regularize") = "auto", "Runs the protocol on one test's records and returns the report as a dict.");
}
