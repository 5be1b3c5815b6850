# Copyright 2026 The bellxt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import bellxt


def test_p_value_bound():
    assert bellxt.p_value_bound(math.log(20.0)) == pytest.approx(0.05, rel=1e-15)
    assert bellxt.p_value_bound(0.0) == 1.0
    assert bellxt.p_value_bound(-5.0) == 1.0


def test_chsh_values():
    chsh = bellxt.chsh_coefficients()
    assert bellxt.bell_functional(bellxt.pr_box(), chsh) == pytest.approx(4.0)
    nl = bellxt.ideal_correlation("cnl")
    assert bellxt.bell_functional(nl, chsh) == pytest.approx(2 * math.sqrt(2), abs=1e-12)


def test_pr_box_projection_onto_local_set():
    r = bellxt.kl_project(bellxt.pr_box(), "L")
    assert r["certified"]
    # v = 3/4 on the PR support: D = log(2) - log(3/2).
    assert r["divergence"] == pytest.approx(math.log(4 / 3), abs=1e-7)
    assert bellxt.contains(r["minimizer"], "L", 1e-7)
    assert not bellxt.contains(bellxt.pr_box(), "Q1")


def test_sampling_shape_and_determinism():
    a = bellxt.sample_campaign("cnl", n_trials=100, n_tests=3, seed=5)
    b = bellxt.sample_campaign("cnl", n_trials=100, n_tests=3, seed=5)
    assert a.shape == (300, 6)
    assert a.dtype == np.int64
    assert np.array_equal(a, b)
    assert set(np.unique(a[:, 2:])) <= {0, 1}


def test_protocol_on_signaling_data():
    recs = bellxt.sample_campaign("cl", n_trials=1800, n_tests=1, seed=9, gamma_ba=0.15)
    report = bellxt.run_protocol(recs, hypotheses=["ns", "owns-ab", "owns-ba"])
    by_name = {h["hypothesis"]: h for h in report["hypotheses"]}
    assert by_name["OWNS_BnotA"]["rejected"]
    assert not by_name["OWNS_AnotB"]["rejected"]
    assert by_name["NS"]["indirect"]


def test_errors_are_typed():
    with pytest.raises(bellxt.ValidationError):
        bellxt.sample_campaign("nope")
    with pytest.raises(bellxt.ValidationError):
        bellxt.run_protocol(np.zeros((10, 6), dtype=np.int64), n_est=20)
    with pytest.raises(bellxt.ValidationError):
        bellxt.Correlation(bellxt.Scenario(), [0.5] * 16)
