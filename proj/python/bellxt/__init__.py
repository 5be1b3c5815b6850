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

"""Bell tests for nonlocality and measurement cross-talk on two-qubit devices."""

from bellxt._bellxt import (
    Correlation,
    Error,
    Scenario,
    SolverError,
    ValidationError,
    bell_functional,
    chsh_coefficients,
    contains,
    hypotheses,
    ideal_correlation,
    kl_divergence,
    kl_project,
    p_value_bound,
    pr_box,
    run_protocol,
    sample_campaign,
    signaling_deficit,
)

__all__ = [
    "Correlation",
    "Error",
    "Scenario",
    "SolverError",
    "ValidationError",
    "bell_functional",
    "chsh_coefficients",
    "contains",
    "hypotheses",
    "ideal_correlation",
    "kl_divergence",
    "kl_project",
    "p_value_bound",
    "pr_box",
    "run_protocol",
    "sample_campaign",
    "signaling_deficit",
]
