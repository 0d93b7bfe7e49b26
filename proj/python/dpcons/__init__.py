# Copyright 2026 The dpcons Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Differentially private average consensus."""

import json

from dpcons._core import (
    Error,
    agent_epsilon,
    default_step_size,
    lambda_bar,
    limit_variance,
    optimal_cost,
    phi,
    random_graph,
    scale_for_epsilon,
    simulate,
)
from dpcons import _core


def run_experiment(config_text, threads=1):
    """Returns (files, summary) with files mapping name to CSV/JSON text."""
    out = _core.run_experiment(config_text, threads)
    return dict(out["files"]), json.loads(out["summary"])


def report(config_text):
    return json.loads(_core.report(config_text))


__all__ = [
    "Error",
    "agent_epsilon",
    "default_step_size",
    "lambda_bar",
    "limit_variance",
    "optimal_cost",
    "phi",
    "random_graph",
    "report",
    "run_experiment",
    "scale_for_epsilon",
    "simulate",
]
