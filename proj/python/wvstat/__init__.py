# Copyright 2026 The wvstat Authors
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

"""Weak values and complex quasiprobabilities in finite dimensions."""

import json as _json

from ._wvstat import (
    WvstatError,
    __version__,
    coarse_grained_argmax,
    commutator_identity,
    direct_kd,
    eigh,
    kd_joint,
    motion_identity,
    predict_born,
    propagator,
    scenario_kinds,
    second_moment_identity,
    two_time_correlation,
    weak_value,
    weak_value_ladder,
)
from ._wvstat import run_scenario_json as _run_scenario_json


def run_scenario(config, seed=None):
    """Run a scenario given as a dict or JSON text; returns the report as a dict."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_run_scenario_json(text, seed))


__all__ = [
    "WvstatError",
    "__version__",
    "coarse_grained_argmax",
    "commutator_identity",
    "direct_kd",
    "eigh",
    "kd_joint",
    "motion_identity",
    "predict_born",
    "propagator",
    "run_scenario",
    "scenario_kinds",
    "second_moment_identity",
    "two_time_correlation",
    "weak_value",
    "weak_value_ladder",
]
