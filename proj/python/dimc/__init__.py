# Copyright 2026 The dimc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Bayesian inference for models with intractable normalizing functions."""

from ._dimc import (
    ConfigError,
    DiagnosticImpractical,
    acd,
    acd_statistic,
    acd_threshold,
    batch_means_cov,
    ergm_suffstats,
    isingnet_suffstats,
    load_config,
    load_trace,
    potts_suffstat,
    run_experiment,
    simulate,
    summarize,
)

__all__ = [
    "ConfigError",
    "DiagnosticImpractical",
    "acd",
    "acd_statistic",
    "acd_threshold",
    "batch_means_cov",
    "ergm_suffstats",
    "isingnet_suffstats",
    "load_config",
    "load_trace",
    "potts_suffstat",
    "run_experiment",
    "simulate",
    "summarize",
]
