# Copyright 2026 The ddr4bench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Cycle-level DDR4 memory subsystem simulator and benchmark."""

from ._ddr4bench import (
    Error,
    HostController,
    Results,
    builtin_plans,
    compare,
    format_plan,
    normalize_config,
    run_plan,
    supported_rates,
    throughput_gbps,
)

__all__ = [
    "Error",
    "HostController",
    "Results",
    "builtin_plans",
    "compare",
    "format_plan",
    "normalize_config",
    "run_plan",
    "supported_rates",
    "throughput_gbps",
]
