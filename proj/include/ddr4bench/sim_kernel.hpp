/*
 * Copyright 2026 The ddr4bench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace ddr4bench {

using Cycle = std::uint64_t;

/// Memory-clock cycles per AXI-clock cycle.
inline constexpr Cycle kClockRatio = 4;

struct SimTime {
    Cycle mem_cycles = 0;

    constexpr Cycle axi_cycles() const { return mem_cycles / kClockRatio; }
    constexpr bool is_axi_edge() const { return mem_cycles % kClockRatio == 0; }

    friend constexpr auto operator<=>(const SimTime&, const SimTime&) = default;
};

struct ClockConfig {
    std::uint32_t data_rate_mts = 1600;
    double mem_clock_hz = 800e6;
    double axi_clock_hz = 200e6;

    /// Throws Error(BadConfig) for rates other than 1600/1866/2133/2400.
    static ClockConfig for_rate(std::uint32_t data_rate_mts);
};

double to_seconds(SimTime t, const ClockConfig& clk);

/// Synchronous two-domain engine. Memory-domain components tick every
/// memory cycle; AXI-domain components tick when the new cycle index is a
/// multiple of kClockRatio. Within a cycle all memory-domain components run
/// before AXI-domain ones, each group in registration order.
class Kernel {
public:
    using TickFn = std::function<void(SimTime)>;

    void add_mem_component(TickFn fn) { mem_.push_back(std::move(fn)); }
    void add_axi_component(TickFn fn) { axi_.push_back(std::move(fn)); }

    SimTime advance();

    SimTime now() const { return now_; }
    Cycle axi_ticks() const { return axi_ticks_; }

private:
    SimTime now_{};
    Cycle axi_ticks_ = 0;
    std::vector<TickFn> mem_;
    std::vector<TickFn> axi_;
};

}  // namespace ddr4bench
