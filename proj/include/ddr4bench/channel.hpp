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

#include "ddr4bench/axi.hpp"
#include "ddr4bench/controller.hpp"
#include "ddr4bench/dram.hpp"
#include "ddr4bench/sim_kernel.hpp"
#include "ddr4bench/traffic_gen.hpp"

namespace ddr4bench {

struct ChannelOptions {
    ClockConfig clock = ClockConfig::for_rate(1600);
    TimingParams timing = TimingParams::preset(1600);
    DramGeometry geometry{};
    ControllerConfig controller{};
    bool refresh = true;
    bool log_commands = false;
    bool trace_axi = false;
    /// AXI cycles without any handshake before a batch is declared stuck.
    Cycle timeout_axi_cycles = 10'000'000;

    /// Clock and timing preset for a data rate, everything else default.
    static ChannelOptions for_rate(std::uint32_t data_rate_mts);
};

/// One memory channel: DRAM device, controller, AXI link and traffic
/// generator wired to a kernel in downstream-first tick order.
class ChannelSim {
public:
    explicit ChannelSim(const ChannelOptions& options);
    ChannelSim(const ChannelSim&) = delete;
    ChannelSim& operator=(const ChannelSim&) = delete;

    /// Runs one batch to completion and returns the accumulated counters.
    /// Throws Error(Timeout) when no handshake happens for the budget.
    const PerfCounters& run_batch(const TrafficConfig& cfg);

    const PerfCounters& counters() const { return tg_.counters(); }
    void reset_counters() { tg_.reset_counters(); }

    const ChannelOptions& options() const { return options_; }
    SimTime now() const { return kernel_.now(); }
    Kernel& kernel() { return kernel_; }
    DramDevice& dram() { return dram_; }
    const DramDevice& dram() const { return dram_; }
    MemController& controller() { return controller_; }
    const MemController& controller() const { return controller_; }
    AxiFabric& fabric() { return fabric_; }
    TrafficGenerator& traffic() { return tg_; }

private:
    ChannelOptions options_;
    DramDevice dram_;
    MemController controller_;
    AxiFabric fabric_;
    TrafficGenerator tg_;
    Kernel kernel_;
    Cycle last_progress_axi_ = 0;
};

}  // namespace ddr4bench
