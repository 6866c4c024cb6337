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

#include "ddr4bench/channel.hpp"

#include "ddr4bench/error.hpp"

namespace ddr4bench {

ChannelOptions ChannelOptions::for_rate(std::uint32_t data_rate_mts) {
    ChannelOptions o;
    o.clock = ClockConfig::for_rate(data_rate_mts);
    o.timing = TimingParams::preset(data_rate_mts);
    return o;
}

ChannelSim::ChannelSim(const ChannelOptions& options)
    : options_(options),
      dram_(options.geometry, options.timing, options.refresh),
      controller_(dram_, AddressMapping(options.geometry), options.controller),
      tg_(fabric_) {
    dram_.set_logging(options.log_commands);
    fabric_.set_tracing(options.trace_axi);
    fabric_.connect(&tg_, &controller_);
    controller_.attach(&fabric_);
    kernel_.add_mem_component([this](SimTime t) { controller_.tick(t.mem_cycles); });
    kernel_.add_axi_component([this](SimTime t) {
        if (fabric_.tick_axi(t.axi_cycles()).any()) last_progress_axi_ = t.axi_cycles();
    });
    kernel_.add_axi_component([this](SimTime t) { tg_.tick(t.axi_cycles()); });
}

const PerfCounters& ChannelSim::run_batch(const TrafficConfig& cfg) {
    cfg.validate(options_.geometry.capacity_bytes());
    tg_.start_batch(cfg);
    last_progress_axi_ = kernel_.now().axi_cycles();
    while (!tg_.batch_done()) {
        SimTime t = kernel_.advance();
        if (t.axi_cycles() > last_progress_axi_ + options_.timeout_axi_cycles) {
            tg_.finish_batch();
            throw Error(ErrorCode::Timeout,
                        "no AXI progress for " + std::to_string(options_.timeout_axi_cycles) +
                            " cycles at memory cycle " + std::to_string(t.mem_cycles));
        }
    }
    tg_.finish_batch();
    return tg_.counters();
}

}  // namespace ddr4bench
