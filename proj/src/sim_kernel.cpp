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

#include "ddr4bench/sim_kernel.hpp"

#include "ddr4bench/error.hpp"

namespace ddr4bench {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::IllegalCommand: return "illegal_command";
        case ErrorCode::OutOfRange: return "out_of_range";
        case ErrorCode::InvalidBurst: return "invalid_burst";
        case ErrorCode::BadChannel: return "bad_channel";
        case ErrorCode::BadConfig: return "bad_config";
        case ErrorCode::Busy: return "busy";
        case ErrorCode::EmptyBatch: return "empty_batch";
        case ErrorCode::Timeout: return "timeout";
        case ErrorCode::ShapeMismatch: return "shape_mismatch";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

ClockConfig ClockConfig::for_rate(std::uint32_t data_rate_mts) {
    switch (data_rate_mts) {
        case 1600:
        case 1866:
        case 2133:
        case 2400:
            break;
        default:
            throw Error(ErrorCode::BadConfig,
                        "unsupported data rate " + std::to_string(data_rate_mts) + " MT/s");
    }
    ClockConfig clk;
    clk.data_rate_mts = data_rate_mts;
    clk.mem_clock_hz = static_cast<double>(data_rate_mts) * 1e6 / 2.0;
    clk.axi_clock_hz = clk.mem_clock_hz / static_cast<double>(kClockRatio);
    return clk;
}

double to_seconds(SimTime t, const ClockConfig& clk) {
    return static_cast<double>(t.mem_cycles) / clk.mem_clock_hz;
}

SimTime Kernel::advance() {
    ++now_.mem_cycles;
    for (auto& fn : mem_) fn(now_);
    if (now_.is_axi_edge()) {
        ++axi_ticks_;
        for (auto& fn : axi_) fn(now_);
    }
    return now_;
}

}  // namespace ddr4bench
