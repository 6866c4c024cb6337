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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ddr4bench/channel.hpp"
#include "ddr4bench/error.hpp"

namespace ddr4bench {

enum class ReportDirection : std::uint8_t { Read, Write, Combined };

std::string_view to_string(ReportDirection d);
ReportDirection parse_report_direction(std::string_view s);

struct ThroughputReport {
    std::uint32_t channel = 0;
    ReportDirection direction = ReportDirection::Read;
    std::uint64_t bytes = 0;
    std::uint64_t cycles = 0;  ///< AXI cycles; for combined, the longer span
    double axi_clock_hz = 0.0;
    double throughput_gbps = 0.0;
    std::uint64_t tx_count = 0;
    double mean_cycles_per_tx = 0.0;

    friend bool operator==(const ThroughputReport&, const ThroughputReport&) = default;
};

/// bytes / (cycles / axi_clock_hz) / 1e9. Every report uses this.
double throughput_gbps(std::uint64_t bytes, std::uint64_t cycles, double axi_clock_hz);

/// Per-direction reports for the directions that ran, plus a combined
/// entry (read + write GB/s) when both did. Throws EmptyBatch when no
/// direction has cycles.
std::vector<ThroughputReport> throughput(const PerfCounters& counters, const ClockConfig& clk,
                                         std::uint32_t channel = 0);

/// The figure quoted for a channel: combined when present, else the
/// single direction.
const ThroughputReport& headline(const std::vector<ThroughputReport>& reports);

struct SystemReport {
    std::vector<double> per_channel_gbps;
    double total_gbps = 0.0;
};

/// Sums channel throughputs. Expects one headline report per channel.
SystemReport aggregate(const std::vector<ThroughputReport>& per_channel);

/// Transactions per batch covering about ten refresh intervals of
/// full-rate traffic.
std::uint64_t auto_batch_len(const TimingParams& timing, std::uint32_t burst_len);

// Text codec shared by the host protocol and plan files.
std::string format_double(double v);
double parse_double(std::string_view s);
std::uint64_t parse_u64(std::string_view s);  ///< decimal or 0x-prefixed hex

/// Parses space-separated key=value config fields. Omitted batch or range
/// leave 0, which the host resolves to the automatic batch and the full
/// channel capacity.
TrafficConfig parse_config(std::string_view fields);
std::string format_config(const TrafficConfig& cfg);

struct ConfigureCmd {
    std::uint32_t channel = 0;
    TrafficConfig config;
};
struct RunCmd {
    std::uint32_t channel = 0;
};
struct RunAllCmd {};
struct ReadCountersCmd {
    std::uint32_t channel = 0;
};
struct ResetCountersCmd {
    std::uint32_t channel = 0;
};
struct QueryCmd {};

using HostCommand =
    std::variant<ConfigureCmd, RunCmd, RunAllCmd, ReadCountersCmd, ResetCountersCmd, QueryCmd>;

HostCommand parse_command(std::string_view line);

struct QueryInfo {
    std::uint32_t channels = 0;
    ClockConfig clock;
    DramGeometry geometry;
    bool refresh = true;
};

struct RunResult {
    std::uint32_t channel = 0;
    PerfCounters counters;
    std::vector<ThroughputReport> reports;
};

struct RunAllResult {
    std::vector<RunResult> channels;
    SystemReport system;
};

using HostResponse = std::variant<std::monostate, PerfCounters, RunResult, RunAllResult, QueryInfo>;

struct HostOptions {
    std::uint32_t channels = 1;
    ChannelOptions channel{};
    /// Worker threads for RunAll; 0 means one per channel.
    unsigned jobs = 0;
};

class HostController {
public:
    explicit HostController(const HostOptions& options);
    ~HostController();
    HostController(const HostController&) = delete;
    HostController& operator=(const HostController&) = delete;

    std::uint32_t channel_count() const { return static_cast<std::uint32_t>(channels_.size()); }

    /// Validates and stores the config. A zero batch or limit is resolved
    /// first (see parse_config).
    void configure(std::uint32_t channel, TrafficConfig cfg);
    const std::optional<TrafficConfig>& config(std::uint32_t channel) const;

    RunResult run(std::uint32_t channel);
    RunAllResult run_all();
    PerfCounters counters(std::uint32_t channel) const;
    void reset(std::uint32_t channel);
    QueryInfo query() const;

    HostResponse execute(const HostCommand& cmd);

    /// One protocol line in, one response line out. Never throws.
    std::string execute_line(std::string_view line);

    ChannelSim& channel(std::uint32_t channel);

private:
    struct Slot;
    Slot& slot(std::uint32_t channel) const;
    RunResult run_slot(std::uint32_t channel);

    HostOptions options_;
    std::vector<std::unique_ptr<Slot>> channels_;
};

std::string format_response(const HostResponse& response);
std::string format_error(const Error& e);

}  // namespace ddr4bench
