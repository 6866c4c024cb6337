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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddr4bench/host.hpp"

namespace ddr4bench {

struct PlanPoint {
    TrafficConfig config;            ///< batch/limit 0 resolved by the host
    std::uint32_t data_rate_mts = 0;  ///< 0: plan rate
    std::uint32_t channels = 0;       ///< 0: plan channel count

    friend bool operator==(const PlanPoint&, const PlanPoint&) = default;
};

struct BenchPlan {
    std::string name = "custom";
    std::uint32_t channel_count = 1;
    std::uint32_t data_rate_mts = 1600;
    std::vector<PlanPoint> points;
    std::uint32_t repetitions = 1;
    std::uint32_t max_channels = 3;  ///< soft limit

    std::uint32_t rate_of(const PlanPoint& p) const {
        return p.data_rate_mts ? p.data_rate_mts : data_rate_mts;
    }
    std::uint32_t channels_of(const PlanPoint& p) const {
        return p.channels ? p.channels : channel_count;
    }

    /// Throws BadConfig. Point configs are checked after batch and range
    /// resolution against the default geometry.
    void validate() const;

    friend bool operator==(const BenchPlan&, const BenchPlan&) = default;
};

/// Burst lengths of the standard sweep: 1, 2, 4, ..., 128.
std::vector<std::uint32_t> sweep_burst_lengths();

std::vector<std::string> builtin_plan_names();
/// table3, fig3, fig4, scale-rate, scale-channels. All but scale-rate run
/// at the plan rate, so fig3 is run once per data rate. Throws BadConfig
/// for other names.
BenchPlan builtin_plan(std::string_view name);

/// Line format: `key=value` plan settings (name, rate, channels,
/// repetitions, max_channels) and `point <config fields> [rate=] [channels=]`.
/// '#' starts a comment.
BenchPlan parse_plan(std::istream& in);
std::string format_plan(const BenchPlan& plan);

struct RunOptions {
    std::optional<std::string> timing_overrides;  ///< text in the timings file format
    bool refresh = true;
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;  ///< replaces the random-address and LFSR seeds
    bool log_commands = false;
    /// Called after each channel finishes; may run on worker threads.
    std::function<void(const ChannelSim&, std::size_t point, std::uint32_t repetition,
                       std::uint32_t channel)>
        on_channel;
};

ChannelOptions make_channel_options(std::uint32_t data_rate_mts, const RunOptions& options);

struct ResultRow {
    std::string plan;
    std::size_t point = 0;
    std::uint32_t repetition = 0;
    std::uint32_t data_rate_mts = 0;
    std::uint32_t channels = 1;
    std::uint32_t channel = 0;
    TrafficConfig config;  ///< as run, batch and range resolved
    ReportDirection direction = ReportDirection::Read;
    std::uint64_t bytes = 0;
    std::uint64_t cycles = 0;
    double axi_clock_hz = 0.0;
    std::uint64_t tx_count = 0;
    double throughput_gbps = 0.0;
    std::uint64_t data_errors = 0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultSet {
    std::string plan;
    std::vector<ResultRow> rows;

    std::uint64_t data_errors() const;
    friend bool operator==(const ResultSet&, const ResultSet&) = default;
};

/// Runs every point and repetition. Rows come out in plan order whatever
/// the completion order. Errors name the failing point.
ResultSet run_plan(const BenchPlan& plan, const RunOptions& options = {});

void write_csv(std::ostream& os, const ResultSet& results);
ResultSet read_csv(std::istream& is);

/// One line per point: per-direction GB/s summed over channels and
/// averaged over repetitions.
std::string summary_table(const ResultSet& results);

struct SvgChart {
    std::string name;  ///< file stem, e.g. table3-ddr4-1600-1ch
    std::string svg;
};

/// Throughput against burst length, one chart per (rate, channel count),
/// one series per addressing and operation.
std::vector<SvgChart> render_charts(const ResultSet& results);

struct PointRatio {
    std::size_t row = 0;
    std::string category;
    std::uint32_t burst_len = 0;
    double baseline_gbps = 0.0;
    double other_gbps = 0.0;
    double ratio = 0.0;
};

struct CategoryStats {
    std::string category;
    std::size_t count = 0;
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

struct CompareReport {
    std::vector<PointRatio> points;
    std::vector<CategoryStats> categories;
};

/// Per-row ratios other/baseline. Rows must pair up one to one on point,
/// repetition, channel, direction, operation, addressing and burst; data
/// rate and batch length may differ. Throws ShapeMismatch otherwise.
CompareReport compare(const ResultSet& baseline, const ResultSet& other);

std::string format_compare(const CompareReport& report);

/// "seq/read", "rnd/mixed-write", ...
std::string category_of(const TrafficConfig& cfg, ReportDirection direction);

}  // namespace ddr4bench
