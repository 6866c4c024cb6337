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

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "ddr4bench/sim_kernel.hpp"

namespace ddr4bench {

struct DramGeometry {
    std::uint32_t bank_groups = 4;
    std::uint32_t banks_per_group = 4;
    std::uint32_t rows = 16384;
    std::uint32_t columns = 1024;
    std::uint32_t bus_width_bits = 64;

    std::uint32_t total_banks() const { return bank_groups * banks_per_group; }
    std::uint64_t capacity_bytes() const;
    /// Bytes moved by one BL8 column access.
    std::uint32_t burst_bytes() const { return 8 * bus_width_bits / 8; }

    /// Throws Error(BadConfig) when an invariant does not hold.
    void validate() const;
};

/// JEDEC DDR4 timing constraints in memory-clock cycles.
struct TimingParams {
    std::uint32_t CL = 11;      ///< RD to first read data
    std::uint32_t CWL = 9;      ///< WR to first write data
    std::uint32_t tRCD = 11;    ///< ACT to RD/WR
    std::uint32_t tRP = 11;     ///< PRE to ACT
    std::uint32_t tRAS = 28;    ///< ACT to PRE
    std::uint32_t tRC = 39;     ///< ACT to ACT, same bank
    std::uint32_t tRFC = 208;   ///< REF to any command
    std::uint32_t tREFI = 6240; ///< average refresh interval
    std::uint32_t tCCD_S = 4;
    std::uint32_t tCCD_L = 5;
    std::uint32_t tRRD_S = 4;
    std::uint32_t tRRD_L = 5;
    std::uint32_t tFAW = 20;
    std::uint32_t tWR = 12;     ///< end of write data to PRE
    std::uint32_t tWTR_S = 2;   ///< end of write data to RD, other bank group
    std::uint32_t tWTR_L = 6;   ///< end of write data to RD, same bank group
    std::uint32_t tRTP = 6;     ///< RD to PRE
    std::uint32_t burst_length = 8;
    /// Idle data-bus cycles required between a read burst and a following
    /// write burst (preamble/postamble turnaround).
    std::uint32_t bus_turnaround = 2;

    std::uint32_t burst_cycles() const { return burst_length / 2; }
    std::uint32_t write_to_read(bool same_group) const {
        return CWL + burst_cycles() + (same_group ? tWTR_L : tWTR_S);
    }
    std::uint32_t write_to_precharge() const { return CWL + burst_cycles() + tWR; }

    void validate() const;

    /// Built-in speed-bin presets (1600, 1866, 2133, 2400 MT/s).
    static TimingParams preset(std::uint32_t data_rate_mts);

    /// Applies "name=value" overrides, one per line; '#' starts a comment.
    /// Throws Error(Parse) on unknown names.
    void apply_overrides(std::istream& in);
    void set(std::string_view name, std::uint32_t value);
};

enum class CommandKind : std::uint8_t { ACT, RD, WR, PRE, REF };

std::string_view to_string(CommandKind kind);

struct DramCommand {
    CommandKind kind = CommandKind::REF;
    std::uint32_t bank_group = 0;
    std::uint32_t bank = 0;
    std::uint32_t row = 0;
    std::uint32_t column = 0;

    static DramCommand act(std::uint32_t bg, std::uint32_t b, std::uint32_t row) {
        return {CommandKind::ACT, bg, b, row, 0};
    }
    static DramCommand rd(std::uint32_t bg, std::uint32_t b, std::uint32_t row, std::uint32_t col) {
        return {CommandKind::RD, bg, b, row, col};
    }
    static DramCommand wr(std::uint32_t bg, std::uint32_t b, std::uint32_t row, std::uint32_t col) {
        return {CommandKind::WR, bg, b, row, col};
    }
    static DramCommand pre(std::uint32_t bg, std::uint32_t b) {
        return {CommandKind::PRE, bg, b, 0, 0};
    }
    static DramCommand ref() { return {}; }
};

struct CommandRecord {
    Cycle cycle = 0;
    DramCommand cmd;
};

/// Half-open data-bus interval [start, end).
struct DataWindow {
    Cycle start = 0;
    Cycle end = 0;
};

struct RefreshDemand {
    Cycle due = 0;
};

struct BankState {
    enum class State : std::uint8_t { Idle, Active, Precharging };

    bool open = false;
    std::uint32_t open_row = 0;
    std::optional<Cycle> last_act;
    std::optional<Cycle> last_rd;
    std::optional<Cycle> last_wr;
    std::optional<Cycle> last_pre;
    Cycle refresh_locked_until = 0;

    State state_at(Cycle now, const TimingParams& t) const;
};

/// One DDR4 rank: per-bank row state, command legality, data-bus occupancy,
/// periodic refresh demand and an optional command audit log.
class DramDevice {
public:
    DramDevice(DramGeometry geometry, TimingParams timing, bool refresh_enabled = true);

    bool can_issue(const DramCommand& cmd, Cycle now) const;

    /// Applies the command. Returns the data-bus window for RD/WR.
    /// Throws Error(IllegalCommand) when can_issue() is false.
    std::optional<DataWindow> issue(const DramCommand& cmd, Cycle now);

    /// Signals a refresh demand every tREFI cycles (never when disabled).
    std::optional<RefreshDemand> refresh_tick(Cycle now) const;

    const BankState& bank(std::uint32_t bank_group, std::uint32_t bank) const {
        return banks_[index(bank_group, bank)];
    }
    bool all_banks_closed() const;

    const DramGeometry& geometry() const { return geometry_; }
    const TimingParams& timing() const { return timing_; }
    bool refresh_enabled() const { return refresh_enabled_; }

    void set_logging(bool on) { logging_ = on; }
    const std::vector<CommandRecord>& log() const { return log_; }
    std::uint64_t command_count(CommandKind kind) const {
        return counts_[static_cast<std::size_t>(kind)];
    }

private:
    std::size_t index(std::uint32_t bg, std::uint32_t b) const {
        return static_cast<std::size_t>(bg) * geometry_.banks_per_group + b;
    }
    bool bus_free(Cycle start, Cycle end, bool is_write) const;

    struct BusWindow {
        Cycle start;
        Cycle end;
        bool is_write;
    };

    DramGeometry geometry_;
    TimingParams timing_;
    bool refresh_enabled_;
    std::vector<BankState> banks_;
    std::vector<std::optional<Cycle>> group_last_act_;
    std::vector<std::optional<Cycle>> group_last_rd_;
    std::vector<std::optional<Cycle>> group_last_wr_;
    std::optional<Cycle> last_act_;
    std::optional<Cycle> last_rd_;
    std::optional<Cycle> last_wr_;
    std::deque<Cycle> recent_acts_;
    std::deque<BusWindow> windows_;
    Cycle refresh_locked_until_ = 0;
    std::array<std::uint64_t, 5> counts_{};
    bool logging_ = false;
    std::vector<CommandRecord> log_;
};

/// Writes "cycle,command,bank_group,bank,row,column" rows with a header.
void write_command_log_csv(std::ostream& os, const std::vector<CommandRecord>& log);
std::vector<CommandRecord> read_command_log_csv(std::istream& is);

/// Peak DRAM data-bus bandwidth in GB/s (1e9 bytes).
double peak_bandwidth_gbps(const ClockConfig& clk, const DramGeometry& geometry);

}  // namespace ddr4bench
