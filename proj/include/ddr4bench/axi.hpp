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
#include <iosfwd>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ddr4bench/sim_kernel.hpp"

namespace ddr4bench {

inline constexpr std::uint32_t kBeatBytes = 32;  // 256-bit data port
inline constexpr std::uint32_t kMaxBurstLen = 128;
inline constexpr std::uint64_t kAxiBoundary = 4096;

enum class Direction : std::uint8_t { Read, Write };
enum class BurstType : std::uint8_t { Fixed, Incr, Wrap };

std::string_view to_string(Direction d);
std::string_view to_string(BurstType b);

/// One beat of payload: 256 bits.
using DataWord = std::array<std::uint64_t, 4>;

struct AxiTransaction {
    enum class State : std::uint8_t { AddressPending, DataPhase, AwaitingResponse, Done };

    std::uint64_t id = 0;
    Direction direction = Direction::Read;
    std::uint64_t start_addr = 0;
    std::uint32_t beat_size = kBeatBytes;
    std::uint32_t burst_len = 1;
    BurstType burst_type = BurstType::Incr;
    State state = State::AddressPending;
    std::uint32_t beat_index = 0;
    Cycle issue_cycle = 0;
    Cycle last_beat_cycle = 0;

    std::uint64_t bytes() const { return static_cast<std::uint64_t>(burst_len) * beat_size; }
};

/// Throws Error(InvalidBurst) when the burst breaks a protocol rule.
void validate_burst(const AxiTransaction& txn);

/// Address of beat i (no validation).
std::uint64_t beat_address(const AxiTransaction& txn, std::uint32_t i);

/// All beat addresses in beat order; validates first.
std::vector<std::uint64_t> beat_addresses(const AxiTransaction& txn);

struct WriteBeat {
    std::uint64_t id = 0;
    std::uint32_t beat_index = 0;
    DataWord data{};
    bool last = false;
};

struct ReadBeat {
    std::uint64_t id = 0;
    std::uint32_t beat_index = 0;
    DataWord data{};
    bool last = false;
};

struct WriteResponse {
    std::uint64_t id = 0;
};

/// Memory-side end of the link. ready() calls happen once per AXI cycle
/// before the matching on_*() delivery.
class AxiSlave {
public:
    virtual ~AxiSlave() = default;
    virtual bool ar_ready(Cycle axi_cycle) const = 0;
    virtual bool aw_ready(Cycle axi_cycle) const = 0;
    virtual bool w_ready(Cycle axi_cycle) const = 0;
    virtual void on_ar(const AxiTransaction& txn, Cycle axi_cycle) = 0;
    virtual void on_aw(const AxiTransaction& txn, Cycle axi_cycle) = 0;
    virtual void on_w(const WriteBeat& beat, Cycle axi_cycle) = 0;
};

/// Traffic-side end of the link.
class AxiMaster {
public:
    virtual ~AxiMaster() = default;
    virtual bool r_ready(Cycle axi_cycle) const = 0;
    virtual bool b_ready(Cycle axi_cycle) const = 0;
    virtual void on_ar_accepted(const AxiTransaction& txn, Cycle axi_cycle) = 0;
    virtual void on_aw_accepted(const AxiTransaction& txn, Cycle axi_cycle) = 0;
    virtual void on_r(const ReadBeat& beat, Cycle axi_cycle) = 0;
    virtual void on_b(const WriteResponse& resp, Cycle axi_cycle) = 0;
};

struct HandshakeEvents {
    bool ar = false;
    bool aw = false;
    bool w = false;
    bool r = false;
    bool b = false;

    bool any() const { return ar || aw || w || r || b; }
};

struct TraceRecord {
    Cycle cycle;
    char channel[3];
    std::string_view event;
    std::uint64_t id;
    std::uint64_t addr;
};

/// Five-channel AXI4 link. Each channel is a one-entry register: a producer
/// posts a payload (VALID) and it stays unchanged until the cycle the
/// consumer is READY, when the transfer happens.
class AxiFabric {
public:
    void connect(AxiMaster* master, AxiSlave* slave) {
        master_ = master;
        slave_ = slave;
    }

    bool post_ar(const AxiTransaction& txn);
    bool post_aw(const AxiTransaction& txn);
    bool post_w(const WriteBeat& beat);
    bool post_r(const ReadBeat& beat);
    bool post_b(const WriteResponse& resp);

    bool ar_valid() const { return ar_.has_value(); }
    bool aw_valid() const { return aw_.has_value(); }
    bool w_valid() const { return w_.has_value(); }
    bool r_valid() const { return r_.has_value(); }
    bool b_valid() const { return b_.has_value(); }

    /// Resolves handshakes on all channels for one AXI cycle. Order:
    /// AW, W, AR, R, B.
    HandshakeEvents tick_axi(Cycle axi_cycle);

    struct Outstanding {
        std::uint64_t reads_in_flight = 0;
        std::uint64_t writes_in_flight = 0;
    };
    Outstanding track_outstanding() const { return outstanding_; }

    /// Transactions whose beat count did not match burst_len at completion.
    std::uint64_t beat_count_violations() const { return beat_violations_; }

    void set_tracing(bool on) { tracing_ = on; }
    const std::vector<TraceRecord>& trace() const { return trace_; }

private:
    struct Track {
        std::uint32_t burst_len = 0;
        std::uint32_t beats = 0;
        std::uint64_t addr = 0;
    };
    void record(Cycle c, const char* ch, std::string_view ev, std::uint64_t id, std::uint64_t addr);

    AxiMaster* master_ = nullptr;
    AxiSlave* slave_ = nullptr;
    std::optional<AxiTransaction> ar_;
    std::optional<AxiTransaction> aw_;
    std::optional<WriteBeat> w_;
    std::optional<ReadBeat> r_;
    std::optional<WriteResponse> b_;
    Outstanding outstanding_;
    std::unordered_map<std::uint64_t, Track> reads_;
    std::unordered_map<std::uint64_t, Track> writes_;
    std::uint64_t beat_violations_ = 0;
    bool tracing_ = false;
    std::vector<TraceRecord> trace_;
};

/// CSV: cycle,channel,event,id,addr
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace);

}  // namespace ddr4bench
