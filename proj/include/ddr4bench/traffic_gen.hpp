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
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ddr4bench/axi.hpp"

namespace ddr4bench {

enum class OpMode : std::uint8_t { ReadOnly, WriteOnly, Mixed };
enum class Addressing : std::uint8_t { Sequential, Random };
enum class Signaling : std::uint8_t { NonBlocking, Blocking, Aggressive };
enum class DataPattern : std::uint8_t { Lfsr, AddressHash, Constant };

struct Fraction {
    std::uint32_t num = 1;
    std::uint32_t den = 2;

    double value() const { return static_cast<double>(num) / den; }
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct TrafficConfig {
    OpMode op_mode = OpMode::ReadOnly;
    Fraction read_fraction{1, 2};  ///< Mixed only
    Addressing addressing = Addressing::Sequential;
    std::uint64_t seed = 1;        ///< Random addressing seed
    BurstType burst_type = BurstType::Incr;
    std::uint32_t burst_len = 1;
    Signaling signaling = Signaling::NonBlocking;
    std::uint64_t batch_len = 1;   ///< transactions per batch
    std::uint64_t base = 0;
    std::uint64_t limit = 0;       ///< exclusive
    DataPattern data_pattern = DataPattern::Lfsr;
    std::uint64_t data_seed = 0x5eed;
    std::uint8_t constant_byte = 0xA5;

    std::uint64_t footprint() const { return std::uint64_t{burst_len} * kBeatBytes; }
    std::uint64_t reads_in_batch() const;
    std::uint64_t writes_in_batch() const;

    /// Throws Error(BadConfig) when an invariant is violated.
    void validate(std::uint64_t capacity) const;

    friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

/// True when the i-th operation of a mixed batch is a read. Spreads reads
/// evenly: strict alternation at 1/2.
bool mixed_is_read(const Fraction& f, std::uint64_t i);
/// Position of the index-th transaction of a direction within a mixed batch.
std::uint64_t mixed_position(const Fraction& f, Direction direction, std::uint64_t index);

struct PerfCounters {
    std::uint64_t read_cycles = 0;   ///< AXI cycles
    std::uint64_t write_cycles = 0;  ///< AXI cycles
    std::uint64_t read_tx = 0;
    std::uint64_t write_tx = 0;
    std::uint64_t read_bytes = 0;
    std::uint64_t write_bytes = 0;
    std::uint64_t data_errors = 0;
    std::uint64_t unchecked_reads = 0;  ///< beats read from never-written locations

    friend bool operator==(const PerfCounters&, const PerfCounters&) = default;
};

/// Byte address of the index-th transaction of one direction's stream.
std::uint64_t next_address(const TrafficConfig& cfg, Direction direction, std::uint64_t index);

/// Start address actually driven on the bus; WRAP bursts start mid-region
/// so the wrap is exercised.
std::uint64_t burst_start_address(const TrafficConfig& cfg, std::uint64_t slot_addr);

/// Deterministic, never all-zero beat payload.
DataWord gen_data(const TrafficConfig& cfg, std::uint64_t addr, std::uint32_t beat_index);

enum class CheckResult : std::uint8_t { Ok, Mismatch };

CheckResult check_read(const TrafficConfig& cfg, std::uint64_t addr, std::uint32_t beat_index,
                       const DataWord& observed);

struct GateDecision {
    bool issue_address = false;
    bool response_ready = false;
};

/// Per-cycle issue/hold decision for one direction.
GateDecision signal_gate(Signaling mode, bool address_slot_free, bool remaining,
                         std::uint64_t outstanding);

struct DataErrorDetail {
    std::uint64_t addr = 0;
    std::uint64_t txn_id = 0;
    std::uint32_t beat_index = 0;
    DataWord expected{};
    DataWord observed{};
};

/// AXI master that drives one batch at a time and keeps the performance
/// counters plus a shadow of what it wrote for readback checking.
class TrafficGenerator : public AxiMaster {
public:
    explicit TrafficGenerator(AxiFabric& fabric) : fabric_(fabric) {}

    void start_batch(const TrafficConfig& cfg);
    bool batch_done() const;
    /// Folds the finished batch's cycle spans into the counters.
    void finish_batch();
    bool batch_active() const { return active_; }

    /// One AXI cycle: posts new addresses and write data.
    void tick(Cycle axi_cycle);

    const PerfCounters& counters() const { return counters_; }
    void reset_counters() { counters_ = {}; }
    const std::optional<DataErrorDetail>& first_error() const { return first_error_; }

    /// Forces ready low on R/B regardless of the signaling mode.
    void hold_responses(bool hold) { hold_ = hold; }

    // AxiMaster
    bool r_ready(Cycle axi_cycle) const override;
    bool b_ready(Cycle axi_cycle) const override;
    void on_ar_accepted(const AxiTransaction& txn, Cycle axi_cycle) override;
    void on_aw_accepted(const AxiTransaction& txn, Cycle axi_cycle) override;
    void on_r(const ReadBeat& beat, Cycle axi_cycle) override;
    void on_b(const WriteResponse& resp, Cycle axi_cycle) override;

private:
    struct Written {
        std::uint32_t beat_index;
        std::uint32_t pattern;
    };
    struct PendingRead {
        AxiTransaction txn;
        std::vector<std::optional<Written>> expect;
    };
    struct PendingWrite {
        AxiTransaction txn;
        std::uint32_t next_beat = 0;
    };

    AxiTransaction make_txn(Direction dir, std::uint64_t index);
    std::uint32_t pattern_slot(const TrafficConfig& cfg);

    AxiFabric& fabric_;
    TrafficConfig cfg_;
    bool active_ = false;
    bool hold_ = false;
    std::uint64_t next_id_ = 1;
    std::uint64_t reads_total_ = 0, writes_total_ = 0;
    std::uint64_t reads_posted_ = 0, writes_posted_ = 0;
    std::uint64_t reads_done_ = 0, writes_done_ = 0;
    std::optional<Cycle> first_ar_, last_r_, first_aw_, last_b_;
    std::deque<PendingWrite> w_queue_;
    std::unordered_map<std::uint64_t, PendingRead> reads_in_flight_;
    std::unordered_map<std::uint64_t, Written> shadow_;
    std::vector<TrafficConfig> patterns_;
    std::uint32_t current_pattern_ = 0;
    PerfCounters counters_;
    std::optional<DataErrorDetail> first_error_;
};

}  // namespace ddr4bench
