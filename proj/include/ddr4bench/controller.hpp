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
#include <iosfwd>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ddr4bench/axi.hpp"
#include "ddr4bench/dram.hpp"

namespace ddr4bench {

struct DramCoord {
    std::uint32_t bank_group = 0;
    std::uint32_t bank = 0;
    std::uint32_t row = 0;
    std::uint32_t column = 0;       ///< bus-word column index
    std::uint32_t byte_offset = 0;  ///< byte within the bus word

    friend bool operator==(const DramCoord&, const DramCoord&) = default;
};

enum class AddrField : std::uint8_t { BankGroup, Bank, ColumnHigh, Row };

/// Bit-sliced physical address layout. The low bits always hold the byte
/// offset inside one BL8 burst (byte-in-word, then the three column bits
/// the burst covers); the remaining fields follow in the given
/// least-significant-first order.
class AddressMapping {
public:
    /// Default: row : column-high : bank : bank_group : burst offset, so
    /// consecutive 64-byte blocks rotate through the bank groups.
    explicit AddressMapping(const DramGeometry& geometry);
    AddressMapping(const DramGeometry& geometry, std::vector<AddrField> lsb_first);

    /// Throws Error(OutOfRange) when addr >= capacity.
    DramCoord decode(std::uint64_t addr) const;
    std::uint64_t encode(const DramCoord& c) const;

    std::uint64_t capacity() const { return capacity_; }
    std::uint32_t burst_bytes() const { return burst_bytes_; }

private:
    struct Slice {
        AddrField field;
        unsigned shift;
        unsigned width;
    };
    std::vector<Slice> slices_;
    unsigned word_bits_ = 0;
    unsigned col_low_bits_ = 0;
    std::uint64_t capacity_ = 0;
    std::uint32_t burst_bytes_ = 0;
};

struct ControllerConfig {
    std::uint32_t read_queue_depth = 16;
    std::uint32_t write_queue_depth = 16;
    /// DRAM commands the controller may issue per memory cycle.
    std::uint32_t command_slots = 2;
    /// Minimum AXI cycles between two accepted addresses on one channel.
    std::uint32_t addr_accept_interval = 2;
    /// Read data staged between the DRAM and the R channel, in beats.
    std::uint32_t read_buffer_beats = 14;
    /// Write data held before the column write is issued, in beats.
    std::uint32_t write_buffer_beats = 256;
    /// Buffered write beats whose row is not open yet; further data for a
    /// closed row waits on W. At or above write_buffer_beats: no limit.
    std::uint32_t write_staging_beats = 48;
    /// Memory cycles from the end of a DRAM read burst to R availability.
    std::uint32_t read_return_latency = 4;
    /// Write-drain watermarks on buffered write beats.
    std::uint32_t write_high_watermark = 192;
    std::uint32_t write_low_watermark = 64;
    /// Oldest queued requests eligible for ACT/PRE.
    std::uint32_t activate_window = 1;
    /// Memory cycles a refresh may be postponed while requests are queued;
    /// 0 means tREFI / 2.
    std::uint32_t refresh_postpone = 0;

    void validate() const;
};

struct ColumnAccess {
    DramCoord coord;              ///< column aligned to the BL8 burst
    std::uint64_t block_addr = 0; ///< burst-aligned byte address
    std::uint64_t seq = 0;        ///< global arrival order of the access
    std::uint32_t first_beat = 0;
    std::uint8_t beats = 1;       ///< 1 or 2 AXI beats in this access
    bool issued = false;
};

struct MemRequest {
    std::uint64_t id = 0;
    Direction kind = Direction::Read;
    std::vector<ColumnAccess> dram_bursts;
    std::vector<std::uint64_t> beat_addrs;
    std::uint64_t bytes = 0;
    Cycle arrival_cycle = 0;
    std::uint64_t seq = 0;

    // Progress.
    std::size_t first_unissued = 0;
    std::uint32_t issued = 0;
    std::uint32_t done = 0;          ///< accesses whose data window has ended
    Cycle retire_at = 0;
    bool retired = false;
    // Read return path.
    std::vector<DataWord> data;
    std::vector<std::uint8_t> beat_ready;
    std::uint32_t next_beat = 0;
    // Write data path.
    std::uint32_t beats_received = 0;
    bool response_sent = false;
};

/// Splits an AXI transaction into BL8 column accesses, merging two
/// consecutive beats that are the lower and upper half of one burst.
MemRequest make_request(const AxiTransaction& txn, const AddressMapping& mapping,
                        std::uint32_t beat_bytes = kBeatBytes);

struct ReadCompletion {
    std::uint64_t id = 0;
    std::uint32_t first_beat = 0;
    std::uint32_t beats = 0;
};

struct ControllerStats {
    std::uint64_t reads_accepted = 0;
    std::uint64_t writes_accepted = 0;
    std::uint64_t bytes_accepted = 0;
    std::uint64_t bytes_completed = 0;
    std::uint64_t column_commands = 0;
    std::uint64_t activates = 0;
    std::uint64_t precharges = 0;
    std::uint64_t refreshes = 0;
    std::uint64_t cycles = 0;
    std::uint64_t read_queue_sum = 0;
    std::uint64_t write_queue_sum = 0;
    std::uint64_t max_refresh_gap = 0;

    double row_hit_rate() const {
        return column_commands == 0
                   ? 0.0
                   : 1.0 - static_cast<double>(activates) / static_cast<double>(column_commands);
    }
    double avg_read_queue() const {
        return cycles == 0 ? 0.0 : static_cast<double>(read_queue_sum) / cycles;
    }
    double avg_write_queue() const {
        return cycles == 0 ? 0.0 : static_cast<double>(write_queue_sum) / cycles;
    }
};

/// CSV with one header row and one value row.
void write_controller_stats_csv(std::ostream& os, const ControllerStats& s);

/// Reordering DDR4 memory controller: independent read and write queues,
/// FR-FCFS column scheduling over an open-page policy, in-order ACT/PRE for
/// the oldest request, refresh with bounded postponement, and a sparse
/// backing store so data written through it can be read back.
class MemController : public AxiSlave {
public:
    MemController(DramDevice& dram, AddressMapping mapping, ControllerConfig config = {});

    void attach(AxiFabric* fabric) { fabric_ = fabric; }

    /// Enqueues a request. False when that direction's queue is full.
    bool accept(MemRequest req, Cycle now);

    /// One memory cycle: completions, scheduling, then R/B posting.
    void tick(Cycle now);

    /// Data windows that finished this cycle.
    std::vector<ReadCompletion> complete(Cycle now);

    /// Issues up to command_slots legal commands. Returns what was issued.
    std::vector<DramCommand> schedule_tick(Cycle now);

    // AxiSlave
    bool ar_ready(Cycle axi_cycle) const override;
    bool aw_ready(Cycle axi_cycle) const override;
    bool w_ready(Cycle axi_cycle) const override;
    void on_ar(const AxiTransaction& txn, Cycle axi_cycle) override;
    void on_aw(const AxiTransaction& txn, Cycle axi_cycle) override;
    void on_w(const WriteBeat& beat, Cycle axi_cycle) override;

    std::size_t read_queue_occupancy() const { return read_active_; }
    std::size_t write_queue_occupancy() const { return write_active_; }
    bool idle() const;
    const ControllerStats& stats() const { return stats_; }
    const AddressMapping& mapping() const { return mapping_; }
    const ControllerConfig& config() const { return config_; }

    /// Next read beat ready for the R channel, if any (test access).
    std::optional<ReadBeat> peek_read_beat() const;

    /// Flips one bit of the stored word at a beat address.
    void inject_bit_flip(std::uint64_t addr, unsigned bit);
    DataWord stored_word(std::uint64_t addr) const;

private:
    struct Choice {
        DramCommand cmd;
        MemRequest* req = nullptr;
        std::uint32_t access = 0;
    };

    struct Pending {
        Cycle at;
        MemRequest* req;
        std::uint32_t access;
    };

    std::optional<DramCommand> pick(Cycle now);
    std::optional<DramCommand> pick_refresh(Cycle now);
    std::optional<DramCommand> pick_column(Cycle now, Direction dir);
    std::optional<DramCommand> pick_row(Cycle now);
    void apply(const DramCommand& cmd, Cycle now, MemRequest* req, std::uint32_t access);
    bool block_front(const ColumnAccess& a) const;
    bool has_ready_column_work(Direction dir) const;
    bool oldest_blocked(Direction dir) const;
    void update_mode();
    void post_responses(Cycle now);
    void retire(Cycle now);
    std::vector<MemRequest*> oldest_requests(std::size_t n);

    DramDevice& dram_;
    AddressMapping mapping_;
    ControllerConfig config_;
    AxiFabric* fabric_ = nullptr;

    std::list<MemRequest> reads_;
    std::list<MemRequest> writes_;
    std::size_t read_active_ = 0;
    std::size_t write_active_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_access_seq_ = 0;
    std::unordered_map<std::uint64_t, std::deque<std::uint64_t>> block_order_;
    std::deque<Pending> read_arrivals_;
    std::deque<Pending> write_ends_;
    std::deque<std::uint64_t> responses_;
    std::uint32_t read_buffer_reserved_ = 0;
    std::uint32_t write_buffer_used_ = 0;
    std::optional<Cycle> last_ar_accept_;
    std::optional<Cycle> last_aw_accept_;
    MemRequest* r_current_ = nullptr;
    Direction mode_ = Direction::Read;
    Cycle last_mode_column_ = 0;
    Choice choice_;

    // Refresh.
    std::deque<Cycle> refresh_due_;
    std::optional<Cycle> last_ref_;
    bool refresh_draining_ = false;

    // Per-slot scratch.
    std::vector<std::uint8_t> reserved_banks_;
    std::vector<std::uint8_t> col_ok_;

    std::unordered_map<std::uint64_t, DataWord> store_;
    ControllerStats stats_;
    Cycle now_ = 0;
};

}  // namespace ddr4bench
