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

#include "ddr4bench/axi.hpp"

#include <bit>
#include <cstring>
#include <ostream>

#include "ddr4bench/error.hpp"

namespace ddr4bench {

std::string_view to_string(Direction d) { return d == Direction::Read ? "read" : "write"; }

std::string_view to_string(BurstType b) {
    switch (b) {
        case BurstType::Fixed: return "fixed";
        case BurstType::Incr: return "incr";
        case BurstType::Wrap: return "wrap";
    }
    return "?";
}

void validate_burst(const AxiTransaction& txn) {
    if (txn.burst_len < 1 || txn.burst_len > kMaxBurstLen)
        throw Error(ErrorCode::InvalidBurst,
                    "burst length " + std::to_string(txn.burst_len) + " outside [1,128]");
    if (txn.beat_size == 0 || !std::has_single_bit(txn.beat_size))
        throw Error(ErrorCode::InvalidBurst, "beat size must be a power of two");
    switch (txn.burst_type) {
        case BurstType::Fixed:
            break;
        case BurstType::Incr: {
            std::uint64_t first_page = txn.start_addr / kAxiBoundary;
            std::uint64_t last = (txn.start_addr & ~std::uint64_t{txn.beat_size - 1}) +
                                 txn.bytes() - 1;
            if (last / kAxiBoundary != first_page)
                throw Error(ErrorCode::InvalidBurst, "INCR burst crosses a 4 KB boundary");
            break;
        }
        case BurstType::Wrap:
            if (txn.burst_len != 2 && txn.burst_len != 4 && txn.burst_len != 8 &&
                txn.burst_len != 16)
                throw Error(ErrorCode::InvalidBurst, "WRAP burst length must be 2, 4, 8 or 16");
            if (txn.start_addr % txn.beat_size != 0)
                throw Error(ErrorCode::InvalidBurst, "WRAP start address must be beat aligned");
            break;
    }
}

std::uint64_t beat_address(const AxiTransaction& txn, std::uint32_t i) {
    switch (txn.burst_type) {
        case BurstType::Fixed:
            return txn.start_addr;
        case BurstType::Incr: {
            std::uint64_t aligned = txn.start_addr & ~std::uint64_t{txn.beat_size - 1};
            return i == 0 ? txn.start_addr : aligned + std::uint64_t{i} * txn.beat_size;
        }
        case BurstType::Wrap: {
            std::uint64_t region = txn.bytes();
            std::uint64_t lower = txn.start_addr & ~(region - 1);
            std::uint64_t offset = (txn.start_addr - lower + std::uint64_t{i} * txn.beat_size) % region;
            return lower + offset;
        }
    }
    return txn.start_addr;
}

std::vector<std::uint64_t> beat_addresses(const AxiTransaction& txn) {
    validate_burst(txn);
    std::vector<std::uint64_t> out(txn.burst_len);
    for (std::uint32_t i = 0; i < txn.burst_len; ++i) out[i] = beat_address(txn, i);
    return out;
}

bool AxiFabric::post_ar(const AxiTransaction& txn) {
    if (ar_) return false;
    ar_ = txn;
    return true;
}

bool AxiFabric::post_aw(const AxiTransaction& txn) {
    if (aw_) return false;
    aw_ = txn;
    return true;
}

bool AxiFabric::post_w(const WriteBeat& beat) {
    if (w_) return false;
    w_ = beat;
    return true;
}

bool AxiFabric::post_r(const ReadBeat& beat) {
    if (r_) return false;
    r_ = beat;
    return true;
}

bool AxiFabric::post_b(const WriteResponse& resp) {
    if (b_) return false;
    b_ = resp;
    return true;
}

void AxiFabric::record(Cycle c, const char* ch, std::string_view ev, std::uint64_t id,
                       std::uint64_t addr) {
    if (!tracing_) return;
    TraceRecord r{c, {}, ev, id, addr};
    std::strncpy(r.channel, ch, sizeof(r.channel) - 1);
    r.channel[sizeof(r.channel) - 1] = '\0';
    trace_.push_back(r);
}

HandshakeEvents AxiFabric::tick_axi(Cycle axi_cycle) {
    HandshakeEvents ev;
    if (aw_ && slave_->aw_ready(axi_cycle)) {
        AxiTransaction txn = *aw_;
        aw_.reset();
        txn.state = AxiTransaction::State::DataPhase;
        txn.issue_cycle = axi_cycle;
        writes_[txn.id] = Track{txn.burst_len, 0, txn.start_addr};
        ++outstanding_.writes_in_flight;
        slave_->on_aw(txn, axi_cycle);
        master_->on_aw_accepted(txn, axi_cycle);
        record(axi_cycle, "AW", "addr", txn.id, txn.start_addr);
        ev.aw = true;
    }
    if (w_ && slave_->w_ready(axi_cycle)) {
        WriteBeat beat = *w_;
        w_.reset();
        if (auto it = writes_.find(beat.id); it != writes_.end()) ++it->second.beats;
        slave_->on_w(beat, axi_cycle);
        record(axi_cycle, "W", beat.last ? "last" : "beat", beat.id, beat.beat_index);
        ev.w = true;
    }
    if (ar_ && slave_->ar_ready(axi_cycle)) {
        AxiTransaction txn = *ar_;
        ar_.reset();
        txn.state = AxiTransaction::State::DataPhase;
        txn.issue_cycle = axi_cycle;
        reads_[txn.id] = Track{txn.burst_len, 0, txn.start_addr};
        ++outstanding_.reads_in_flight;
        slave_->on_ar(txn, axi_cycle);
        master_->on_ar_accepted(txn, axi_cycle);
        record(axi_cycle, "AR", "addr", txn.id, txn.start_addr);
        ev.ar = true;
    }
    if (r_ && master_->r_ready(axi_cycle)) {
        ReadBeat beat = *r_;
        r_.reset();
        auto it = reads_.find(beat.id);
        if (it != reads_.end()) {
            ++it->second.beats;
            if (beat.last) {
                if (it->second.beats != it->second.burst_len) ++beat_violations_;
                reads_.erase(it);
                --outstanding_.reads_in_flight;
            }
        }
        master_->on_r(beat, axi_cycle);
        record(axi_cycle, "R", beat.last ? "last" : "beat", beat.id, beat.beat_index);
        ev.r = true;
    }
    if (b_ && master_->b_ready(axi_cycle)) {
        WriteResponse resp = *b_;
        b_.reset();
        if (auto it = writes_.find(resp.id); it != writes_.end()) {
            if (it->second.beats != it->second.burst_len) ++beat_violations_;
            writes_.erase(it);
            --outstanding_.writes_in_flight;
        }
        master_->on_b(resp, axi_cycle);
        record(axi_cycle, "B", "resp", resp.id, 0);
        ev.b = true;
    }
    return ev;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
    os << "cycle,channel,event,id,addr\n";
    for (const auto& r : trace)
        os << r.cycle << ',' << r.channel << ',' << r.event << ',' << r.id << ',' << r.addr << '\n';
}

}  // namespace ddr4bench
