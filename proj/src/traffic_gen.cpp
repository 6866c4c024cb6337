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

#include "ddr4bench/traffic_gen.hpp"

#include <bit>

#include "ddr4bench/error.hpp"

namespace ddr4bench {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t round_up(std::uint64_t v, std::uint64_t align) { return (v + align - 1) / align * align; }

bool seq_uses_pages(const TrafficConfig& cfg) {
    std::uint64_t fp = cfg.footprint();
    return cfg.burst_type == BurstType::Incr &&
           (kAxiBoundary % fp != 0 || cfg.base % fp != 0);
}

std::uint64_t seq_slots(const TrafficConfig& cfg) {
    std::uint64_t fp = cfg.footprint();
    if (cfg.limit <= cfg.base) return 0;
    if (!seq_uses_pages(cfg)) return (cfg.limit - cfg.base) / fp;
    std::uint64_t origin = round_up(cfg.base, kAxiBoundary);
    if (cfg.limit <= origin) return 0;
    return (cfg.limit - origin) / kAxiBoundary * (kAxiBoundary / fp);
}

std::uint64_t seq_slot_addr(const TrafficConfig& cfg, std::uint64_t j) {
    std::uint64_t fp = cfg.footprint();
    if (!seq_uses_pages(cfg)) return cfg.base + j * fp;
    std::uint64_t per_page = kAxiBoundary / fp;
    return round_up(cfg.base, kAxiBoundary) + (j / per_page) * kAxiBoundary + (j % per_page) * fp;
}

struct RandomSlots {
    std::uint64_t first = 0;
    std::uint64_t align = 0;
    std::uint64_t count = 0;
};

RandomSlots random_slots(const TrafficConfig& cfg) {
    RandomSlots r;
    r.align = std::bit_ceil(cfg.footprint());
    r.first = round_up(cfg.base, r.align);
    r.count = cfg.limit > r.first ? (cfg.limit - r.first) / r.align : 0;
    return r;
}

}  // namespace

std::uint64_t TrafficConfig::reads_in_batch() const {
    switch (op_mode) {
        case OpMode::ReadOnly: return batch_len;
        case OpMode::WriteOnly: return 0;
        case OpMode::Mixed: return batch_len * read_fraction.num / read_fraction.den;
    }
    return 0;
}

std::uint64_t TrafficConfig::writes_in_batch() const { return batch_len - reads_in_batch(); }

void TrafficConfig::validate(std::uint64_t capacity) const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::BadConfig, m); };
    if (batch_len < 1) bad("batch length must be at least 1");
    if (burst_len < 1 || burst_len > kMaxBurstLen) bad("burst length must be in [1,128]");
    if (burst_type == BurstType::Wrap && burst_len != 2 && burst_len != 4 && burst_len != 8 &&
        burst_len != 16)
        bad("wrap burst length must be 2, 4, 8 or 16");
    if (limit > capacity) bad("address range exceeds channel capacity");
    if (limit <= base) bad("address range is empty");
    if (base % kBeatBytes != 0) bad("range base must be beat aligned");
    if (burst_type == BurstType::Wrap && base % footprint() != 0)
        bad("wrap bursts need a range base aligned to the burst footprint");
    if (op_mode == OpMode::Mixed &&
        (read_fraction.den == 0 || read_fraction.num == 0 || read_fraction.num >= read_fraction.den))
        bad("mixed read fraction must be in (0,1)");
    if (data_pattern == DataPattern::Constant && constant_byte == 0)
        bad("constant data pattern must be non-zero");
    if (addressing == Addressing::Sequential ? seq_slots(*this) == 0 : random_slots(*this).count == 0)
        bad("address range too small for one burst");
}

bool mixed_is_read(const Fraction& f, std::uint64_t i) {
    return (i + 1) * f.num / f.den > i * f.num / f.den;
}

std::uint64_t mixed_position(const Fraction& f, Direction direction, std::uint64_t index) {
    // Smallest k whose prefix [0, k] holds index + 1 transactions of this direction.
    auto count = [&](std::uint64_t k) {
        std::uint64_t reads = (k + 1) * f.num / f.den;
        return direction == Direction::Read ? reads : k + 1 - reads;
    };
    std::uint64_t lo = index;
    std::uint64_t hi = index;
    while (count(hi) < index + 1) hi = hi * 2 + 1;
    while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (count(mid) >= index + 1) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

std::uint64_t next_address(const TrafficConfig& cfg, Direction direction, std::uint64_t index) {
    bool mixed = cfg.op_mode == OpMode::Mixed;
    if (cfg.addressing == Addressing::Sequential) {
        // Mixed batches walk one sequence, alternating direction per slot.
        std::uint64_t k = mixed ? mixed_position(cfg.read_fraction, direction, index) : index;
        return seq_slot_addr(cfg, k % seq_slots(cfg));
    }
    RandomSlots r = random_slots(cfg);
    std::uint64_t stream = mixed && direction == Direction::Read ? 0xD1B54A32D192ED03ull : 0;
    std::uint64_t h = splitmix64(splitmix64(cfg.seed ^ stream) + index);
    return r.first + (h % r.count) * r.align;
}

std::uint64_t burst_start_address(const TrafficConfig& cfg, std::uint64_t slot_addr) {
    if (cfg.burst_type == BurstType::Wrap) return slot_addr + (cfg.burst_len / 2) * kBeatBytes;
    return slot_addr;
}

DataWord gen_data(const TrafficConfig& cfg, std::uint64_t addr, std::uint32_t beat_index) {
    DataWord w{};
    switch (cfg.data_pattern) {
        case DataPattern::Lfsr: {
            // xorshift64 from a non-zero per-beat state never yields zero.
            std::uint64_t s = splitmix64(cfg.data_seed ^ splitmix64(addr ^ (std::uint64_t{beat_index} << 52)));
            if (s == 0) s = 0x2545F4914F6CDD1Dull;
            for (auto& word : w) {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                word = s;
            }
            break;
        }
        case DataPattern::AddressHash:
            for (std::size_t k = 0; k < w.size(); ++k) {
                w[k] = splitmix64((addr << 2 | k) ^ (std::uint64_t{beat_index} * 0x9E3779B97F4A7C15ull));
                if (w[k] == 0) w[k] = addr | 1;
            }
            break;
        case DataPattern::Constant: {
            std::uint64_t b = cfg.constant_byte;
            std::uint64_t word = b * 0x0101010101010101ull;
            w.fill(word);
            break;
        }
    }
    return w;
}

CheckResult check_read(const TrafficConfig& cfg, std::uint64_t addr, std::uint32_t beat_index,
                       const DataWord& observed) {
    return observed == gen_data(cfg, addr, beat_index) ? CheckResult::Ok : CheckResult::Mismatch;
}

GateDecision signal_gate(Signaling mode, bool address_slot_free, bool remaining,
                         std::uint64_t outstanding) {
    GateDecision d;
    switch (mode) {
        case Signaling::NonBlocking:
            d.issue_address = address_slot_free && remaining;
            d.response_ready = outstanding > 0;
            break;
        case Signaling::Blocking:
            d.issue_address = address_slot_free && remaining && outstanding == 0;
            d.response_ready = outstanding > 0;
            break;
        case Signaling::Aggressive:
            d.issue_address = address_slot_free && remaining;
            d.response_ready = true;
            break;
    }
    return d;
}

std::uint32_t TrafficGenerator::pattern_slot(const TrafficConfig& cfg) {
    for (std::uint32_t i = 0; i < patterns_.size(); ++i) {
        const auto& p = patterns_[i];
        if (p.data_pattern == cfg.data_pattern && p.data_seed == cfg.data_seed &&
            p.constant_byte == cfg.constant_byte)
            return i;
    }
    patterns_.push_back(cfg);
    return static_cast<std::uint32_t>(patterns_.size() - 1);
}

void TrafficGenerator::start_batch(const TrafficConfig& cfg) {
    cfg_ = cfg;
    active_ = true;
    reads_total_ = cfg.reads_in_batch();
    writes_total_ = cfg.writes_in_batch();
    reads_posted_ = writes_posted_ = reads_done_ = writes_done_ = 0;
    first_ar_.reset();
    last_r_.reset();
    first_aw_.reset();
    last_b_.reset();
    current_pattern_ = pattern_slot(cfg);
}

bool TrafficGenerator::batch_done() const {
    return active_ && reads_done_ == reads_total_ && writes_done_ == writes_total_;
}

void TrafficGenerator::finish_batch() {
    if (first_ar_ && last_r_) counters_.read_cycles += *last_r_ - *first_ar_ + 1;
    if (first_aw_ && last_b_) counters_.write_cycles += *last_b_ - *first_aw_ + 1;
    active_ = false;
}

AxiTransaction TrafficGenerator::make_txn(Direction dir, std::uint64_t index) {
    AxiTransaction txn;
    txn.id = next_id_++;
    txn.direction = dir;
    txn.start_addr = burst_start_address(cfg_, next_address(cfg_, dir, index));
    txn.beat_size = kBeatBytes;
    txn.burst_len = cfg_.burst_len;
    txn.burst_type = cfg_.burst_type;
    validate_burst(txn);
    return txn;
}

void TrafficGenerator::tick(Cycle) {
    if (!active_) return;
    auto out = fabric_.track_outstanding();
    // Mixed batches post addresses in pattern order; a read and a write that
    // are adjacent in the pattern can still go out in the same cycle.
    const bool mixed = cfg_.op_mode == OpMode::Mixed;
    auto in_turn = [&](Direction d, std::uint64_t posted) {
        return !mixed ||
               mixed_position(cfg_.read_fraction, d, posted) == reads_posted_ + writes_posted_;
    };
    auto try_read = [&] {
        if (reads_posted_ >= reads_total_ || !in_turn(Direction::Read, reads_posted_)) return;
        auto g = signal_gate(cfg_.signaling, !fabric_.ar_valid(), true, out.reads_in_flight);
        if (!g.issue_address) return;
        fabric_.post_ar(make_txn(Direction::Read, reads_posted_));
        ++reads_posted_;
    };
    auto try_write = [&] {
        if (writes_posted_ >= writes_total_ || !in_turn(Direction::Write, writes_posted_)) return;
        auto g = signal_gate(cfg_.signaling, !fabric_.aw_valid(), true,
                             out.writes_in_flight + w_queue_.size());
        if (!g.issue_address) return;
        AxiTransaction txn = make_txn(Direction::Write, writes_posted_);
        fabric_.post_aw(txn);
        w_queue_.push_back({txn, 0});
        ++writes_posted_;
    };
    if (mixed && !mixed_is_read(cfg_.read_fraction, reads_posted_ + writes_posted_)) {
        try_write();
        try_read();
    } else {
        try_read();
        try_write();
    }
    if (!w_queue_.empty() && !fabric_.w_valid()) {
        PendingWrite& pw = w_queue_.front();
        WriteBeat beat;
        beat.id = pw.txn.id;
        beat.beat_index = pw.next_beat;
        beat.data = gen_data(cfg_, beat_address(pw.txn, pw.next_beat), pw.next_beat);
        beat.last = pw.next_beat + 1 == pw.txn.burst_len;
        fabric_.post_w(beat);
        if (++pw.next_beat == pw.txn.burst_len) w_queue_.pop_front();
    }
}

bool TrafficGenerator::r_ready(Cycle) const {
    if (hold_) return false;
    return signal_gate(cfg_.signaling, false, false, reads_in_flight_.size()).response_ready;
}

bool TrafficGenerator::b_ready(Cycle) const {
    if (hold_) return false;
    auto out = fabric_.track_outstanding();
    return signal_gate(cfg_.signaling, false, false, out.writes_in_flight).response_ready;
}

void TrafficGenerator::on_ar_accepted(const AxiTransaction& txn, Cycle axi_cycle) {
    if (!first_ar_) first_ar_ = axi_cycle;
    PendingRead pr;
    pr.txn = txn;
    pr.expect.resize(txn.burst_len);
    for (std::uint32_t i = 0; i < txn.burst_len; ++i) {
        auto it = shadow_.find(beat_address(txn, i));
        if (it != shadow_.end()) pr.expect[i] = it->second;
    }
    reads_in_flight_.emplace(txn.id, std::move(pr));
}

void TrafficGenerator::on_aw_accepted(const AxiTransaction& txn, Cycle axi_cycle) {
    if (!first_aw_) first_aw_ = axi_cycle;
    for (std::uint32_t i = 0; i < txn.burst_len; ++i)
        shadow_[beat_address(txn, i)] = Written{i, current_pattern_};
}

void TrafficGenerator::on_r(const ReadBeat& beat, Cycle axi_cycle) {
    auto it = reads_in_flight_.find(beat.id);
    if (it == reads_in_flight_.end()) return;
    PendingRead& pr = it->second;
    std::uint64_t addr = beat_address(pr.txn, beat.beat_index);
    const auto& expect = pr.expect[beat.beat_index];
    if (!expect) {
        ++counters_.unchecked_reads;
    } else {
        const TrafficConfig& wcfg = patterns_[expect->pattern];
        if (check_read(wcfg, addr, expect->beat_index, beat.data) == CheckResult::Mismatch) {
            ++counters_.data_errors;
            if (!first_error_)
                first_error_ = DataErrorDetail{addr, beat.id, beat.beat_index,
                                               gen_data(wcfg, addr, expect->beat_index), beat.data};
        }
    }
    if (beat.last) {
        ++reads_done_;
        ++counters_.read_tx;
        counters_.read_bytes += pr.txn.bytes();
        last_r_ = axi_cycle;
        reads_in_flight_.erase(it);
    }
}

void TrafficGenerator::on_b(const WriteResponse&, Cycle axi_cycle) {
    ++writes_done_;
    ++counters_.write_tx;
    counters_.write_bytes += cfg_.footprint();
    last_b_ = axi_cycle;
}

}  // namespace ddr4bench
