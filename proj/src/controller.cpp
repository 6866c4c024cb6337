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

#include "ddr4bench/controller.hpp"

#include <algorithm>
#include <bit>
#include <ostream>

#include "ddr4bench/error.hpp"

namespace ddr4bench {

namespace {

unsigned log2u(std::uint64_t v) { return static_cast<unsigned>(std::countr_zero(v)); }

// Column accesses examined per request beyond its first unissued one.
constexpr std::size_t kLookahead = 32;

// Memory cycles the preferred direction may go without a column command
// while the other direction has one ready, before the mode flips.
constexpr Cycle kModeStarvation = 32;

}  // namespace

AddressMapping::AddressMapping(const DramGeometry& geometry)
    : AddressMapping(geometry,
                     {AddrField::BankGroup, AddrField::Bank, AddrField::ColumnHigh, AddrField::Row}) {}

AddressMapping::AddressMapping(const DramGeometry& geometry, std::vector<AddrField> lsb_first) {
    geometry.validate();
    std::uint32_t word_bytes = geometry.bus_width_bits / 8;
    word_bits_ = log2u(word_bytes);
    col_low_bits_ = 3;  // BL8
    burst_bytes_ = geometry.burst_bytes();
    capacity_ = geometry.capacity_bytes();
    if (lsb_first.size() != 4)
        throw Error(ErrorCode::BadConfig, "address mapping must list four fields");
    unsigned shift = word_bits_ + col_low_bits_;
    for (AddrField f : lsb_first) {
        unsigned width = 0;
        switch (f) {
            case AddrField::BankGroup: width = log2u(geometry.bank_groups); break;
            case AddrField::Bank: width = log2u(geometry.banks_per_group); break;
            case AddrField::ColumnHigh: width = log2u(geometry.columns) - col_low_bits_; break;
            case AddrField::Row: width = log2u(geometry.rows); break;
        }
        for (const auto& s : slices_)
            if (s.field == f) throw Error(ErrorCode::BadConfig, "address field listed twice");
        slices_.push_back({f, shift, width});
        shift += width;
    }
}

DramCoord AddressMapping::decode(std::uint64_t addr) const {
    if (addr >= capacity_)
        throw Error(ErrorCode::OutOfRange, "address " + std::to_string(addr) + " beyond capacity");
    DramCoord c;
    c.byte_offset = static_cast<std::uint32_t>(addr & ((1u << word_bits_) - 1));
    std::uint32_t col_low =
        static_cast<std::uint32_t>((addr >> word_bits_) & ((1u << col_low_bits_) - 1));
    std::uint32_t col_high = 0;
    for (const auto& s : slices_) {
        auto v = static_cast<std::uint32_t>((addr >> s.shift) & ((std::uint64_t{1} << s.width) - 1));
        switch (s.field) {
            case AddrField::BankGroup: c.bank_group = v; break;
            case AddrField::Bank: c.bank = v; break;
            case AddrField::ColumnHigh: col_high = v; break;
            case AddrField::Row: c.row = v; break;
        }
    }
    c.column = (col_high << col_low_bits_) | col_low;
    return c;
}

std::uint64_t AddressMapping::encode(const DramCoord& c) const {
    std::uint64_t addr = c.byte_offset;
    addr |= std::uint64_t{c.column & ((1u << col_low_bits_) - 1)} << word_bits_;
    for (const auto& s : slices_) {
        std::uint64_t v = 0;
        switch (s.field) {
            case AddrField::BankGroup: v = c.bank_group; break;
            case AddrField::Bank: v = c.bank; break;
            case AddrField::ColumnHigh: v = c.column >> col_low_bits_; break;
            case AddrField::Row: v = c.row; break;
        }
        addr |= (v & ((std::uint64_t{1} << s.width) - 1)) << s.shift;
    }
    return addr;
}

void ControllerConfig::validate() const {
    if (read_queue_depth == 0 || write_queue_depth == 0)
        throw Error(ErrorCode::BadConfig, "queue depths must be positive");
    if (command_slots == 0) throw Error(ErrorCode::BadConfig, "need at least one command slot");
    if (addr_accept_interval == 0)
        throw Error(ErrorCode::BadConfig, "address accept interval must be positive");
    if (read_buffer_beats < 2 || write_buffer_beats < 2)
        throw Error(ErrorCode::BadConfig, "data buffers must hold at least one burst");
    if (write_low_watermark > write_high_watermark)
        throw Error(ErrorCode::BadConfig, "write low watermark above high watermark");
    if (write_high_watermark > write_buffer_beats)
        throw Error(ErrorCode::BadConfig, "write high watermark exceeds the write buffer");
    if (write_staging_beats < 2)
        throw Error(ErrorCode::BadConfig, "write staging must hold at least one burst");
    if (activate_window == 0) throw Error(ErrorCode::BadConfig, "activate window must be positive");
}

MemRequest make_request(const AxiTransaction& txn, const AddressMapping& mapping,
                        std::uint32_t beat_bytes) {
    MemRequest req;
    req.id = txn.id;
    req.kind = txn.direction;
    req.beat_addrs = beat_addresses(txn);
    req.bytes = txn.bytes();
    const std::uint64_t burst = mapping.burst_bytes();
    const auto n = static_cast<std::uint32_t>(req.beat_addrs.size());
    for (std::uint32_t i = 0; i < n;) {
        std::uint64_t a = req.beat_addrs[i];
        std::uint64_t block = a & ~(burst - 1);
        ColumnAccess acc;
        acc.block_addr = block;
        acc.coord = mapping.decode(block);
        acc.first_beat = i;
        acc.beats = 1;
        if (i + 1 < n && a % burst == 0 && req.beat_addrs[i + 1] == a + beat_bytes &&
            beat_bytes * 2 <= burst)
            acc.beats = 2;
        // Validate the far end of the beat too.
        mapping.decode(a + beat_bytes - 1);
        req.dram_bursts.push_back(acc);
        i += acc.beats;
    }
    if (txn.direction == Direction::Read) {
        req.data.resize(n);
        req.beat_ready.assign(n, 0);
    } else {
        req.data.resize(n);
    }
    return req;
}

void write_controller_stats_csv(std::ostream& os, const ControllerStats& s) {
    os << "reads_accepted,writes_accepted,bytes_accepted,bytes_completed,column_commands,"
          "activates,precharges,refreshes,cycles,row_hit_rate,avg_read_queue,avg_write_queue,"
          "max_refresh_gap\n";
    os << s.reads_accepted << ',' << s.writes_accepted << ',' << s.bytes_accepted << ','
       << s.bytes_completed << ',' << s.column_commands << ',' << s.activates << ','
       << s.precharges << ',' << s.refreshes << ',' << s.cycles << ',' << s.row_hit_rate() << ','
       << s.avg_read_queue() << ',' << s.avg_write_queue() << ',' << s.max_refresh_gap << '\n';
}

MemController::MemController(DramDevice& dram, AddressMapping mapping, ControllerConfig config)
    : dram_(dram),
      mapping_(std::move(mapping)),
      config_(config),
      reserved_banks_(dram.geometry().total_banks()),
      col_ok_(dram.geometry().total_banks()) {
    config_.validate();
    if (config_.refresh_postpone == 0) config_.refresh_postpone = dram.timing().tREFI / 2;
}

bool MemController::accept(MemRequest req, Cycle now) {
    bool is_read = req.kind == Direction::Read;
    if (is_read ? read_active_ >= config_.read_queue_depth
                : write_active_ >= config_.write_queue_depth)
        return false;
    if (req.dram_bursts.empty()) throw Error(ErrorCode::BadConfig, "request without accesses");
    req.arrival_cycle = now;
    req.seq = next_seq_++;
    for (auto& a : req.dram_bursts) {
        a.seq = next_access_seq_++;
        block_order_[a.block_addr].push_back(a.seq);
    }
    if (req.data.size() != req.beat_addrs.size()) req.data.resize(req.beat_addrs.size());
    if (is_read && req.beat_ready.size() != req.beat_addrs.size())
        req.beat_ready.assign(req.beat_addrs.size(), 0);
    stats_.bytes_accepted += req.bytes;
    if (is_read) {
        ++stats_.reads_accepted;
        ++read_active_;
        reads_.push_back(std::move(req));
    } else {
        ++stats_.writes_accepted;
        ++write_active_;
        writes_.push_back(std::move(req));
    }
    return true;
}

bool MemController::ar_ready(Cycle axi_cycle) const {
    if (read_active_ >= config_.read_queue_depth) return false;
    return !last_ar_accept_ || axi_cycle >= *last_ar_accept_ + config_.addr_accept_interval;
}

bool MemController::aw_ready(Cycle axi_cycle) const {
    if (write_active_ >= config_.write_queue_depth) return false;
    return !last_aw_accept_ || axi_cycle >= *last_aw_accept_ + config_.addr_accept_interval;
}

bool MemController::w_ready(Cycle) const {
    if (write_buffer_used_ >= config_.write_buffer_beats) return false;
    const MemRequest* target = nullptr;
    for (const auto& w : writes_) {
        if (w.beats_received < w.beat_addrs.size()) {
            target = &w;
            break;
        }
    }
    if (!target) return false;
    if (config_.write_staging_beats >= config_.write_buffer_beats) return true;

    auto row_open = [&](const ColumnAccess& a) {
        const auto& bank = dram_.bank(a.coord.bank_group, a.coord.bank);
        return !bank.open || bank.open_row == a.coord.row;
    };
    // Beats waiting on a row conflict occupy the staging area.
    std::uint32_t staged = 0;
    for (const auto& w : writes_) {
        for (std::size_t i = w.first_unissued; i < w.dram_bursts.size(); ++i) {
            const ColumnAccess& a = w.dram_bursts[i];
            if (a.first_beat >= w.beats_received) break;
            if (a.issued || row_open(a)) continue;
            staged += std::min<std::uint32_t>(a.beats, w.beats_received - a.first_beat);
        }
        if (staged >= config_.write_staging_beats) break;
    }
    if (staged < config_.write_staging_beats) return true;
    for (std::size_t i = target->first_unissued; i < target->dram_bursts.size(); ++i) {
        const ColumnAccess& a = target->dram_bursts[i];
        if (target->beats_received < a.first_beat + a.beats) return row_open(a);
    }
    return true;
}

void MemController::on_ar(const AxiTransaction& txn, Cycle axi_cycle) {
    if (!accept(make_request(txn, mapping_), now_))
        throw Error(ErrorCode::IllegalCommand, "read address accepted while queue full");
    last_ar_accept_ = axi_cycle;
}

void MemController::on_aw(const AxiTransaction& txn, Cycle axi_cycle) {
    if (!accept(make_request(txn, mapping_), now_))
        throw Error(ErrorCode::IllegalCommand, "write address accepted while queue full");
    last_aw_accept_ = axi_cycle;
}

void MemController::on_w(const WriteBeat& beat, Cycle) {
    for (auto& w : writes_) {
        if (w.beats_received < w.beat_addrs.size()) {
            w.data[w.beats_received] = beat.data;
            ++w.beats_received;
            ++write_buffer_used_;
            return;
        }
    }
    throw Error(ErrorCode::IllegalCommand, "write data without a pending write address");
}

bool MemController::idle() const {
    return reads_.empty() && writes_.empty() && responses_.empty();
}

std::vector<ReadCompletion> MemController::complete(Cycle now) {
    std::vector<ReadCompletion> out;
    while (!read_arrivals_.empty() && read_arrivals_.front().at <= now) {
        Pending p = read_arrivals_.front();
        read_arrivals_.pop_front();
        MemRequest& r = *p.req;
        const ColumnAccess& a = r.dram_bursts[p.access];
        for (std::uint32_t k = 0; k < a.beats; ++k) r.beat_ready[a.first_beat + k] = 1;
        out.push_back({r.id, a.first_beat, a.beats});
        if (++r.done == r.dram_bursts.size()) {
            r.retired = true;
            --read_active_;
        }
    }
    while (!write_ends_.empty() && write_ends_.front().at <= now) {
        Pending p = write_ends_.front();
        write_ends_.pop_front();
        MemRequest& w = *p.req;
        if (++w.done == w.dram_bursts.size()) {
            responses_.push_back(w.id);
            w.retire_at = now + dram_.timing().tWR;
            stats_.bytes_completed += w.bytes;
        }
    }
    return out;
}

void MemController::retire(Cycle now) {
    for (auto& w : writes_) {
        if (!w.retired && w.done == w.dram_bursts.size() && now >= w.retire_at) {
            w.retired = true;
            --write_active_;
        }
    }
    writes_.remove_if([](const MemRequest& w) { return w.retired && w.response_sent; });
    reads_.remove_if([](const MemRequest& r) {
        return r.retired && r.next_beat == r.beat_addrs.size();
    });
}

bool MemController::block_front(const ColumnAccess& a) const {
    auto it = block_order_.find(a.block_addr);
    return it != block_order_.end() && !it->second.empty() && it->second.front() == a.seq;
}

std::vector<MemRequest*> MemController::oldest_requests(std::size_t n) {
    // Row management follows the direction being served; the other
    // direction is used only when the current one has nothing queued.
    std::vector<MemRequest*> out;
    auto collect = [&](std::list<MemRequest>& list) {
        for (auto& r : list) {
            if (out.size() >= n) break;
            if (!r.retired) out.push_back(&r);
        }
    };
    collect(mode_ == Direction::Read ? reads_ : writes_);
    if (out.empty()) collect(mode_ == Direction::Read ? writes_ : reads_);
    return out;
}

std::optional<DramCommand> MemController::pick_refresh(Cycle now) {
    const auto& g = dram_.geometry();
    for (std::uint32_t bg = 0; bg < g.bank_groups; ++bg) {
        for (std::uint32_t b = 0; b < g.banks_per_group; ++b) {
            if (!dram_.bank(bg, b).open) continue;
            auto pre = DramCommand::pre(bg, b);
            if (dram_.can_issue(pre, now)) return pre;
        }
    }
    if (dram_.all_banks_closed() && dram_.can_issue(DramCommand::ref(), now))
        return DramCommand::ref();
    return std::nullopt;
}

std::optional<DramCommand> MemController::pick_column(Cycle now, Direction dir) {
    const auto& g = dram_.geometry();
    const bool is_read = dir == Direction::Read;
    bool any = false;
    for (std::uint32_t bg = 0; bg < g.bank_groups; ++bg) {
        for (std::uint32_t b = 0; b < g.banks_per_group; ++b) {
            std::size_t idx = static_cast<std::size_t>(bg) * g.banks_per_group + b;
            const auto& bank = dram_.bank(bg, b);
            bool ok = false;
            if (bank.open) {
                DramCommand probe = is_read ? DramCommand::rd(bg, b, bank.open_row, 0)
                                            : DramCommand::wr(bg, b, bank.open_row, 0);
                ok = dram_.can_issue(probe, now);
            }
            col_ok_[idx] = ok;
            any = any || ok;
        }
    }
    if (!any) return std::nullopt;

    auto& list = is_read ? reads_ : writes_;
    // Beats ahead of each read in the in-order return stream.
    std::size_t ahead = 0;
    for (auto& req : list) {
        std::size_t before = ahead;
        if (is_read) ahead += req.beat_addrs.size() - req.next_beat;
        if (req.retired || req.first_unissued >= req.dram_bursts.size()) continue;
        std::size_t end = std::min(req.dram_bursts.size(), req.first_unissued + kLookahead);
        for (std::size_t i = req.first_unissued; i < end; ++i) {
            ColumnAccess& a = req.dram_bursts[i];
            if (a.issued) continue;
            const auto& c = a.coord;
            std::size_t idx = static_cast<std::size_t>(c.bank_group) * g.banks_per_group + c.bank;
            if (!col_ok_[idx]) continue;
            if (reserved_banks_[idx]) continue;  // waiting to close for the oldest request
            const auto& bank = dram_.bank(c.bank_group, c.bank);
            if (bank.open_row != c.row) continue;
            if (!block_front(a)) continue;
            if (is_read) {
                if (read_buffer_reserved_ + a.beats > config_.read_buffer_beats) continue;
                if (before + a.first_beat + a.beats - req.next_beat > config_.read_buffer_beats)
                    continue;
            } else {
                if (req.beats_received < a.first_beat + a.beats) continue;
            }
            DramCommand cmd = is_read ? DramCommand::rd(c.bank_group, c.bank, c.row, c.column)
                                      : DramCommand::wr(c.bank_group, c.bank, c.row, c.column);
            choice_ = {cmd, &req, static_cast<std::uint32_t>(i)};
            return cmd;
        }
    }
    return std::nullopt;
}

std::optional<DramCommand> MemController::pick_row(Cycle now) {
    const auto& g = dram_.geometry();
    auto window = oldest_requests(config_.activate_window);
    // Rows still needed by an older request in the window must not be
    // closed on behalf of a younger one.
    std::vector<std::int64_t> needed(g.total_banks(), -1);
    for (MemRequest* req : window) {
        for (std::size_t i = req->first_unissued; i < req->dram_bursts.size(); ++i) {
            ColumnAccess& a = req->dram_bursts[i];
            if (a.issued) continue;
            const auto& c = a.coord;
            std::size_t idx = static_cast<std::size_t>(c.bank_group) * g.banks_per_group + c.bank;
            const auto& bank = dram_.bank(c.bank_group, c.bank);
            if (bank.open) {
                if (bank.open_row == c.row) {
                    if (needed[idx] < 0) needed[idx] = c.row;
                    continue;
                }
                if (needed[idx] >= 0 && static_cast<std::uint32_t>(needed[idx]) == bank.open_row)
                    continue;
                auto pre = DramCommand::pre(c.bank_group, c.bank);
                if (dram_.can_issue(pre, now)) {
                    choice_ = {pre, req, static_cast<std::uint32_t>(i)};
                    return pre;
                }
            } else {
                if (needed[idx] >= 0) continue;
                auto act = DramCommand::act(c.bank_group, c.bank, c.row);
                if (dram_.can_issue(act, now)) {
                    choice_ = {act, req, static_cast<std::uint32_t>(i)};
                    return act;
                }
            }
            if (needed[idx] < 0) needed[idx] = c.row;
        }
    }
    return std::nullopt;
}

bool MemController::oldest_blocked(Direction dir) const {
    const auto& list = dir == Direction::Read ? reads_ : writes_;
    for (const auto& req : list) {
        if (req.retired || req.first_unissued >= req.dram_bursts.size()) continue;
        for (std::size_t i = req.first_unissued; i < req.dram_bursts.size(); ++i) {
            const auto& a = req.dram_bursts[i];
            if (!a.issued && block_front(a)) return false;
        }
        return true;
    }
    return false;
}

bool MemController::has_ready_column_work(Direction dir) const {
    // A direction whose oldest request waits on the other one's data is not
    // ready; otherwise its row management could hold the banks forever.
    if (oldest_blocked(dir)) return false;
    const auto& list = dir == Direction::Read ? reads_ : writes_;
    for (const auto& req : list) {
        if (req.retired || req.first_unissued >= req.dram_bursts.size()) continue;
        if (dir == Direction::Read) return true;
        const auto& a = req.dram_bursts[req.first_unissued];
        if (req.beats_received >= a.first_beat + a.beats) return true;
    }
    return false;
}

void MemController::update_mode() {
    // Drain pressure counts buffered beats and fully buffered requests, so
    // short bursts that never fill the buffer still trigger a drain.
    std::uint32_t buffered_reqs = 0;
    for (const auto& w : writes_)
        if (!w.retired && w.first_unissued < w.dram_bursts.size() &&
            w.beats_received == w.beat_addrs.size())
            ++buffered_reqs;
    const std::uint32_t req_high = config_.write_queue_depth;
    const std::uint32_t req_low = config_.write_queue_depth / 4;
    bool read_work = has_ready_column_work(Direction::Read);
    bool write_ready = has_ready_column_work(Direction::Write);
    if (mode_ == Direction::Read) {
        if (write_ready && (write_buffer_used_ >= config_.write_high_watermark ||
                            buffered_reqs >= req_high || !read_work))
            mode_ = Direction::Write;
    } else {
        if (read_work && (!write_ready || (write_buffer_used_ <= config_.write_low_watermark &&
                                           buffered_reqs <= req_low)))
            mode_ = Direction::Read;
    }
}

void MemController::apply(const DramCommand& cmd, Cycle now, MemRequest* req,
                          std::uint32_t access) {
    auto window = dram_.issue(cmd, now);
    switch (cmd.kind) {
        case CommandKind::ACT:
            ++stats_.activates;
            return;
        case CommandKind::PRE:
            ++stats_.precharges;
            return;
        case CommandKind::REF:
            ++stats_.refreshes;
            if (last_ref_) stats_.max_refresh_gap = std::max(stats_.max_refresh_gap, now - *last_ref_);
            last_ref_ = now;
            if (!refresh_due_.empty()) refresh_due_.pop_front();
            return;
        case CommandKind::RD:
        case CommandKind::WR:
            break;
    }
    ++stats_.column_commands;
    ColumnAccess& a = req->dram_bursts[access];
    a.issued = true;
    ++req->issued;
    while (req->first_unissued < req->dram_bursts.size() &&
           req->dram_bursts[req->first_unissued].issued)
        ++req->first_unissued;
    auto it = block_order_.find(a.block_addr);
    it->second.pop_front();
    if (it->second.empty()) block_order_.erase(it);

    const std::uint64_t beat_mask = ~std::uint64_t{kBeatBytes - 1};
    if (cmd.kind == CommandKind::RD) {
        for (std::uint32_t k = 0; k < a.beats; ++k) {
            std::uint32_t beat = a.first_beat + k;
            auto s = store_.find(req->beat_addrs[beat] & beat_mask);
            req->data[beat] = s == store_.end() ? DataWord{} : s->second;
        }
        read_buffer_reserved_ += a.beats;
        read_arrivals_.push_back({window->end + config_.read_return_latency, req, access});
    } else {
        for (std::uint32_t k = 0; k < a.beats; ++k) {
            std::uint32_t beat = a.first_beat + k;
            store_[req->beat_addrs[beat] & beat_mask] = req->data[beat];
        }
        write_buffer_used_ -= a.beats;
        write_ends_.push_back({window->end, req, access});
    }
}

std::optional<DramCommand> MemController::pick(Cycle now) {
    if (!refresh_due_.empty()) {
        bool urgent = refresh_draining_ || (read_active_ == 0 && write_active_ == 0) ||
                      now >= refresh_due_.front() + config_.refresh_postpone;
        if (urgent) {
            refresh_draining_ = true;
            return pick_refresh(now);
        }
    }
    if (auto c = pick_column(now, mode_)) return c;
    Direction other = mode_ == Direction::Read ? Direction::Write : Direction::Read;
    if (now >= last_mode_column_ + kModeStarvation) {
        if (auto c = pick_column(now, other)) {
            mode_ = other;
            return c;
        }
    }
    return pick_row(now);
}

std::vector<DramCommand> MemController::schedule_tick(Cycle now) {
    std::vector<DramCommand> issued;
    update_mode();
    // Banks the oldest request needs closed are fenced off from younger hits
    // once the precharge is legal; until then row hits keep the bank busy.
    std::fill(reserved_banks_.begin(), reserved_banks_.end(), 0);
    const auto& g = dram_.geometry();
    for (MemRequest* req : oldest_requests(1)) {
        for (std::size_t i = req->first_unissued; i < req->dram_bursts.size(); ++i) {
            const auto& a = req->dram_bursts[i];
            if (a.issued) continue;
            const auto& bank = dram_.bank(a.coord.bank_group, a.coord.bank);
            if (bank.open && bank.open_row != a.coord.row &&
                dram_.can_issue(DramCommand::pre(a.coord.bank_group, a.coord.bank), now))
                reserved_banks_[static_cast<std::size_t>(a.coord.bank_group) * g.banks_per_group +
                                a.coord.bank] = 1;
        }
    }
    for (std::uint32_t slot = 0; slot < config_.command_slots; ++slot) {
        choice_ = {};
        auto cmd = pick(now);
        if (!cmd) break;
        apply(*cmd, now, choice_.req, choice_.access);
        if (cmd->kind == CommandKind::REF) refresh_draining_ = false;
        if ((cmd->kind == CommandKind::RD && mode_ == Direction::Read) ||
            (cmd->kind == CommandKind::WR && mode_ == Direction::Write))
            last_mode_column_ = now;
        issued.push_back(*cmd);
    }
    return issued;
}

void MemController::post_responses(Cycle) {
    if (!fabric_) return;
    if (!responses_.empty() && !fabric_->b_valid()) {
        std::uint64_t id = responses_.front();
        fabric_->post_b({id});
        responses_.pop_front();
        for (auto& w : writes_)
            if (w.id == id) w.response_sent = true;
    }
    if (!fabric_->r_valid()) {
        if (auto beat = peek_read_beat()) {
            fabric_->post_r(*beat);
            MemRequest* r = r_current_;
            if (!r) {
                for (auto& req : reads_)
                    if (req.id == beat->id && req.next_beat == 0) {
                        r = &req;
                        break;
                    }
            }
            ++r->next_beat;
            --read_buffer_reserved_;
            if (r->next_beat == r->beat_addrs.size()) {
                stats_.bytes_completed += r->bytes;
                r_current_ = nullptr;
            } else {
                r_current_ = r;
            }
        }
    }
}

std::optional<ReadBeat> MemController::peek_read_beat() const {
    const MemRequest* r = r_current_;
    if (!r) {
        for (const auto& req : reads_) {
            if (req.next_beat == 0 && !req.beat_ready.empty() && req.beat_ready[0]) {
                r = &req;
                break;
            }
        }
    }
    if (!r || !r->beat_ready[r->next_beat]) return std::nullopt;
    ReadBeat beat;
    beat.id = r->id;
    beat.beat_index = r->next_beat;
    beat.data = r->data[r->next_beat];
    beat.last = r->next_beat + 1 == r->beat_addrs.size();
    return beat;
}

void MemController::tick(Cycle now) {
    now_ = now;
    if (auto demand = dram_.refresh_tick(now)) refresh_due_.push_back(demand->due);
    complete(now);
    retire(now);
    schedule_tick(now);
    post_responses(now);
    ++stats_.cycles;
    stats_.read_queue_sum += read_active_;
    stats_.write_queue_sum += write_active_;
}

void MemController::inject_bit_flip(std::uint64_t addr, unsigned bit) {
    auto& w = store_[addr & ~std::uint64_t{kBeatBytes - 1}];
    w[(bit / 64) % 4] ^= std::uint64_t{1} << (bit % 64);
}

DataWord MemController::stored_word(std::uint64_t addr) const {
    auto it = store_.find(addr & ~std::uint64_t{kBeatBytes - 1});
    return it == store_.end() ? DataWord{} : it->second;
}

}  // namespace ddr4bench
