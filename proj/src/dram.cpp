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

#include "ddr4bench/dram.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ddr4bench/error.hpp"

namespace ddr4bench {

namespace {

bool elapsed(const std::optional<Cycle>& last, Cycle gap, Cycle now) {
    return !last || now >= *last + gap;
}

}  // namespace

std::uint64_t DramGeometry::capacity_bytes() const {
    return static_cast<std::uint64_t>(bank_groups) * banks_per_group * rows * columns *
           (bus_width_bits / 8);
}

void DramGeometry::validate() const {
    if (bank_groups < 1 || banks_per_group < 1)
        throw Error(ErrorCode::BadConfig, "geometry needs at least one bank group and bank");
    if (!std::has_single_bit(rows) || !std::has_single_bit(columns) ||
        !std::has_single_bit(bank_groups) || !std::has_single_bit(banks_per_group))
        throw Error(ErrorCode::BadConfig, "geometry dimensions must be powers of two");
    if (bus_width_bits % 8 != 0 || !std::has_single_bit(bus_width_bits))
        throw Error(ErrorCode::BadConfig, "bus width must be a power-of-two byte multiple");
    if (columns < 8) throw Error(ErrorCode::BadConfig, "need at least one BL8 burst per row");
}

void TimingParams::validate() const {
    const std::uint32_t all[] = {CL,     CWL,    tRCD,   tRP,    tRAS,   tRC,   tRFC,
                                 tREFI,  tCCD_S, tCCD_L, tRRD_S, tRRD_L, tFAW,  tWR,
                                 tWTR_S, tWTR_L, tRTP,   burst_length};
    for (auto v : all)
        if (v == 0) throw Error(ErrorCode::BadConfig, "timing parameters must be positive");
    if (tRC != tRAS + tRP) throw Error(ErrorCode::BadConfig, "tRC must equal tRAS + tRP");
    if (tCCD_L < tCCD_S || tRRD_L < tRRD_S)
        throw Error(ErrorCode::BadConfig, "long bank-group spacing must not be shorter than short");
    if (burst_length != 8) throw Error(ErrorCode::BadConfig, "only BL8 is modeled");
    if (tREFI <= 4 * tRFC) throw Error(ErrorCode::BadConfig, "tREFI must be much larger than tRFC");
}

TimingParams TimingParams::preset(std::uint32_t data_rate_mts) {
    TimingParams t;  // DDR4-1600K defaults
    switch (data_rate_mts) {
        case 1600:
            break;
        case 1866:  // 13-13-13
            t.CL = 13; t.CWL = 10; t.tRCD = 13; t.tRP = 13; t.tRAS = 32; t.tRC = 45;
            t.tRFC = 243; t.tREFI = 7277; t.tCCD_S = 4; t.tCCD_L = 5; t.tRRD_S = 4;
            t.tRRD_L = 5; t.tFAW = 22; t.tWR = 14; t.tWTR_S = 3; t.tWTR_L = 7; t.tRTP = 7;
            break;
        case 2133:  // 15-15-15
            t.CL = 15; t.CWL = 11; t.tRCD = 15; t.tRP = 15; t.tRAS = 36; t.tRC = 51;
            t.tRFC = 278; t.tREFI = 8319; t.tCCD_S = 4; t.tCCD_L = 6; t.tRRD_S = 4;
            t.tRRD_L = 6; t.tFAW = 23; t.tWR = 16; t.tWTR_S = 3; t.tWTR_L = 8; t.tRTP = 8;
            break;
        case 2400:  // 17-17-17
            t.CL = 17; t.CWL = 12; t.tRCD = 17; t.tRP = 17; t.tRAS = 39; t.tRC = 56;
            t.tRFC = 312; t.tREFI = 9360; t.tCCD_S = 4; t.tCCD_L = 6; t.tRRD_S = 4;
            t.tRRD_L = 6; t.tFAW = 26; t.tWR = 18; t.tWTR_S = 3; t.tWTR_L = 9; t.tRTP = 9;
            break;
        default:
            throw Error(ErrorCode::BadConfig,
                        "no timing preset for " + std::to_string(data_rate_mts) + " MT/s");
    }
    return t;
}

void TimingParams::set(std::string_view name, std::uint32_t value) {
    struct Field {
        std::string_view name;
        std::uint32_t TimingParams::*member;
    };
    static constexpr Field fields[] = {
        {"CL", &TimingParams::CL},         {"CWL", &TimingParams::CWL},
        {"tRCD", &TimingParams::tRCD},     {"tRP", &TimingParams::tRP},
        {"tRAS", &TimingParams::tRAS},     {"tRC", &TimingParams::tRC},
        {"tRFC", &TimingParams::tRFC},     {"tREFI", &TimingParams::tREFI},
        {"tCCD_S", &TimingParams::tCCD_S}, {"tCCD_L", &TimingParams::tCCD_L},
        {"tRRD_S", &TimingParams::tRRD_S}, {"tRRD_L", &TimingParams::tRRD_L},
        {"tFAW", &TimingParams::tFAW},     {"tWR", &TimingParams::tWR},
        {"tWTR_S", &TimingParams::tWTR_S}, {"tWTR_L", &TimingParams::tWTR_L},
        {"tRTP", &TimingParams::tRTP},     {"burst_length", &TimingParams::burst_length},
        {"bus_turnaround", &TimingParams::bus_turnaround},
    };
    for (const auto& f : fields) {
        if (f.name == name) {
            this->*f.member = value;
            return;
        }
    }
    throw Error(ErrorCode::Parse, "unknown timing parameter '" + std::string(name) + "'");
}

void TimingParams::apply_overrides(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::Parse, "timings line " + std::to_string(lineno) + ": expected name=value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string name = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::uint32_t v = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size())
            throw Error(ErrorCode::Parse, "timings line " + std::to_string(lineno) + ": bad value '" + value + "'");
        set(name, v);
    }
}

std::string_view to_string(CommandKind kind) {
    switch (kind) {
        case CommandKind::ACT: return "ACT";
        case CommandKind::RD: return "RD";
        case CommandKind::WR: return "WR";
        case CommandKind::PRE: return "PRE";
        case CommandKind::REF: return "REF";
    }
    return "?";
}

BankState::State BankState::state_at(Cycle now, const TimingParams& t) const {
    if (open) return State::Active;
    if (last_pre && now < *last_pre + t.tRP) return State::Precharging;
    return State::Idle;
}

DramDevice::DramDevice(DramGeometry geometry, TimingParams timing, bool refresh_enabled)
    : geometry_(geometry),
      timing_(timing),
      refresh_enabled_(refresh_enabled),
      banks_(geometry.total_banks()),
      group_last_act_(geometry.bank_groups),
      group_last_rd_(geometry.bank_groups),
      group_last_wr_(geometry.bank_groups) {
    geometry_.validate();
    timing_.validate();
}

bool DramDevice::all_banks_closed() const {
    return std::none_of(banks_.begin(), banks_.end(), [](const BankState& b) { return b.open; });
}

bool DramDevice::bus_free(Cycle start, Cycle end, bool is_write) const {
    // A read followed by a write needs bus_turnaround idle cycles between
    // them, in whichever order the two windows land.
    for (const auto& w : windows_) {
        Cycle gap_after_w = (!w.is_write && is_write) ? timing_.bus_turnaround : 0;
        Cycle gap_before_w = (w.is_write && !is_write) ? timing_.bus_turnaround : 0;
        bool after = start >= w.end + gap_after_w;
        bool before = end + gap_before_w <= w.start;
        if (!after && !before) return false;
    }
    return true;
}

bool DramDevice::can_issue(const DramCommand& cmd, Cycle now) const {
    const auto& t = timing_;
    if (cmd.kind == CommandKind::REF) {
        if (now < refresh_locked_until_) return false;
        for (const auto& b : banks_) {
            if (b.open) return false;
            if (!elapsed(b.last_pre, t.tRP, now)) return false;
        }
        return true;
    }
    if (cmd.bank_group >= geometry_.bank_groups || cmd.bank >= geometry_.banks_per_group)
        return false;
    const BankState& b = banks_[index(cmd.bank_group, cmd.bank)];
    if (now < b.refresh_locked_until || now < refresh_locked_until_) return false;

    switch (cmd.kind) {
        case CommandKind::ACT: {
            if (b.open || cmd.row >= geometry_.rows) return false;
            if (!elapsed(b.last_pre, t.tRP, now) || !elapsed(b.last_act, t.tRC, now)) return false;
            for (std::uint32_t g = 0; g < geometry_.bank_groups; ++g) {
                Cycle gap = g == cmd.bank_group ? t.tRRD_L : t.tRRD_S;
                if (!elapsed(group_last_act_[g], gap, now)) return false;
            }
            if (recent_acts_.size() >= 4 && now < recent_acts_[recent_acts_.size() - 4] + t.tFAW)
                return false;
            return true;
        }
        case CommandKind::RD:
        case CommandKind::WR: {
            bool is_write = cmd.kind == CommandKind::WR;
            if (!b.open || b.open_row != cmd.row || cmd.column >= geometry_.columns) return false;
            if (!elapsed(b.last_act, t.tRCD, now)) return false;
            for (std::uint32_t g = 0; g < geometry_.bank_groups; ++g) {
                bool same = g == cmd.bank_group;
                Cycle ccd = same ? t.tCCD_L : t.tCCD_S;
                const auto& same_kind = is_write ? group_last_wr_[g] : group_last_rd_[g];
                if (!elapsed(same_kind, ccd, now)) return false;
                if (!is_write && !elapsed(group_last_wr_[g], t.write_to_read(same), now))
                    return false;
            }
            Cycle lat = is_write ? t.CWL : t.CL;
            return bus_free(now + lat, now + lat + t.burst_cycles(), is_write);
        }
        case CommandKind::PRE: {
            if (!b.open) return false;
            return elapsed(b.last_act, t.tRAS, now) && elapsed(b.last_rd, t.tRTP, now) &&
                   elapsed(b.last_wr, t.write_to_precharge(), now);
        }
        case CommandKind::REF:
            break;
    }
    return false;
}

std::optional<DataWindow> DramDevice::issue(const DramCommand& cmd, Cycle now) {
    if (!can_issue(cmd, now)) {
        std::ostringstream os;
        os << "illegal " << to_string(cmd.kind) << " bg=" << cmd.bank_group << " bank=" << cmd.bank
           << " row=" << cmd.row << " col=" << cmd.column << " at cycle " << now;
        throw Error(ErrorCode::IllegalCommand, os.str());
    }
    const auto& t = timing_;
    ++counts_[static_cast<std::size_t>(cmd.kind)];
    if (logging_) log_.push_back({now, cmd});

    while (!windows_.empty() && windows_.front().end + t.bus_turnaround + 64 < now)
        windows_.pop_front();

    std::optional<DataWindow> window;
    switch (cmd.kind) {
        case CommandKind::ACT: {
            BankState& b = banks_[index(cmd.bank_group, cmd.bank)];
            b.open = true;
            b.open_row = cmd.row;
            b.last_act = now;
            group_last_act_[cmd.bank_group] = now;
            last_act_ = now;
            recent_acts_.push_back(now);
            if (recent_acts_.size() > 4) recent_acts_.pop_front();
            break;
        }
        case CommandKind::RD:
        case CommandKind::WR: {
            BankState& b = banks_[index(cmd.bank_group, cmd.bank)];
            bool is_write = cmd.kind == CommandKind::WR;
            Cycle lat = is_write ? t.CWL : t.CL;
            window = DataWindow{now + lat, now + lat + t.burst_cycles()};
            windows_.push_back({window->start, window->end, is_write});
            if (is_write) {
                b.last_wr = now;
                group_last_wr_[cmd.bank_group] = now;
                last_wr_ = now;
            } else {
                b.last_rd = now;
                group_last_rd_[cmd.bank_group] = now;
                last_rd_ = now;
            }
            break;
        }
        case CommandKind::PRE: {
            BankState& b = banks_[index(cmd.bank_group, cmd.bank)];
            b.open = false;
            b.last_pre = now;
            break;
        }
        case CommandKind::REF: {
            refresh_locked_until_ = now + t.tRFC;
            for (auto& b : banks_) b.refresh_locked_until = refresh_locked_until_;
            break;
        }
    }
    return window;
}

std::optional<RefreshDemand> DramDevice::refresh_tick(Cycle now) const {
    if (!refresh_enabled_ || now == 0 || now % timing_.tREFI != 0) return std::nullopt;
    return RefreshDemand{now};
}

void write_command_log_csv(std::ostream& os, const std::vector<CommandRecord>& log) {
    os << "cycle,command,bank_group,bank,row,column\n";
    for (const auto& r : log) {
        os << r.cycle << ',' << to_string(r.cmd.kind) << ',' << r.cmd.bank_group << ','
           << r.cmd.bank << ',' << r.cmd.row << ',' << r.cmd.column << '\n';
    }
}

std::vector<CommandRecord> read_command_log_csv(std::istream& is) {
    std::vector<CommandRecord> out;
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        CommandRecord r;
        std::getline(ls, field, ',');
        r.cycle = std::stoull(field);
        std::getline(ls, field, ',');
        if (field == "ACT") r.cmd.kind = CommandKind::ACT;
        else if (field == "RD") r.cmd.kind = CommandKind::RD;
        else if (field == "WR") r.cmd.kind = CommandKind::WR;
        else if (field == "PRE") r.cmd.kind = CommandKind::PRE;
        else if (field == "REF") r.cmd.kind = CommandKind::REF;
        else throw Error(ErrorCode::Parse, "unknown command '" + field + "' in log");
        std::getline(ls, field, ',');
        r.cmd.bank_group = static_cast<std::uint32_t>(std::stoul(field));
        std::getline(ls, field, ',');
        r.cmd.bank = static_cast<std::uint32_t>(std::stoul(field));
        std::getline(ls, field, ',');
        r.cmd.row = static_cast<std::uint32_t>(std::stoul(field));
        std::getline(ls, field, ',');
        r.cmd.column = static_cast<std::uint32_t>(std::stoul(field));
        out.push_back(r);
    }
    return out;
}

double peak_bandwidth_gbps(const ClockConfig& clk, const DramGeometry& geometry) {
    return static_cast<double>(clk.data_rate_mts) * 1e6 * (geometry.bus_width_bits / 8) / 1e9;
}

}  // namespace ddr4bench
