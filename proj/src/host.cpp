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

#include "ddr4bench/host.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

namespace ddr4bench {

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorCode::Parse, msg); }

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::pair<std::string_view, std::string_view> head_tail(std::string_view v) {
    auto c = v.find(':');
    if (c == std::string_view::npos) return {v, {}};
    return {v.substr(0, c), v.substr(c + 1)};
}

Fraction parse_fraction(std::string_view s) {
    Fraction f;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        f.num = static_cast<std::uint32_t>(parse_u64(s.substr(0, slash)));
        f.den = static_cast<std::uint32_t>(parse_u64(s.substr(slash + 1)));
    } else {
        auto dot = s.find('.');
        if (dot == std::string_view::npos || s.substr(0, dot) != "0" || dot + 1 == s.size() ||
            s.size() - dot - 1 > 6)
            parse_fail("read fraction must look like 0.5 or 1/2: " + std::string(s));
        std::string_view digits = s.substr(dot + 1);
        std::uint32_t den = 1;
        for (std::size_t i = 0; i < digits.size(); ++i) den *= 10;
        f.num = static_cast<std::uint32_t>(parse_u64(digits));
        f.den = den;
    }
    if (f.den == 0) parse_fail("read fraction has a zero denominator");
    std::uint32_t g = std::gcd(f.num, f.den);
    if (g > 1) {
        f.num /= g;
        f.den /= g;
    }
    return f;
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << "0x" << std::hex << v;
    return os.str();
}

std::uint32_t parse_channel(std::string_view s) {
    std::uint64_t v = parse_u64(s);
    if (v > 0xFFFFFFFFu) throw Error(ErrorCode::BadChannel, "channel index out of range");
    return static_cast<std::uint32_t>(v);
}

void append_counters(std::ostringstream& os, const PerfCounters& c) {
    os << " read_cycles=" << c.read_cycles << " write_cycles=" << c.write_cycles
       << " read_tx=" << c.read_tx << " write_tx=" << c.write_tx
       << " read_bytes=" << c.read_bytes << " write_bytes=" << c.write_bytes
       << " data_errors=" << c.data_errors << " unchecked_reads=" << c.unchecked_reads;
}

}  // namespace

std::string_view to_string(ReportDirection d) {
    switch (d) {
        case ReportDirection::Read: return "read";
        case ReportDirection::Write: return "write";
        case ReportDirection::Combined: return "combined";
    }
    return "?";
}

ReportDirection parse_report_direction(std::string_view s) {
    if (s == "read") return ReportDirection::Read;
    if (s == "write") return ReportDirection::Write;
    if (s == "combined") return ReportDirection::Combined;
    parse_fail("unknown direction: " + std::string(s));
}

double throughput_gbps(std::uint64_t bytes, std::uint64_t cycles, double axi_clock_hz) {
    return static_cast<double>(bytes) / (static_cast<double>(cycles) / axi_clock_hz) / 1e9;
}

std::vector<ThroughputReport> throughput(const PerfCounters& c, const ClockConfig& clk,
                                         std::uint32_t channel) {
    std::vector<ThroughputReport> out;
    auto one = [&](ReportDirection d, std::uint64_t bytes, std::uint64_t cycles,
                   std::uint64_t tx) {
        ThroughputReport r;
        r.channel = channel;
        r.direction = d;
        r.bytes = bytes;
        r.cycles = cycles;
        r.axi_clock_hz = clk.axi_clock_hz;
        r.throughput_gbps = throughput_gbps(bytes, cycles, clk.axi_clock_hz);
        r.tx_count = tx;
        r.mean_cycles_per_tx = tx == 0 ? 0.0 : static_cast<double>(cycles) / tx;
        out.push_back(r);
    };
    if (c.read_cycles > 0) one(ReportDirection::Read, c.read_bytes, c.read_cycles, c.read_tx);
    if (c.write_cycles > 0)
        one(ReportDirection::Write, c.write_bytes, c.write_cycles, c.write_tx);
    if (out.empty()) throw Error(ErrorCode::EmptyBatch, "no cycles recorded in either direction");
    if (out.size() == 2) {
        ThroughputReport r;
        r.channel = channel;
        r.direction = ReportDirection::Combined;
        r.bytes = out[0].bytes + out[1].bytes;
        r.cycles = std::max(out[0].cycles, out[1].cycles);
        r.axi_clock_hz = clk.axi_clock_hz;
        r.throughput_gbps = out[0].throughput_gbps + out[1].throughput_gbps;
        r.tx_count = out[0].tx_count + out[1].tx_count;
        r.mean_cycles_per_tx =
            static_cast<double>(out[0].cycles + out[1].cycles) / std::max<std::uint64_t>(r.tx_count, 1);
        out.push_back(r);
    }
    return out;
}

const ThroughputReport& headline(const std::vector<ThroughputReport>& reports) {
    if (reports.empty()) throw Error(ErrorCode::EmptyBatch, "no throughput reports");
    return reports.back();
}

SystemReport aggregate(const std::vector<ThroughputReport>& per_channel) {
    SystemReport s;
    for (const auto& r : per_channel) {
        s.per_channel_gbps.push_back(r.throughput_gbps);
        s.total_gbps += r.throughput_gbps;
    }
    return s;
}

std::uint64_t auto_batch_len(const TimingParams& timing, std::uint32_t burst_len) {
    if (burst_len == 0) throw Error(ErrorCode::BadConfig, "burst length must be positive");
    std::uint64_t beats = 10ull * timing.tREFI / kClockRatio;
    return (beats + burst_len - 1) / burst_len;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        parse_fail("not a number: " + std::string(s));
    return v;
}

std::uint64_t parse_u64(std::string_view s) {
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        s.remove_prefix(2);
        base = 16;
    }
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        parse_fail("not an unsigned integer: " + std::string(s));
    return v;
}

TrafficConfig parse_config(std::string_view fields) {
    TrafficConfig cfg;
    cfg.batch_len = 0;
    cfg.limit = 0;
    for (auto tok : tokens(fields)) {
        auto eq = tok.find('=');
        if (eq == std::string_view::npos) parse_fail("expected key=value, got " + std::string(tok));
        std::string_view key = tok.substr(0, eq);
        std::string_view val = tok.substr(eq + 1);
        auto [h, t] = head_tail(val);
        if (key == "op") {
            if (h == "r") cfg.op_mode = OpMode::ReadOnly;
            else if (h == "w") cfg.op_mode = OpMode::WriteOnly;
            else if (h == "mixed") {
                cfg.op_mode = OpMode::Mixed;
                if (!t.empty()) cfg.read_fraction = parse_fraction(t);
            } else parse_fail("op must be r, w or mixed[:fraction]");
            if (h != "mixed" && !t.empty()) parse_fail("only mixed takes a fraction");
        } else if (key == "addr") {
            if (h == "seq" && t.empty()) cfg.addressing = Addressing::Sequential;
            else if (h == "rnd") {
                cfg.addressing = Addressing::Random;
                if (!t.empty()) cfg.seed = parse_u64(t);
            } else parse_fail("addr must be seq or rnd[:seed]");
        } else if (key == "burst") {
            if (h == "fixed") cfg.burst_type = BurstType::Fixed;
            else if (h == "incr") cfg.burst_type = BurstType::Incr;
            else if (h == "wrap") cfg.burst_type = BurstType::Wrap;
            else parse_fail("burst must be fixed, incr or wrap[:len]");
            if (!t.empty()) {
                std::uint64_t len = parse_u64(t);
                if (len == 0 || len > kMaxBurstLen)
                    throw Error(ErrorCode::BadConfig, "burst length must be in [1,128]");
                cfg.burst_len = static_cast<std::uint32_t>(len);
            }
        } else if (key == "sig") {
            if (val == "nb") cfg.signaling = Signaling::NonBlocking;
            else if (val == "b") cfg.signaling = Signaling::Blocking;
            else if (val == "ag") cfg.signaling = Signaling::Aggressive;
            else parse_fail("sig must be nb, b or ag");
        } else if (key == "batch") {
            cfg.batch_len = val == "auto" ? 0 : parse_u64(val);
            if (val != "auto" && cfg.batch_len == 0)
                throw Error(ErrorCode::BadConfig, "batch length must be at least 1");
        } else if (key == "range") {
            if (t.empty()) parse_fail("range must be base:limit");
            cfg.base = parse_u64(h);
            cfg.limit = parse_u64(t);
        } else if (key == "data") {
            if (h == "lfsr") {
                cfg.data_pattern = DataPattern::Lfsr;
                if (!t.empty()) cfg.data_seed = parse_u64(t);
            } else if (h == "hash" && t.empty()) {
                cfg.data_pattern = DataPattern::AddressHash;
            } else if (h == "const") {
                cfg.data_pattern = DataPattern::Constant;
                if (!t.empty()) {
                    std::uint64_t b = parse_u64(t);
                    if (b > 0xFF) parse_fail("constant data is one byte");
                    cfg.constant_byte = static_cast<std::uint8_t>(b);
                }
            } else parse_fail("data must be lfsr[:seed], hash or const[:byte]");
        } else {
            parse_fail("unknown config field: " + std::string(key));
        }
    }
    return cfg;
}

std::string format_config(const TrafficConfig& c) {
    std::ostringstream os;
    switch (c.op_mode) {
        case OpMode::ReadOnly: os << "op=r"; break;
        case OpMode::WriteOnly: os << "op=w"; break;
        case OpMode::Mixed: os << "op=mixed:" << c.read_fraction.num << '/' << c.read_fraction.den; break;
    }
    if (c.addressing == Addressing::Sequential) os << " addr=seq";
    else os << " addr=rnd:" << c.seed;
    switch (c.burst_type) {
        case BurstType::Fixed: os << " burst=fixed:"; break;
        case BurstType::Incr: os << " burst=incr:"; break;
        case BurstType::Wrap: os << " burst=wrap:"; break;
    }
    os << c.burst_len;
    switch (c.signaling) {
        case Signaling::NonBlocking: os << " sig=nb"; break;
        case Signaling::Blocking: os << " sig=b"; break;
        case Signaling::Aggressive: os << " sig=ag"; break;
    }
    if (c.batch_len == 0) os << " batch=auto";
    else os << " batch=" << c.batch_len;
    if (c.limit != 0) os << " range=" << hex(c.base) << ':' << hex(c.limit);
    switch (c.data_pattern) {
        case DataPattern::Lfsr: os << " data=lfsr:" << hex(c.data_seed); break;
        case DataPattern::AddressHash: os << " data=hash"; break;
        case DataPattern::Constant: os << " data=const:" << hex(c.constant_byte); break;
    }
    return os.str();
}

HostCommand parse_command(std::string_view line) {
    auto tok = tokens(line);
    if (tok.empty()) parse_fail("empty command");
    std::string_view verb = tok[0];
    auto need = [&](std::size_t n) {
        if (tok.size() != n) parse_fail(std::string(verb) + " takes " + std::to_string(n - 1) +
                                        " argument(s)");
    };
    if (verb == "config") {
        if (tok.size() < 2) parse_fail("config needs a channel");
        ConfigureCmd c;
        c.channel = parse_channel(tok[1]);
        auto rest = line.substr(static_cast<std::size_t>(tok[1].data() + tok[1].size() - line.data()));
        c.config = parse_config(rest);
        return c;
    }
    if (verb == "run") {
        need(2);
        return RunCmd{parse_channel(tok[1])};
    }
    if (verb == "runall") {
        need(1);
        return RunAllCmd{};
    }
    if (verb == "counters") {
        need(2);
        return ReadCountersCmd{parse_channel(tok[1])};
    }
    if (verb == "reset") {
        need(2);
        return ResetCountersCmd{parse_channel(tok[1])};
    }
    if (verb == "query") {
        need(1);
        return QueryCmd{};
    }
    parse_fail("unknown command: " + std::string(verb));
}

struct HostController::Slot {
    std::unique_ptr<ChannelSim> sim;
    std::optional<TrafficConfig> cfg;
    std::atomic<bool> running{false};
};

HostController::HostController(const HostOptions& options) : options_(options) {
    if (options.channels == 0) throw Error(ErrorCode::BadConfig, "need at least one channel");
    for (std::uint32_t i = 0; i < options.channels; ++i) {
        auto s = std::make_unique<Slot>();
        s->sim = std::make_unique<ChannelSim>(options.channel);
        channels_.push_back(std::move(s));
    }
}

HostController::~HostController() = default;

HostController::Slot& HostController::slot(std::uint32_t channel) const {
    if (channel >= channels_.size())
        throw Error(ErrorCode::BadChannel, "channel " + std::to_string(channel) + " of " +
                                               std::to_string(channels_.size()));
    return *channels_[channel];
}

ChannelSim& HostController::channel(std::uint32_t channel) { return *slot(channel).sim; }

void HostController::configure(std::uint32_t channel, TrafficConfig cfg) {
    Slot& s = slot(channel);
    if (s.running) throw Error(ErrorCode::Busy, "channel is running");
    const auto& opt = s.sim->options();
    if (cfg.limit == 0) cfg.limit = opt.geometry.capacity_bytes();
    if (cfg.batch_len == 0) cfg.batch_len = auto_batch_len(opt.timing, cfg.burst_len);
    cfg.validate(opt.geometry.capacity_bytes());
    s.cfg = cfg;
}

const std::optional<TrafficConfig>& HostController::config(std::uint32_t channel) const {
    return slot(channel).cfg;
}

RunResult HostController::run_slot(std::uint32_t channel) {
    Slot& s = slot(channel);
    if (!s.cfg) throw Error(ErrorCode::BadConfig, "channel " + std::to_string(channel) +
                                                     " is not configured");
    if (s.running.exchange(true)) throw Error(ErrorCode::Busy, "channel is running");
    RunResult r;
    r.channel = channel;
    try {
        r.counters = s.sim->run_batch(*s.cfg);
    } catch (...) {
        s.running = false;
        throw;
    }
    s.running = false;
    r.reports = throughput(r.counters, s.sim->options().clock, channel);
    return r;
}

RunResult HostController::run(std::uint32_t channel) { return run_slot(channel); }

RunAllResult HostController::run_all() {
    const std::uint32_t n = channel_count();
    for (std::uint32_t i = 0; i < n; ++i)
        if (!slot(i).cfg)
            throw Error(ErrorCode::BadConfig, "channel " + std::to_string(i) + " is not configured");
    std::vector<RunResult> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::uint32_t> next{0};
    auto worker = [&] {
        for (std::uint32_t i = next++; i < n; i = next++) {
            try {
                results[i] = run_slot(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    unsigned jobs = options_.jobs == 0 ? n : std::min<unsigned>(options_.jobs, n);
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    RunAllResult all;
    std::vector<ThroughputReport> heads;
    for (auto& r : results) heads.push_back(headline(r.reports));
    all.system = aggregate(heads);
    all.channels = std::move(results);
    return all;
}

PerfCounters HostController::counters(std::uint32_t channel) const {
    Slot& s = slot(channel);
    if (s.running) throw Error(ErrorCode::Busy, "channel is running");
    return s.sim->counters();
}

void HostController::reset(std::uint32_t channel) {
    Slot& s = slot(channel);
    if (s.running) throw Error(ErrorCode::Busy, "channel is running");
    s.sim->reset_counters();
}

QueryInfo HostController::query() const {
    QueryInfo q;
    q.channels = channel_count();
    q.clock = options_.channel.clock;
    q.geometry = options_.channel.geometry;
    q.refresh = options_.channel.refresh;
    return q;
}

HostResponse HostController::execute(const HostCommand& cmd) {
    return std::visit(
        [this](const auto& c) -> HostResponse {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConfigureCmd>) {
                configure(c.channel, c.config);
                return std::monostate{};
            } else if constexpr (std::is_same_v<T, RunCmd>) {
                return run(c.channel);
            } else if constexpr (std::is_same_v<T, RunAllCmd>) {
                return run_all();
            } else if constexpr (std::is_same_v<T, ReadCountersCmd>) {
                return counters(c.channel);
            } else if constexpr (std::is_same_v<T, ResetCountersCmd>) {
                reset(c.channel);
                return std::monostate{};
            } else {
                return query();
            }
        },
        cmd);
}

std::string HostController::execute_line(std::string_view line) {
    try {
        return format_response(execute(parse_command(line)));
    } catch (const Error& e) {
        return format_error(e);
    } catch (const std::exception& e) {
        return format_error(Error(ErrorCode::Io, e.what()));
    }
}

std::string format_response(const HostResponse& response) {
    std::ostringstream os;
    os << "ok";
    std::visit(
        [&os](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, PerfCounters>) {
                append_counters(os, r);
            } else if constexpr (std::is_same_v<T, RunResult>) {
                os << " ch=" << r.channel;
                append_counters(os, r.counters);
                for (const auto& t : r.reports)
                    os << ' ' << to_string(t.direction) << "_gbps=" << format_double(t.throughput_gbps);
            } else if constexpr (std::is_same_v<T, RunAllResult>) {
                std::uint64_t errors = 0;
                for (const auto& c : r.channels) errors += c.counters.data_errors;
                os << " channels=" << r.channels.size()
                   << " total_gbps=" << format_double(r.system.total_gbps);
                for (std::size_t i = 0; i < r.system.per_channel_gbps.size(); ++i)
                    os << " ch" << i << "_gbps=" << format_double(r.system.per_channel_gbps[i]);
                os << " data_errors=" << errors;
            } else if constexpr (std::is_same_v<T, QueryInfo>) {
                os << " channels=" << r.channels << " rate=" << r.clock.data_rate_mts
                   << " mem_hz=" << format_double(r.clock.mem_clock_hz)
                   << " axi_hz=" << format_double(r.clock.axi_clock_hz)
                   << " capacity=" << r.geometry.capacity_bytes()
                   << " bank_groups=" << r.geometry.bank_groups
                   << " banks_per_group=" << r.geometry.banks_per_group
                   << " rows=" << r.geometry.rows << " columns=" << r.geometry.columns
                   << " bus_bits=" << r.geometry.bus_width_bits << " refresh=" << (r.refresh ? 1 : 0);
            }
        },
        response);
    return os.str();
}

std::string format_error(const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return "err " + std::string(to_string(e.code())) + ' ' + msg;
}

}  // namespace ddr4bench
