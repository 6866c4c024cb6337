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

#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "ddr4bench/channel.hpp"
#include "ddr4bench/error.hpp"

using namespace ddr4bench;

namespace {

constexpr std::uint64_t kCapacity = std::uint64_t{2} << 30;

TrafficConfig seq_read(std::uint32_t burst_len, std::uint64_t batch) {
    TrafficConfig c;
    c.burst_len = burst_len;
    c.batch_len = batch;
    c.limit = kCapacity;
    return c;
}

double gbps(std::uint64_t bytes, std::uint64_t cycles, double hz) {
    return static_cast<double>(bytes) / (static_cast<double>(cycles) / hz) / 1e9;
}

bool all_zero(const DataWord& w) {
    for (auto x : w)
        if (x != 0) return false;
    return true;
}

}  // namespace

TEST_SUITE("traffic_gen") {

TEST_CASE("sequential addresses step by the burst footprint") {
    TrafficConfig c = seq_read(4, 10);
    CHECK(next_address(c, Direction::Read, 3) == 0x180);
    CHECK(next_address(c, Direction::Read, 0) == 0);
    c.base = 0x1000;
    CHECK(next_address(c, Direction::Read, 3) == 0x1180);
}

TEST_CASE("sequential addresses wrap back to the range base") {
    TrafficConfig c = seq_read(4, 100);
    c.base = 0x2000;
    c.limit = 0x2000 + 8 * 128;
    for (std::uint64_t i = 0; i < 8; ++i)
        CHECK(next_address(c, Direction::Read, i) == 0x2000 + i * 128);
    CHECK(next_address(c, Direction::Read, 8) == 0x2000);
    CHECK(next_address(c, Direction::Read, 9) == 0x2080);
}

TEST_CASE("random addresses are deterministic, aligned and in range") {
    TrafficConfig c = seq_read(16, 1000);
    c.addressing = Addressing::Random;
    c.seed = 77;
    c.base = 0x10000;
    c.limit = 0x10000 + (1u << 24);
    std::set<std::uint64_t> distinct;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        std::uint64_t a = next_address(c, Direction::Read, i);
        CHECK(a == next_address(c, Direction::Read, i));
        CHECK(a >= c.base);
        CHECK(a + c.footprint() <= c.limit);
        CHECK(a % c.footprint() == 0);
        // Never straddles a 4 KB boundary.
        CHECK(a / 4096 == (a + c.footprint() - 1) / 4096);
        distinct.insert(a);
    }
    CHECK(distinct.size() > 900);
    TrafficConfig other = c;
    other.seed = 78;
    int same = 0;
    for (std::uint64_t i = 0; i < 100; ++i)
        same += next_address(c, Direction::Read, i) == next_address(other, Direction::Read, i);
    CHECK(same < 5);
}

TEST_CASE("mixed random streams are independent per direction") {
    TrafficConfig c = seq_read(8, 100);
    c.op_mode = OpMode::Mixed;
    c.addressing = Addressing::Random;
    int same = 0;
    for (std::uint64_t i = 0; i < 100; ++i)
        same += next_address(c, Direction::Read, i) == next_address(c, Direction::Write, i);
    CHECK(same < 5);
}

TEST_CASE("mixed interleave alternates strictly at one half") {
    Fraction half{1, 2};
    for (std::uint64_t i = 0; i < 20; ++i) CHECK(mixed_is_read(half, i) == (i % 2 == 1));
    for (std::uint64_t i = 0; i < 10; ++i) {
        CHECK(mixed_position(half, Direction::Read, i) == 2 * i + 1);
        CHECK(mixed_position(half, Direction::Write, i) == 2 * i);
    }
    Fraction quarter{1, 4};
    int reads = 0;
    for (std::uint64_t i = 0; i < 400; ++i) reads += mixed_is_read(quarter, i);
    CHECK(reads == 100);
}

TEST_CASE("constant pattern repeats the byte") {
    TrafficConfig c;
    c.data_pattern = DataPattern::Constant;
    c.constant_byte = 0xA5;
    DataWord expect;
    expect.fill(0xA5A5A5A5A5A5A5A5ull);
    CHECK(gen_data(c, 0, 0) == expect);
    CHECK(gen_data(c, 0x12340, 7) == expect);
}

TEST_CASE("generated data is never all zero and is deterministic") {
    TrafficConfig hash;
    hash.data_pattern = DataPattern::AddressHash;
    TrafficConfig lfsr;
    lfsr.data_pattern = DataPattern::Lfsr;
    lfsr.data_seed = 99;
    std::uint64_t zeros = 0;
    for (std::uint64_t i = 0; i < 1000000; ++i) {
        std::uint64_t addr = (i * 0x9E3779B97F4A7C15ull) % kCapacity & ~std::uint64_t{31};
        std::uint32_t beat = static_cast<std::uint32_t>(i % 128);
        zeros += all_zero(gen_data(hash, addr, beat));
        zeros += all_zero(gen_data(lfsr, addr, beat));
    }
    CHECK(zeros == 0);
    CHECK(gen_data(lfsr, 0x400, 3) == gen_data(lfsr, 0x400, 3));
    CHECK(gen_data(hash, 0x400, 3) == gen_data(hash, 0x400, 3));
    CHECK(gen_data(lfsr, 0x400, 3) != gen_data(lfsr, 0x420, 3));
    TrafficConfig reseeded = lfsr;
    reseeded.data_seed = 100;
    CHECK(gen_data(lfsr, 0x400, 3) != gen_data(reseeded, 0x400, 3));
}

TEST_CASE("check_read detects a single flipped bit") {
    TrafficConfig c;
    DataWord w = gen_data(c, 0x800, 2);
    CHECK(check_read(c, 0x800, 2, w) == CheckResult::Ok);
    w[3] ^= 1ull << 63;
    CHECK(check_read(c, 0x800, 2, w) == CheckResult::Mismatch);
}

TEST_CASE("signal gate per mode") {
    // Blocking holds new addresses while one is outstanding.
    CHECK_FALSE(signal_gate(Signaling::Blocking, true, true, 1).issue_address);
    CHECK(signal_gate(Signaling::Blocking, true, true, 0).issue_address);
    // Non-blocking issues whenever there is work and a free slot.
    CHECK(signal_gate(Signaling::NonBlocking, true, true, 5).issue_address);
    CHECK_FALSE(signal_gate(Signaling::NonBlocking, false, true, 0).issue_address);
    CHECK_FALSE(signal_gate(Signaling::NonBlocking, true, false, 0).issue_address);
    CHECK_FALSE(signal_gate(Signaling::NonBlocking, true, true, 0).response_ready);
    // Aggressive keeps response ready up with nothing expected.
    CHECK(signal_gate(Signaling::Aggressive, false, false, 0).response_ready);
}

TEST_CASE("config validation") {
    TrafficConfig c = seq_read(4, 1);
    CHECK_NOTHROW(c.validate(kCapacity));
    auto bad = [&](auto mutate) {
        TrafficConfig b = c;
        mutate(b);
        CHECK_THROWS_AS(b.validate(kCapacity), Error);
    };
    bad([](TrafficConfig& b) { b.batch_len = 0; });
    bad([](TrafficConfig& b) { b.burst_len = 129; });
    bad([](TrafficConfig& b) { b.limit = kCapacity + 1; });
    bad([](TrafficConfig& b) { b.base = 16; });
    bad([](TrafficConfig& b) {
        b.op_mode = OpMode::Mixed;
        b.read_fraction = {1, 1};
    });
    bad([](TrafficConfig& b) {
        b.data_pattern = DataPattern::Constant;
        b.constant_byte = 0;
    });
    bad([](TrafficConfig& b) {
        b.burst_type = BurstType::Wrap;
        b.burst_len = 3;
    });
}

TEST_CASE("read batch byte counts") {
    ChannelSim sim(ChannelOptions::for_rate(1600));
    const auto& pc = sim.run_batch(seq_read(128, 1000));
    CHECK(pc.read_bytes == 4096000);
    CHECK(pc.read_tx == 1000);
    CHECK(pc.write_bytes == 0);
    CHECK(pc.read_cycles > 0);
}

TEST_CASE("write-only batch leaves the read counters at zero") {
    ChannelSim sim(ChannelOptions::for_rate(1600));
    TrafficConfig c = seq_read(8, 200);
    c.op_mode = OpMode::WriteOnly;
    const auto& pc = sim.run_batch(c);
    CHECK(pc.read_tx == 0);
    CHECK(pc.read_bytes == 0);
    CHECK(pc.read_cycles == 0);
    CHECK(pc.write_tx == 200);
    CHECK(pc.write_bytes == 200 * 8 * 32);
}

TEST_CASE("mixed half batch splits exactly") {
    ChannelSim sim(ChannelOptions::for_rate(1600));
    TrafficConfig c = seq_read(4, 1000);
    c.op_mode = OpMode::Mixed;
    const auto& pc = sim.run_batch(c);
    CHECK(pc.read_tx == 500);
    CHECK(pc.write_tx == 500);
    CHECK(pc.data_errors == 0);
}

TEST_CASE("blocking is never faster than non-blocking") {
    for (auto op : {OpMode::ReadOnly, OpMode::WriteOnly}) {
        for (auto addressing : {Addressing::Sequential, Addressing::Random}) {
            for (std::uint32_t bl : {1u, 4u, 32u}) {
                TrafficConfig c = seq_read(bl, 300);
                c.op_mode = op;
                c.addressing = addressing;
                ChannelSim nb(ChannelOptions::for_rate(1600));
                ChannelSim b(ChannelOptions::for_rate(1600));
                auto p_nb = nb.run_batch(c);
                c.signaling = Signaling::Blocking;
                auto p_b = b.run_batch(c);
                bool read = op == OpMode::ReadOnly;
                std::uint64_t cyc_nb = read ? p_nb.read_cycles : p_nb.write_cycles;
                std::uint64_t cyc_b = read ? p_b.read_cycles : p_b.write_cycles;
                CAPTURE(bl);
                CHECK(cyc_b >= cyc_nb);
            }
        }
    }
}

TEST_CASE("identical configs give identical counters") {
    TrafficConfig c = seq_read(16, 500);
    c.addressing = Addressing::Random;
    c.op_mode = OpMode::Mixed;
    ChannelSim a(ChannelOptions::for_rate(2400));
    ChannelSim b(ChannelOptions::for_rate(2400));
    CHECK(a.run_batch(c) == b.run_batch(c));
}

TEST_CASE("write-then-read over random addresses matches a flat shadow memory") {
    ChannelOptions opts = ChannelOptions::for_rate(1600);
    opts.trace_axi = true;
    ChannelSim sim(opts);
    TrafficConfig w = seq_read(4, 2000);
    w.op_mode = OpMode::WriteOnly;
    w.addressing = Addressing::Random;
    w.seed = 1234;
    w.limit = 1u << 22;  // small range so addresses repeat and overwrite
    sim.run_batch(w);

    // Replay the accepted write addresses in order into a flat memory.
    std::map<std::uint64_t, DataWord> flat;
    for (const auto& rec : sim.fabric().trace()) {
        if (std::string_view(rec.channel) != "AW") continue;
        for (std::uint32_t i = 0; i < w.burst_len; ++i) {
            std::uint64_t addr = rec.addr + std::uint64_t{i} * kBeatBytes;
            flat[addr] = gen_data(w, addr, i);
        }
    }
    REQUIRE(flat.size() > 1000);
    std::size_t mismatched = 0;
    for (const auto& [addr, word] : flat) mismatched += sim.controller().stored_word(addr) != word;
    CHECK(mismatched == 0);

    TrafficConfig r = w;
    r.op_mode = OpMode::ReadOnly;
    const auto& pc = sim.run_batch(r);
    CHECK(pc.read_tx == 2000);
    CHECK(pc.data_errors == 0);
    CHECK(pc.unchecked_reads == 0);
}

TEST_CASE("an injected bit flip is detected on readback") {
    ChannelSim sim(ChannelOptions::for_rate(1600));
    TrafficConfig w = seq_read(8, 64);
    w.op_mode = OpMode::WriteOnly;
    sim.run_batch(w);
    sim.controller().inject_bit_flip(0x200 + 32, 17);
    TrafficConfig r = w;
    r.op_mode = OpMode::ReadOnly;
    const auto& pc = sim.run_batch(r);
    CHECK(pc.data_errors == 1);
    REQUIRE(sim.traffic().first_error().has_value());
    CHECK(sim.traffic().first_error()->addr == 0x220);
    CHECK(sim.traffic().first_error()->beat_index == 1);
}

TEST_CASE("stalled responses time out") {
    ChannelOptions opts = ChannelOptions::for_rate(1600);
    opts.timeout_axi_cycles = 2000;
    ChannelSim sim(opts);
    sim.traffic().hold_responses(true);
    try {
        sim.run_batch(seq_read(8, 100));
        FAIL("expected a timeout");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Timeout);
    }
}

TEST_CASE("wrap and fixed bursts run to completion") {
    for (auto type : {BurstType::Wrap, BurstType::Fixed}) {
        ChannelSim sim(ChannelOptions::for_rate(1600));
        TrafficConfig c = seq_read(8, 100);
        c.burst_type = type;
        c.op_mode = OpMode::Mixed;
        const auto& pc = sim.run_batch(c);
        CHECK(pc.read_tx == 50);
        CHECK(pc.write_tx == 50);
        CHECK(pc.data_errors == 0);
        CHECK(sim.fabric().beat_count_violations() == 0);
    }
}

TEST_CASE("mixed traffic over a small range with block hazards completes") {
    // Reads queued behind older writes to the same block used to hold the
    // controller in read mode while the writes waited for row commands.
    ChannelOptions opts = ChannelOptions::for_rate(2400);
    opts.timeout_axi_cycles = 100000;
    ChannelSim sim(opts);
    TrafficConfig c = seq_read(8, 4000);
    c.op_mode = OpMode::Mixed;
    c.addressing = Addressing::Random;
    c.limit = 1u << 18;
    const auto& pc = sim.run_batch(c);
    CHECK(pc.read_tx == 2000);
    CHECK(pc.write_tx == 2000);
    CHECK(pc.data_errors == 0);
}

TEST_CASE("random configurations never stall and keep data intact") {
    std::mt19937_64 rng(2026);
    const std::uint32_t rates[] = {1600, 1866, 2133, 2400};
    const std::uint32_t wraps[] = {2, 4, 8, 16};
    for (int i = 0; i < 60; ++i) {
        ChannelOptions opts = ChannelOptions::for_rate(rates[rng() % 4]);
        opts.timeout_axi_cycles = 50000;
        ChannelSim sim(opts);
        TrafficConfig c;
        c.op_mode = static_cast<OpMode>(rng() % 3);
        std::uint32_t den = 2 + static_cast<std::uint32_t>(rng() % 6);
        c.read_fraction = {1 + static_cast<std::uint32_t>(rng() % (den - 1)), den};
        c.addressing = static_cast<Addressing>(rng() % 2);
        c.seed = rng();
        c.burst_type = static_cast<BurstType>(rng() % 3);
        c.burst_len = c.burst_type == BurstType::Wrap ? wraps[rng() % 4] : 1u << (rng() % 8);
        c.signaling = static_cast<Signaling>(rng() % 3);
        c.batch_len = 1 + rng() % 300;
        c.limit = std::uint64_t{4096} << (rng() % 12);
        c.data_pattern = static_cast<DataPattern>(rng() % 3);
        CAPTURE(i);
        PerfCounters pc;
        REQUIRE_NOTHROW(pc = sim.run_batch(c));
        if (c.op_mode == OpMode::WriteOnly) {
            c.op_mode = OpMode::ReadOnly;
            REQUIRE_NOTHROW(pc = sim.run_batch(c));
        }
        CHECK(pc.data_errors == 0);
        CHECK(sim.fabric().beat_count_violations() == 0);
    }
}

TEST_CASE("incr read throughput does not fall with burst length") {
    double prev = 0.0;
    for (std::uint32_t bl = 1; bl <= 128; bl *= 2) {
        ChannelSim sim(ChannelOptions::for_rate(1600));
        TrafficConfig c = seq_read(bl, std::max<std::uint64_t>(64, 16384 / bl));
        c.addressing = Addressing::Random;
        const auto& pc = sim.run_batch(c);
        double g = gbps(pc.read_bytes, pc.read_cycles, sim.options().clock.axi_clock_hz);
        CAPTURE(bl);
        CHECK(g >= 0.98 * prev);
        prev = g;
    }
}

}  // TEST_SUITE
