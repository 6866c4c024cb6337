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

#include <sstream>

#include "ddr4bench/axi.hpp"
#include "ddr4bench/error.hpp"

using namespace ddr4bench;

namespace {

struct MockSlave : AxiSlave {
    bool ar = true, aw = true, w = true;
    std::vector<AxiTransaction> ars, aws;
    std::vector<WriteBeat> ws;
    bool ar_ready(Cycle) const override { return ar; }
    bool aw_ready(Cycle) const override { return aw; }
    bool w_ready(Cycle) const override { return w; }
    void on_ar(const AxiTransaction& t, Cycle) override { ars.push_back(t); }
    void on_aw(const AxiTransaction& t, Cycle) override { aws.push_back(t); }
    void on_w(const WriteBeat& b, Cycle) override { ws.push_back(b); }
};

struct MockMaster : AxiMaster {
    bool r = true, b = true;
    std::vector<ReadBeat> rs;
    std::vector<WriteResponse> bs;
    int ar_acc = 0, aw_acc = 0;
    bool r_ready(Cycle) const override { return r; }
    bool b_ready(Cycle) const override { return b; }
    void on_ar_accepted(const AxiTransaction&, Cycle) override { ++ar_acc; }
    void on_aw_accepted(const AxiTransaction&, Cycle) override { ++aw_acc; }
    void on_r(const ReadBeat& beat, Cycle) override { rs.push_back(beat); }
    void on_b(const WriteResponse& resp, Cycle) override { bs.push_back(resp); }
};

AxiTransaction txn(std::uint64_t id, Direction d, std::uint64_t addr, std::uint32_t len,
                   BurstType type = BurstType::Incr) {
    AxiTransaction t;
    t.id = id;
    t.direction = d;
    t.start_addr = addr;
    t.burst_len = len;
    t.burst_type = type;
    return t;
}

struct Link {
    MockSlave slave;
    MockMaster master;
    AxiFabric fabric;
    Link() { fabric.connect(&master, &slave); }
};

}  // namespace

TEST_SUITE("axi") {

TEST_CASE("beat addresses") {
    CHECK(beat_addresses(txn(1, Direction::Read, 0x0, 4)) ==
          std::vector<std::uint64_t>{0x0, 0x20, 0x40, 0x60});
    CHECK(beat_addresses(txn(1, Direction::Read, 0x100, 3, BurstType::Fixed)) ==
          std::vector<std::uint64_t>{0x100, 0x100, 0x100});
    CHECK(beat_addresses(txn(1, Direction::Read, 0x60, 4, BurstType::Wrap)) ==
          std::vector<std::uint64_t>{0x60, 0x0, 0x20, 0x40});
}

TEST_CASE("wrap bursts stay inside their aligned region") {
    for (std::uint32_t len : {2u, 4u, 8u, 16u}) {
        const std::uint64_t region = std::uint64_t{len} * 32;
        for (std::uint64_t start = 0x1000; start < 0x1000 + region; start += 32) {
            auto a = beat_addresses(txn(1, Direction::Write, start, len, BurstType::Wrap));
            REQUIRE(a.size() == len);
            CHECK(a[0] == start);
            for (auto x : a) {
                CHECK(x >= 0x1000);
                CHECK(x < 0x1000 + region);
            }
            std::sort(a.begin(), a.end());
            CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
        }
    }
}

TEST_CASE("burst validation") {
    CHECK_THROWS_AS(validate_burst(txn(1, Direction::Read, 0, 0)), Error);
    CHECK_THROWS_AS(validate_burst(txn(1, Direction::Read, 0, 129)), Error);
    CHECK_NOTHROW(validate_burst(txn(1, Direction::Read, 0, 128)));
    CHECK_NOTHROW(validate_burst(txn(1, Direction::Read, 0xF00, 128, BurstType::Fixed)));
    // 0xF80 + 8 beats of 32 B crosses 0x1000.
    CHECK_THROWS_AS(validate_burst(txn(1, Direction::Read, 0xF80, 8)), Error);
    CHECK_NOTHROW(validate_burst(txn(1, Direction::Read, 0xF80, 4)));
    CHECK_THROWS_AS(validate_burst(txn(1, Direction::Read, 0, 3, BurstType::Wrap)), Error);
    CHECK_THROWS_AS(validate_burst(txn(1, Direction::Read, 0, 32, BurstType::Wrap)), Error);
    CHECK_THROWS_AS(validate_burst(txn(1, Direction::Read, 0x10, 4, BurstType::Wrap)), Error);
    try {
        validate_burst(txn(1, Direction::Read, 0, 3, BurstType::Wrap));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidBurst);
    }
}

TEST_CASE("address handshake moves the transaction to the data phase") {
    Link l;
    REQUIRE(l.fabric.post_ar(txn(7, Direction::Read, 0x40, 2)));
    CHECK_FALSE(l.fabric.post_ar(txn(8, Direction::Read, 0x80, 2)));
    auto ev = l.fabric.tick_axi(0);
    CHECK(ev.ar);
    REQUIRE(l.slave.ars.size() == 1);
    CHECK(l.slave.ars[0].state == AxiTransaction::State::DataPhase);
    CHECK(l.master.ar_acc == 1);
    CHECK_FALSE(l.fabric.ar_valid());
}

TEST_CASE("backpressure holds the payload until ready") {
    Link l;
    l.slave.ar = false;
    l.fabric.post_ar(txn(3, Direction::Read, 0x200, 1));
    for (Cycle c = 0; c < 5; ++c) CHECK_FALSE(l.fabric.tick_axi(c).ar);
    CHECK(l.fabric.ar_valid());
    l.slave.ar = true;
    CHECK(l.fabric.tick_axi(5).ar);
    REQUIRE(l.slave.ars.size() == 1);
    CHECK(l.slave.ars[0].id == 3);
    CHECK(l.slave.ars[0].start_addr == 0x200);
}

TEST_CASE("R beat stalls while the master is not ready") {
    Link l;
    l.fabric.post_ar(txn(1, Direction::Read, 0, 1));
    l.fabric.tick_axi(0);
    l.master.r = false;
    ReadBeat beat{1, 0, DataWord{1, 2, 3, 4}, true};
    REQUIRE(l.fabric.post_r(beat));
    CHECK_FALSE(l.fabric.tick_axi(1).r);
    CHECK(l.fabric.r_valid());
    l.master.r = true;
    CHECK(l.fabric.tick_axi(2).r);
    REQUIRE(l.master.rs.size() == 1);
    CHECK(l.master.rs[0].data == DataWord{1, 2, 3, 4});
}

TEST_CASE("AR and AW transfer in the same cycle") {
    Link l;
    l.fabric.post_ar(txn(1, Direction::Read, 0, 4));
    l.fabric.post_aw(txn(2, Direction::Write, 0x1000, 4));
    auto ev = l.fabric.tick_axi(0);
    CHECK(ev.ar);
    CHECK(ev.aw);
}

TEST_CASE("outstanding transactions") {
    Link l;
    CHECK(l.fabric.track_outstanding().reads_in_flight == 0);
    CHECK(l.fabric.track_outstanding().writes_in_flight == 0);
    l.fabric.post_ar(txn(1, Direction::Read, 0, 1));
    l.fabric.tick_axi(0);
    CHECK(l.fabric.track_outstanding().reads_in_flight == 1);
    CHECK(l.fabric.track_outstanding().writes_in_flight == 0);

    l.fabric.post_aw(txn(2, Direction::Write, 0x40, 2));
    l.fabric.tick_axi(1);
    l.fabric.post_w({2, 0, {}, false});
    l.fabric.tick_axi(2);
    l.fabric.post_w({2, 1, {}, true});
    l.fabric.tick_axi(3);
    CHECK(l.fabric.track_outstanding().writes_in_flight == 1);
    l.fabric.post_b({2});
    l.fabric.tick_axi(4);
    CHECK(l.fabric.track_outstanding().writes_in_flight == 0);
    CHECK(l.fabric.beat_count_violations() == 0);
}

TEST_CASE("stalled write channels do not block reads") {
    Link l;
    l.slave.aw = false;
    l.slave.w = false;
    l.fabric.post_aw(txn(1, Direction::Write, 0, 2));
    l.fabric.post_ar(txn(2, Direction::Read, 0x100, 1));
    auto ev = l.fabric.tick_axi(0);
    CHECK_FALSE(ev.aw);
    CHECK(ev.ar);
    l.fabric.post_r({2, 0, {}, true});
    CHECK(l.fabric.tick_axi(1).r);
    CHECK(l.fabric.aw_valid());
}

TEST_CASE("beat count mismatches are detected") {
    Link l;
    l.fabric.post_ar(txn(1, Direction::Read, 0, 2));
    l.fabric.tick_axi(0);
    l.fabric.post_r({1, 0, {}, true});
    l.fabric.tick_axi(1);
    CHECK(l.fabric.beat_count_violations() == 1);
}

TEST_CASE("transaction trace") {
    Link l;
    l.fabric.set_tracing(true);
    l.fabric.post_ar(txn(5, Direction::Read, 0x80, 1));
    l.fabric.tick_axi(3);
    REQUIRE(l.fabric.trace().size() == 1);
    std::ostringstream os;
    write_trace_csv(os, l.fabric.trace());
    CHECK(os.str() == "cycle,channel,event,id,addr\n3,AR,addr,5,128\n");
}

}  // TEST_SUITE
