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
#include <set>
#include <tuple>
#include <sstream>

#include "ddr4bench/bench.hpp"

using namespace ddr4bench;

namespace {

BenchPlan small_plan(std::uint32_t rate = 1600) {
    std::istringstream in(
        "# quick sweep\n"
        "name=small\n"
        "rate=" + std::to_string(rate) + "\n"
        "repetitions=1\n"
        "point op=r addr=seq burst=incr:4 batch=100\n"
        "point op=r addr=rnd:3 burst=incr:4 batch=100\n"
        "point op=w addr=seq burst=incr:16 batch=40\n"
        "point op=mixed addr=rnd burst=incr:8 batch=60\n");
    return parse_plan(in);
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("built-in plan shapes") {
    auto table3 = builtin_plan("table3");
    CHECK(table3.points.size() == 16);
    std::set<std::pair<std::uint32_t, Addressing>> read_points;
    for (const auto& p : table3.points)
        if (p.config.op_mode == OpMode::ReadOnly) read_points.insert({p.config.burst_len, p.config.addressing});
    CHECK(read_points.size() == 8);
    CHECK(builtin_plan("fig3").points.size() == 32);
    CHECK(builtin_plan("fig4").points.size() == 16);
    CHECK(builtin_plan("scale-rate").points.size() == 64);
    CHECK(builtin_plan("scale-channels").points.size() == 18);
    for (const auto& n : builtin_plan_names()) CHECK_NOTHROW(builtin_plan(n).validate());
    CHECK_THROWS_AS(builtin_plan("nope"), Error);
    CHECK(sweep_burst_lengths() == std::vector<std::uint32_t>{1, 2, 4, 8, 16, 32, 64, 128});
}

TEST_CASE("plan files parse and format symmetrically") {
    BenchPlan p = small_plan();
    CHECK(p.name == "small");
    REQUIRE(p.points.size() == 4);
    CHECK(p.points[1].config.seed == 3);
    std::istringstream again(format_plan(p));
    CHECK(parse_plan(again) == p);

    std::istringstream per_point("point op=r burst=incr:8 rate=2400 channels=2\n");
    auto q = parse_plan(per_point);
    CHECK(q.rate_of(q.points[0]) == 2400);
    CHECK(q.channels_of(q.points[0]) == 2);
}

TEST_CASE("plan errors name the line") {
    std::istringstream bad("name=x\n\npoint op=zz\n");
    try {
        parse_plan(bad);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).rfind("plan line 3:", 0) == 0);
    }
    std::istringstream unknown("colour=blue\n");
    CHECK_THROWS_AS(parse_plan(unknown), Error);
}

TEST_CASE("plan validation") {
    BenchPlan p = small_plan();
    CHECK_NOTHROW(p.validate());
    BenchPlan q = p;
    q.repetitions = 0;
    CHECK_THROWS_AS(q.validate(), Error);
    q = p;
    q.channel_count = 4;
    CHECK_THROWS_AS(q.validate(), Error);
    q.max_channels = 4;
    CHECK_NOTHROW(q.validate());
    q = p;
    q.data_rate_mts = 2666;
    CHECK_THROWS_AS(q.validate(), Error);
    q = p;
    q.points.clear();
    CHECK_THROWS_AS(q.validate(), Error);
}

TEST_CASE("rows come out in plan order with one row per direction") {
    BenchPlan p = small_plan();
    p.repetitions = 2;
    ResultSet r = run_plan(p);
    // Per point: read, read, write, mixed (read + write + combined); each
    // point's repetitions are adjacent.
    REQUIRE(r.rows.size() == 2 * 6);
    CHECK(r.rows[0].point == 0);
    CHECK(r.rows[0].repetition == 0);
    CHECK(r.rows[1].point == 0);
    CHECK(r.rows[1].repetition == 1);
    CHECK(r.rows[2].point == 1);
    CHECK(r.rows[11].point == 3);
    CHECK(r.rows[11].direction == ReportDirection::Combined);
    CHECK(r.data_errors() == 0);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        if (row.direction == ReportDirection::Combined) {
            CHECK(row.throughput_gbps == r.rows[i - 2].throughput_gbps + r.rows[i - 1].throughput_gbps);
            CHECK(row.bytes == r.rows[i - 2].bytes + r.rows[i - 1].bytes);
        } else {
            CHECK(row.throughput_gbps == throughput_gbps(row.bytes, row.cycles, row.axi_clock_hz));
        }
    }
}

TEST_CASE("repetitions with fixed seeds are identical") {
    BenchPlan p = small_plan();
    p.repetitions = 3;
    ResultSet r = run_plan(p);
    std::map<std::tuple<std::size_t, std::uint32_t, ReportDirection>, double> first;
    std::size_t compared = 0;
    for (const auto& row : r.rows) {
        auto key = std::make_tuple(row.point, row.channel, row.direction);
        if (row.repetition == 0) {
            first[key] = row.throughput_gbps;
        } else {
            CHECK(row.throughput_gbps == first.at(key));
            ++compared;
        }
    }
    CHECK(compared == 2 * first.size());
}

TEST_CASE("parallel and serial runs agree") {
    BenchPlan p = small_plan();
    RunOptions serial;
    RunOptions parallel;
    parallel.jobs = 3;
    CHECK(run_plan(p, serial) == run_plan(p, parallel));
}

TEST_CASE("CSV round trip is exact") {
    ResultSet r = run_plan(small_plan());
    std::ostringstream os;
    write_csv(os, r);
    std::istringstream is(os.str());
    ResultSet back = read_csv(is);
    CHECK(back == r);
    std::ostringstream again;
    write_csv(again, back);
    CHECK(again.str() == os.str());
    CHECK(os.str().rfind("plan,point,repetition,rate,", 0) == 0);

    std::istringstream broken("not,a,header\n");
    CHECK_THROWS_AS(read_csv(broken), Error);
}

TEST_CASE("charts are standalone SVG") {
    ResultSet r = run_plan(small_plan());
    auto charts = render_charts(r);
    REQUIRE(charts.size() == 1);
    CHECK(charts[0].name == "small-ddr4-1600-1ch");
    const std::string& svg = charts[0].svg;
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
    CHECK(svg.rfind("</svg>") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);
    CHECK(svg.find("seq/read") != std::string::npos);
}

TEST_CASE("compare of a result set with itself is all ones") {
    ResultSet r = run_plan(small_plan());
    CompareReport c = compare(r, r);
    CHECK(c.points.size() == r.rows.size());
    for (const auto& p : c.points) CHECK(p.ratio == 1.0);
    for (const auto& cat : c.categories) {
        CHECK(cat.min == 1.0);
        CHECK(cat.max == 1.0);
    }
    CHECK(c.categories.front().category == "seq/read");
    CHECK_FALSE(format_compare(c).empty());
}

TEST_CASE("compare across data rates pairs rows by shape") {
    ResultSet slow = run_plan(small_plan(1600));
    ResultSet fast = run_plan(small_plan(2400));
    CompareReport c = compare(slow, fast);
    for (const auto& p : c.points) {
        CHECK(p.ratio == doctest::Approx(p.other_gbps / p.baseline_gbps));
        CHECK(p.ratio > 0.9);
        CHECK(p.ratio < 1.6);
    }
}

TEST_CASE("compare rejects mismatched shapes") {
    ResultSet r = run_plan(small_plan());
    ResultSet fewer = r;
    fewer.rows.pop_back();
    try {
        compare(r, fewer);
        FAIL("expected a shape mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ShapeMismatch);
    }
    ResultSet changed = r;
    changed.rows[0].config.burst_len = 8;
    CHECK_THROWS_AS(compare(r, changed), Error);
}

TEST_CASE("categories") {
    TrafficConfig c;
    CHECK(category_of(c, ReportDirection::Read) == "seq/read");
    c.addressing = Addressing::Random;
    c.op_mode = OpMode::Mixed;
    CHECK(category_of(c, ReportDirection::Write) == "rnd/mixed-write");
}

TEST_CASE("failing points are named in the error") {
    BenchPlan p = small_plan();
    RunOptions o;
    o.timing_overrides = "tRCD=0\n";
    try {
        run_plan(p, o);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadConfig);
    }
}

TEST_CASE("summary table has one line per point") {
    ResultSet r = run_plan(small_plan());
    std::string t = summary_table(r);
    CHECK(count(t, "\n") >= 4);
}

}  // TEST_SUITE
