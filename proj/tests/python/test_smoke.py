# Copyright 2026 The ddr4bench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import subprocess
import xml.dom.minidom

import pytest

import ddr4bench

SMALL_PLAN = """
name=pysmall
point op=r addr=seq burst=incr:8 batch=200
point op=w addr=rnd:5 burst=incr:8 batch=200
point op=mixed addr=seq burst=incr:4 batch=200
"""


def test_throughput_arithmetic():
    assert ddr4bench.throughput_gbps(64_000_000, 2_000_000, 200e6) == pytest.approx(6.4, rel=1e-12)


def test_builtin_plans_listed():
    assert set(ddr4bench.builtin_plans()) == {"table3", "fig3", "fig4", "scale-rate", "scale-channels"}
    assert 1600 in ddr4bench.supported_rates()
    assert "point" in ddr4bench.format_plan("table3")


def test_host_protocol_and_methods():
    host = ddr4bench.HostController(channels=2, rate=1600)
    assert host.channel_count == 2
    assert host.execute("config 0 op=r addr=seq burst=incr:16 batch=50") == "ok"
    line = host.execute("run 0")
    assert line.startswith("ok ch=0")
    assert "read_tx=50" in line

    host.configure(1, "op=mixed addr=rnd:3 burst=incr:8 batch=100")
    result = host.run(1)
    counters = result["counters"]
    assert counters["read_tx"] == 50 and counters["write_tx"] == 50
    assert counters["data_errors"] == 0
    by_dir = {r["direction"]: r for r in result["reports"]}
    assert by_dir["combined"]["throughput_gbps"] == by_dir["read"]["throughput_gbps"] + by_dir["write"]["throughput_gbps"]
    for r in (by_dir["read"], by_dir["write"]):
        assert r["throughput_gbps"] == ddr4bench.throughput_gbps(r["bytes"], r["cycles"], r["axi_clock_hz"])

    host.reset(1)
    assert host.counters(1)["write_tx"] == 0


def test_run_all_identical_channels():
    host = ddr4bench.HostController(channels=3)
    for ch in range(3):
        host.configure(ch, "op=r addr=rnd:9 burst=incr:32 batch=40")
    out = host.run_all()
    assert len(set(out["per_channel_gbps"])) == 1
    assert out["total_gbps"] == pytest.approx(3 * out["per_channel_gbps"][0], rel=1e-12)


def test_errors_raise_library_exception():
    host = ddr4bench.HostController()
    with pytest.raises(ddr4bench.Error, match="bad_config"):
        host.run(0)
    with pytest.raises(ddr4bench.Error, match="bad_channel"):
        host.counters(5)
    assert host.execute("bogus").startswith("err parse")
    with pytest.raises(ddr4bench.Error):
        ddr4bench.run_plan("name=x\npoint op=nope\n")


def test_run_plan_csv_round_trip_and_determinism():
    a = ddr4bench.run_plan(SMALL_PLAN)
    b = ddr4bench.run_plan(SMALL_PLAN)
    assert a.to_csv() == b.to_csv()
    assert a.data_errors == 0
    rows = a.rows
    assert len(rows) == len(a) == 5
    assert rows[0]["category"] == "seq/read"
    back = ddr4bench.Results.from_csv(a.to_csv())
    assert back == a
    assert back.to_csv() == a.to_csv()
    assert "pysmall" in a.summary() or len(a.summary()) > 0


def test_charts_are_well_formed_svg():
    res = ddr4bench.run_plan(SMALL_PLAN, rate=2400)
    charts = res.charts()
    assert [name for name, _ in charts] == ["pysmall-ddr4-2400-1ch"]
    doc = xml.dom.minidom.parseString(charts[0][1])
    assert doc.documentElement.tagName == "svg"


def test_compare_identical_and_across_rates():
    slow = ddr4bench.run_plan(SMALL_PLAN, rate=1600)
    same = ddr4bench.compare(slow, slow)
    assert all(p["ratio"] == 1.0 for p in same["points"])
    fast = ddr4bench.run_plan(SMALL_PLAN, rate=2400)
    cmp = ddr4bench.compare(slow, fast)
    assert set(cmp["categories"]) >= {"seq/read", "rnd/write"}
    assert cmp["text"]


def test_normalize_config_round_trips():
    text = ddr4bench.normalize_config("op=w burst=wrap:4 sig=b batch=10 range=0:0x100000")
    assert ddr4bench.normalize_config(text) == text


CLI = os.environ.get("DDR4BENCH_CLI")


@pytest.mark.skipif(not CLI, reason="CLI binary not provided")
def test_cli_writes_csv_and_svg(tmp_path):
    plan = tmp_path / "small.plan"
    plan.write_text(SMALL_PLAN)
    out = subprocess.run([CLI, "--plan", str(plan), "--csv", "--svg", "--out", str(tmp_path), "-q"],
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    csv = (tmp_path / "pysmall.csv").read_text()
    assert csv.startswith("plan,point,repetition,rate,")
    xml.dom.minidom.parse(str(tmp_path / "pysmall-ddr4-1600-1ch.svg"))

    cmp = subprocess.run([CLI, "compare", str(tmp_path / "pysmall.csv"), str(tmp_path / "pysmall.csv")],
                         capture_output=True, text=True)
    assert cmp.returncode == 0

    bad = subprocess.run([CLI, "--plan", "no-such-plan", "-q"], capture_output=True, text=True)
    assert bad.returncode == 2
    assert "ddr4bench:" in bad.stderr


@pytest.mark.skipif(not CLI, reason="CLI binary not provided")
def test_cli_host_mode():
    proc = subprocess.run([CLI, "host", "--channels", "2"],
                          input="query\n\nconfig 1 op=r burst=incr:4 batch=10\nrun 1\nquit\nrun 0\n",
                          capture_output=True, text=True)
    lines = proc.stdout.strip().splitlines()
    assert proc.returncode == 0
    assert len(lines) == 3
    assert "channels=2" in lines[0]
    assert lines[1] == "ok"
    assert "read_tx=10" in lines[2]
