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

#include <pybind11/gil_safe_call_once.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ddr4bench/bench.hpp"

namespace py = pybind11;
using namespace ddr4bench;

namespace {

py::dict counters_dict(const PerfCounters& c) {
    py::dict d;
    d["read_cycles"] = c.read_cycles;
    d["write_cycles"] = c.write_cycles;
    d["read_tx"] = c.read_tx;
    d["write_tx"] = c.write_tx;
    d["read_bytes"] = c.read_bytes;
    d["write_bytes"] = c.write_bytes;
    d["data_errors"] = c.data_errors;
    d["unchecked_reads"] = c.unchecked_reads;
    return d;
}

py::dict report_dict(const ThroughputReport& r) {
    py::dict d;
    d["channel"] = r.channel;
    d["direction"] = std::string(to_string(r.direction));
    d["bytes"] = r.bytes;
    d["cycles"] = r.cycles;
    d["axi_clock_hz"] = r.axi_clock_hz;
    d["throughput_gbps"] = r.throughput_gbps;
    d["tx_count"] = r.tx_count;
    d["mean_cycles_per_tx"] = r.mean_cycles_per_tx;
    return d;
}

py::dict run_dict(const RunResult& r) {
    py::dict d;
    d["channel"] = r.channel;
    d["counters"] = counters_dict(r.counters);
    py::list reports;
    for (const auto& t : r.reports) reports.append(report_dict(t));
    d["reports"] = reports;
    return d;
}

py::dict row_dict(const ResultRow& r) {
    py::dict d;
    d["plan"] = r.plan;
    d["point"] = r.point;
    d["repetition"] = r.repetition;
    d["rate"] = r.data_rate_mts;
    d["channels"] = r.channels;
    d["channel"] = r.channel;
    d["category"] = category_of(r.config, r.direction);
    d["burst_len"] = r.config.burst_len;
    d["direction"] = std::string(to_string(r.direction));
    d["bytes"] = r.bytes;
    d["cycles"] = r.cycles;
    d["axi_hz"] = r.axi_clock_hz;
    d["tx"] = r.tx_count;
    d["gbps"] = r.throughput_gbps;
    d["data_errors"] = r.data_errors;
    d["config"] = format_config(r.config);
    return d;
}

BenchPlan load_plan(const std::string& spec) {
    auto names = builtin_plan_names();
    for (const auto& n : names)
        if (n == spec) return builtin_plan(spec);
    std::istringstream in(spec);
    return parse_plan(in);
}

/// Runs a plan and keeps the result set so it can be exported.
class Results {
public:
    explicit Results(ResultSet set) : set_(std::move(set)) {}

    py::list rows() const {
        py::list out;
        for (const auto& r : set_.rows) out.append(row_dict(r));
        return out;
    }
    std::string csv() const {
        std::ostringstream os;
        write_csv(os, set_);
        return os.str();
    }
    std::string summary() const { return summary_table(set_); }
    std::vector<std::pair<std::string, std::string>> charts() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (auto& c : render_charts(set_)) out.emplace_back(c.name, c.svg);
        return out;
    }
    std::uint64_t data_errors() const { return set_.data_errors(); }
    const ResultSet& set() const { return set_; }

private:
    ResultSet set_;
};

Results results_from_csv(const std::string& text) {
    std::istringstream in(text);
    return Results(read_csv(in));
}

py::dict compare_dict(const Results& baseline, const Results& other) {
    CompareReport rep = compare(baseline.set(), other.set());
    py::list points;
    for (const auto& p : rep.points) {
        py::dict d;
        d["row"] = p.row;
        d["category"] = p.category;
        d["burst_len"] = p.burst_len;
        d["baseline_gbps"] = p.baseline_gbps;
        d["other_gbps"] = p.other_gbps;
        d["ratio"] = p.ratio;
        points.append(d);
    }
    py::dict cats;
    for (const auto& c : rep.categories) {
        py::dict d;
        d["count"] = c.count;
        d["min"] = c.min;
        d["mean"] = c.mean;
        d["max"] = c.max;
        cats[py::str(c.category)] = d;
    }
    py::dict out;
    out["points"] = points;
    out["categories"] = cats;
    out["text"] = format_compare(rep);
    return out;
}

}  // namespace

PYBIND11_MODULE(_ddr4bench, m) {
    m.doc() = "Cycle-level DDR4 memory subsystem simulator and benchmark";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result([&] { return py::exception<Error>(m, "Error"); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            std::string msg = std::string(to_string(e.code())) + ": " + e.what();
            py::set_error(error_type.get_stored(), msg.c_str());
        }
    });

    m.def("throughput_gbps", &throughput_gbps, py::arg("bytes"), py::arg("cycles"),
          py::arg("axi_clock_hz"), "bytes / (cycles / axi_clock_hz) / 1e9");
    m.def("builtin_plans", &builtin_plan_names);
    m.def("supported_rates", [] { return std::vector<std::uint32_t>{1600, 1866, 2133, 2400}; });
    m.def("format_plan", [](const std::string& spec) { return format_plan(load_plan(spec)); },
          py::arg("plan"), "Plan text for a built-in name or plan file contents.");
    m.def("normalize_config", [](const std::string& fields) { return format_config(parse_config(fields)); },
          py::arg("fields"), "Parses host-protocol config fields and formats them back.");

    py::class_<HostController>(m, "HostController")
        .def(py::init([](std::uint32_t channels, std::uint32_t rate, bool refresh) {
                 HostOptions o;
                 o.channels = channels;
                 RunOptions ro;
                 ro.refresh = refresh;
                 o.channel = make_channel_options(rate, ro);
                 return std::make_unique<HostController>(o);
             }),
             py::arg("channels") = 1, py::arg("rate") = 1600, py::arg("refresh") = true)
        .def_property_readonly("channel_count", &HostController::channel_count)
        .def("execute", &HostController::execute_line, py::arg("line"),
             "Runs one protocol line and returns the response line.")
        .def("configure",
             [](HostController& h, std::uint32_t ch, const std::string& fields) {
                 h.configure(ch, parse_config(fields));
             },
             py::arg("channel"), py::arg("fields"))
        .def("run",
             [](HostController& h, std::uint32_t ch) {
                 RunResult r;
                 {
                     py::gil_scoped_release release;
                     r = h.run(ch);
                 }
                 return run_dict(r);
             },
             py::arg("channel"))
        .def("run_all",
             [](HostController& h) {
                 RunAllResult r;
                 {
                     py::gil_scoped_release release;
                     r = h.run_all();
                 }
                 py::list channels;
                 for (const auto& c : r.channels) channels.append(run_dict(c));
                 py::dict d;
                 d["channels"] = channels;
                 d["per_channel_gbps"] = r.system.per_channel_gbps;
                 d["total_gbps"] = r.system.total_gbps;
                 return d;
             })
        .def("counters", [](const HostController& h, std::uint32_t ch) { return counters_dict(h.counters(ch)); },
             py::arg("channel"))
        .def("reset", &HostController::reset, py::arg("channel"));

    py::class_<Results>(m, "Results")
        .def_static("from_csv", &results_from_csv, py::arg("text"))
        .def_property_readonly("rows", &Results::rows)
        .def_property_readonly("data_errors", &Results::data_errors)
        .def("to_csv", &Results::csv)
        .def("summary", &Results::summary)
        .def("charts", &Results::charts, "List of (name, svg) pairs.")
        .def("__len__", [](const Results& r) { return r.set().rows.size(); })
        .def("__eq__", [](const Results& a, const Results& b) { return a.set() == b.set(); });

    m.def(
        "run_plan",
        [](const std::string& plan, std::optional<std::uint32_t> rate,
           std::optional<std::uint32_t> channels, std::optional<std::uint32_t> repetitions,
           bool refresh, unsigned jobs, std::optional<std::uint64_t> seed,
           std::optional<std::string> timings) {
            BenchPlan p = load_plan(plan);
            if (rate) p.data_rate_mts = *rate;
            if (channels) p.channel_count = *channels;
            if (repetitions) p.repetitions = *repetitions;
            RunOptions o;
            o.refresh = refresh;
            o.jobs = std::max(1u, jobs);
            o.seed = seed;
            o.timing_overrides = timings;
            py::gil_scoped_release release;
            return Results(run_plan(p, o));
        },
        py::arg("plan"), py::arg("rate") = py::none(), py::arg("channels") = py::none(),
        py::arg("repetitions") = py::none(), py::arg("refresh") = true, py::arg("jobs") = 1,
        py::arg("seed") = py::none(), py::arg("timings") = py::none(),
        "Runs a built-in plan by name or a plan given as text.");

    m.def("compare", &compare_dict, py::arg("baseline"), py::arg("other"));
}
