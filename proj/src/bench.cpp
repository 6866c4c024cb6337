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

#include "ddr4bench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace ddr4bench {

namespace {

constexpr std::string_view kCsvHeader =
    "plan,point,repetition,rate,channels,channel,op,addressing,burst_type,burst_len,direction,"
    "bytes,cycles,axi_hz,tx,gbps,data_errors,config";

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t c = line.find(',', pos);
        out.push_back(line.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
        if (c == std::string::npos) break;
        pos = c + 1;
    }
    return out;
}

std::string_view op_name(OpMode m) {
    switch (m) {
        case OpMode::ReadOnly: return "r";
        case OpMode::WriteOnly: return "w";
        case OpMode::Mixed: return "mixed";
    }
    return "?";
}

std::string_view addr_name(Addressing a) { return a == Addressing::Sequential ? "seq" : "rnd"; }

PlanPoint point(OpMode op, Addressing addr, std::uint32_t len, std::uint32_t rate = 0,
                std::uint32_t channels = 0) {
    PlanPoint p;
    p.config.op_mode = op;
    p.config.addressing = addr;
    p.config.burst_len = len;
    p.config.batch_len = 0;
    p.config.limit = 0;
    p.data_rate_mts = rate;
    p.channels = channels;
    return p;
}

constexpr Addressing kAddrs[] = {Addressing::Sequential, Addressing::Random};
constexpr OpMode kReadWrite[] = {OpMode::ReadOnly, OpMode::WriteOnly};

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double nice_ceiling(double v) {
    if (v <= 0) return 1.0;
    double mag = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (m * mag >= v) return m * mag;
    return 10.0 * mag;
}

}  // namespace

std::vector<std::uint32_t> sweep_burst_lengths() { return {1, 2, 4, 8, 16, 32, 64, 128}; }

void BenchPlan::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::BadConfig, m); };
    if (name.empty() || name.find_first_of(", \t\n") != std::string::npos)
        bad("plan name must be non-empty without commas or spaces");
    if (repetitions < 1) bad("repetitions must be at least 1");
    if (points.empty()) bad("plan has no points");
    if (max_channels < 1) bad("channel limit must be at least 1");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        std::uint32_t ch = channels_of(p);
        if (ch < 1 || ch > max_channels)
            bad("point " + std::to_string(i) + ": channel count " + std::to_string(ch) +
                " outside 1.." + std::to_string(max_channels));
        ClockConfig::for_rate(rate_of(p));
        TrafficConfig cfg = p.config;
        DramGeometry g;
        if (cfg.limit == 0) cfg.limit = g.capacity_bytes();
        if (cfg.batch_len == 0)
            cfg.batch_len = auto_batch_len(TimingParams::preset(rate_of(p)), cfg.burst_len);
        try {
            cfg.validate(g.capacity_bytes());
        } catch (const Error& e) {
            bad("point " + std::to_string(i) + ": " + e.what());
        }
    }
}

std::vector<std::string> builtin_plan_names() {
    return {"table3", "fig3", "fig4", "scale-rate", "scale-channels"};
}

BenchPlan builtin_plan(std::string_view name) {
    BenchPlan plan;
    plan.name = std::string(name);
    if (name == "table3") {
        for (auto op : kReadWrite)
            for (std::uint32_t len : {1u, 4u, 32u, 128u})
                for (auto a : kAddrs) plan.points.push_back(point(op, a, len));
    } else if (name == "fig3") {
        for (auto op : kReadWrite)
            for (auto a : kAddrs)
                for (auto len : sweep_burst_lengths()) plan.points.push_back(point(op, a, len));
    } else if (name == "fig4") {
        for (auto a : kAddrs)
            for (auto len : sweep_burst_lengths())
                plan.points.push_back(point(OpMode::Mixed, a, len));
    } else if (name == "scale-rate") {
        for (std::uint32_t rate : {1600u, 1866u, 2133u, 2400u})
            for (auto op : kReadWrite)
                for (auto a : kAddrs)
                    for (std::uint32_t len : {1u, 4u, 32u, 128u})
                        plan.points.push_back(point(op, a, len, rate));
    } else if (name == "scale-channels") {
        for (std::uint32_t ch : {1u, 2u, 3u})
            for (auto op : {OpMode::ReadOnly, OpMode::WriteOnly, OpMode::Mixed})
                for (auto a : kAddrs) plan.points.push_back(point(op, a, 128, 0, ch));
    } else {
        throw Error(ErrorCode::BadConfig, "unknown plan: " + std::string(name));
    }
    return plan;
}

BenchPlan parse_plan(std::istream& in) {
    BenchPlan plan;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw Error(ErrorCode::Parse, "plan line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        try {
            if (t.rfind("point", 0) == 0 && (t.size() == 5 || t[5] == ' ' || t[5] == '\t')) {
                PlanPoint p;
                std::string fields;
                std::istringstream ss(t.substr(5));
                std::string tok;
                while (ss >> tok) {
                    if (tok.rfind("rate=", 0) == 0) p.data_rate_mts = static_cast<std::uint32_t>(parse_u64(tok.substr(5)));
                    else if (tok.rfind("channels=", 0) == 0) p.channels = static_cast<std::uint32_t>(parse_u64(tok.substr(9)));
                    else fields += tok + ' ';
                }
                p.config = parse_config(fields);
                plan.points.push_back(p);
                continue;
            }
            auto eq = t.find('=');
            if (eq == std::string::npos) fail("expected key=value or a point line");
            std::string key = trim(t.substr(0, eq));
            std::string val = trim(t.substr(eq + 1));
            if (key == "name") plan.name = val;
            else if (key == "rate") plan.data_rate_mts = static_cast<std::uint32_t>(parse_u64(val));
            else if (key == "channels") plan.channel_count = static_cast<std::uint32_t>(parse_u64(val));
            else if (key == "repetitions") plan.repetitions = static_cast<std::uint32_t>(parse_u64(val));
            else if (key == "max_channels") plan.max_channels = static_cast<std::uint32_t>(parse_u64(val));
            else fail("unknown plan key: " + key);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Parse && std::string(e.what()).rfind("plan line", 0) == 0) throw;
            fail(e.what());
        }
    }
    return plan;
}

std::string format_plan(const BenchPlan& plan) {
    std::ostringstream os;
    os << "name=" << plan.name << "\nrate=" << plan.data_rate_mts
       << "\nchannels=" << plan.channel_count << "\nrepetitions=" << plan.repetitions
       << "\nmax_channels=" << plan.max_channels << '\n';
    for (const auto& p : plan.points) {
        os << "point " << format_config(p.config);
        if (p.data_rate_mts) os << " rate=" << p.data_rate_mts;
        if (p.channels) os << " channels=" << p.channels;
        os << '\n';
    }
    return os.str();
}

ChannelOptions make_channel_options(std::uint32_t data_rate_mts, const RunOptions& options) {
    ChannelOptions o = ChannelOptions::for_rate(data_rate_mts);
    if (options.timing_overrides) {
        std::istringstream in(*options.timing_overrides);
        o.timing.apply_overrides(in);
        o.timing.validate();
    }
    o.refresh = options.refresh;
    o.log_commands = options.log_commands;
    return o;
}

std::uint64_t ResultSet::data_errors() const {
    std::uint64_t n = 0;
    for (const auto& r : rows)
        if (r.direction != ReportDirection::Combined) n += r.data_errors;
    return n;
}

ResultSet run_plan(const BenchPlan& plan, const RunOptions& options) {
    plan.validate();
    struct Task {
        std::size_t point;
        std::uint32_t rep;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < plan.points.size(); ++i)
        for (std::uint32_t r = 0; r < plan.repetitions; ++r) tasks.push_back({i, r});

    std::vector<std::vector<ResultRow>> out(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(tasks.size())));

    auto run_task = [&](std::size_t t) {
        const Task& task = tasks[t];
        const PlanPoint& p = plan.points[task.point];
        HostOptions ho;
        ho.channels = plan.channels_of(p);
        ho.channel = make_channel_options(plan.rate_of(p), options);
        ho.jobs = jobs > 1 ? 1 : 0;
        HostController host(ho);
        TrafficConfig cfg = p.config;
        if (options.seed) {
            if (cfg.addressing == Addressing::Random) cfg.seed = *options.seed;
            if (cfg.data_pattern == DataPattern::Lfsr) cfg.data_seed = *options.seed;
        }
        for (std::uint32_t c = 0; c < ho.channels; ++c) host.configure(c, cfg);
        RunAllResult all = host.run_all();
        for (const auto& ch : all.channels) {
            if (options.on_channel) options.on_channel(host.channel(ch.channel), task.point, task.rep, ch.channel);
            for (const auto& rep : ch.reports) {
                ResultRow row;
                row.plan = plan.name;
                row.point = task.point;
                row.repetition = task.rep;
                row.data_rate_mts = plan.rate_of(p);
                row.channels = ho.channels;
                row.channel = ch.channel;
                row.config = *host.config(ch.channel);
                row.direction = rep.direction;
                row.bytes = rep.bytes;
                row.cycles = rep.cycles;
                row.axi_clock_hz = rep.axi_clock_hz;
                row.tx_count = rep.tx_count;
                row.throughput_gbps = rep.throughput_gbps;
                row.data_errors = ch.counters.data_errors;
                out[t].push_back(row);
            }
        }
    };
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            try {
                run_task(t);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (!errors[t]) continue;
        const PlanPoint& p = plan.points[tasks[t].point];
        std::string where = "point " + std::to_string(tasks[t].point) + " (" +
                            format_config(p.config) + " rate=" + std::to_string(plan.rate_of(p)) + ")";
        try {
            std::rethrow_exception(errors[t]);
        } catch (const Error& e) {
            throw Error(e.code(), where + ": " + e.what());
        }
    }
    ResultSet rs;
    rs.plan = plan.name;
    for (auto& v : out)
        for (auto& r : v) rs.rows.push_back(std::move(r));
    return rs;
}

void write_csv(std::ostream& os, const ResultSet& results) {
    os << kCsvHeader << '\n';
    for (const auto& r : results.rows) {
        os << r.plan << ',' << r.point << ',' << r.repetition << ',' << r.data_rate_mts << ','
           << r.channels << ',' << r.channel << ',' << op_name(r.config.op_mode) << ','
           << addr_name(r.config.addressing) << ',' << to_string(r.config.burst_type) << ','
           << r.config.burst_len << ',' << to_string(r.direction) << ',' << r.bytes << ','
           << r.cycles << ',' << format_double(r.axi_clock_hz) << ',' << r.tx_count << ','
           << format_double(r.throughput_gbps) << ',' << r.data_errors << ','
           << format_config(r.config) << '\n';
    }
}

ResultSet read_csv(std::istream& is) {
    ResultSet rs;
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line) || trim(line) != kCsvHeader)
        throw Error(ErrorCode::Parse, "csv: missing or unexpected header");
    ++lineno;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto f = split_csv(trim(line));
        if (f.size() != 18)
            throw Error(ErrorCode::Parse, "csv line " + std::to_string(lineno) + ": expected 18 fields");
        try {
            ResultRow r;
            r.plan = f[0];
            r.point = parse_u64(f[1]);
            r.repetition = static_cast<std::uint32_t>(parse_u64(f[2]));
            r.data_rate_mts = static_cast<std::uint32_t>(parse_u64(f[3]));
            r.channels = static_cast<std::uint32_t>(parse_u64(f[4]));
            r.channel = static_cast<std::uint32_t>(parse_u64(f[5]));
            r.direction = parse_report_direction(f[10]);
            r.bytes = parse_u64(f[11]);
            r.cycles = parse_u64(f[12]);
            r.axi_clock_hz = parse_double(f[13]);
            r.tx_count = parse_u64(f[14]);
            r.throughput_gbps = parse_double(f[15]);
            r.data_errors = parse_u64(f[16]);
            r.config = parse_config(f[17]);
            if (rs.rows.empty()) rs.plan = r.plan;
            rs.rows.push_back(std::move(r));
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, "csv line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rs;
}

namespace {

struct PointSummary {
    const ResultRow* first = nullptr;
    // direction -> (repetition -> sum over channels)
    std::map<ReportDirection, std::map<std::uint32_t, double>> sums;

    double value(ReportDirection d) const {
        auto it = sums.find(d);
        if (it == sums.end() || it->second.empty()) return -1.0;
        double total = 0.0;
        for (const auto& [rep, v] : it->second) total += v;
        return total / static_cast<double>(it->second.size());
    }
};

std::vector<PointSummary> summarize(const ResultSet& results) {
    std::map<std::size_t, PointSummary> by_point;
    for (const auto& r : results.rows) {
        auto& s = by_point[r.point];
        if (!s.first) s.first = &r;
        s.sums[r.direction][r.repetition] += r.throughput_gbps;
    }
    std::vector<PointSummary> out;
    for (auto& [i, s] : by_point) out.push_back(std::move(s));
    return out;
}

}  // namespace

std::string summary_table(const ResultSet& results) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-5s %-5s %-3s %-6s %-4s %-9s %9s %9s %9s\n", "point", "rate",
                  "ch", "op", "addr", "burst", "read", "write", "combined");
    os << buf;
    auto cell = [](double v) { return v < 0 ? std::string("-") : fixed(v, 3); };
    for (const auto& s : summarize(results)) {
        const ResultRow& r = *s.first;
        std::string burst = std::string(to_string(r.config.burst_type)) + ":" +
                            std::to_string(r.config.burst_len);
        std::snprintf(buf, sizeof buf, "%-5zu %-5u %-3u %-6s %-4s %-9s %9s %9s %9s\n", r.point,
                      r.data_rate_mts, r.channels, std::string(op_name(r.config.op_mode)).c_str(),
                      std::string(addr_name(r.config.addressing)).c_str(), burst.c_str(),
                      cell(s.value(ReportDirection::Read)).c_str(),
                      cell(s.value(ReportDirection::Write)).c_str(),
                      cell(s.value(ReportDirection::Combined)).c_str());
        os << buf;
    }
    return os.str();
}

std::vector<SvgChart> render_charts(const ResultSet& results) {
    struct Series {
        std::string label;
        std::vector<std::pair<std::uint32_t, double>> pts;
    };
    struct Group {
        std::uint32_t rate = 0;
        std::uint32_t channels = 0;
        std::vector<Series> series;
    };
    std::vector<Group> groups;
    for (const auto& s : summarize(results)) {
        const ResultRow& r = *s.first;
        auto g = std::find_if(groups.begin(), groups.end(), [&](const Group& x) {
            return x.rate == r.data_rate_mts && x.channels == r.channels;
        });
        if (g == groups.end()) {
            groups.push_back({r.data_rate_mts, r.channels, {}});
            g = groups.end() - 1;
        }
        for (auto d : {ReportDirection::Read, ReportDirection::Write, ReportDirection::Combined}) {
            double v = s.value(d);
            if (v < 0) continue;
            std::string label = category_of(r.config, d);
            if (r.config.burst_type != BurstType::Incr)
                label += " " + std::string(to_string(r.config.burst_type));
            auto ser = std::find_if(g->series.begin(), g->series.end(),
                                    [&](const Series& x) { return x.label == label; });
            if (ser == g->series.end()) {
                g->series.push_back({label, {}});
                ser = g->series.end() - 1;
            }
            ser->pts.push_back({r.config.burst_len, v});
        }
    }

    static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    const double W = 760, H = 460, L = 70, R = 200, T = 50, B = 60;
    std::vector<SvgChart> charts;
    for (auto& g : groups) {
        std::uint32_t xmin = 128, xmax = 1;
        double ymax = 0.0;
        for (auto& s : g.series) {
            std::sort(s.pts.begin(), s.pts.end());
            for (auto& [x, y] : s.pts) {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymax = std::max(ymax, y);
            }
        }
        if (xmin > xmax) xmin = xmax;
        ymax = nice_ceiling(ymax);
        const double lx0 = std::log2(static_cast<double>(xmin));
        const double lx1 = std::log2(static_cast<double>(xmax));
        auto px = [&](std::uint32_t x) {
            if (lx1 == lx0) return L + (W - L - R) / 2;
            return L + (std::log2(static_cast<double>(x)) - lx0) / (lx1 - lx0) * (W - L - R);
        };
        auto py = [&](double y) { return H - B - y / ymax * (H - T - B); };

        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
           << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        std::string title = results.plan + ": DDR4-" + std::to_string(g.rate) + ", " +
                            std::to_string(g.channels) + (g.channels == 1 ? " channel" : " channels");
        os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
           << xml_escape(title) << "</text>\n";
        // Axes and grid.
        os << "<g stroke=\"#888\" stroke-width=\"1\">\n";
        os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
        os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n";
        os << "</g>\n";
        for (int i = 0; i <= 5; ++i) {
            double y = ymax * i / 5;
            os << "<line x1=\"" << L << "\" y1=\"" << fixed(py(y), 1) << "\" x2=\"" << W - R
               << "\" y2=\"" << fixed(py(y), 1) << "\" stroke=\"#eee\"/>\n";
            os << "<text x=\"" << L - 6 << "\" y=\"" << fixed(py(y) + 4, 1)
               << "\" text-anchor=\"end\">" << fixed(y, 2) << "</text>\n";
        }
        for (std::uint32_t x = xmin; x <= xmax && x != 0; x *= 2) {
            os << "<text x=\"" << fixed(px(x), 1) << "\" y=\"" << H - B + 18
               << "\" text-anchor=\"middle\">" << x << "</text>\n";
        }
        os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18
           << "\" text-anchor=\"middle\">burst length (beats)</text>\n";
        os << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
           << (T + H - B) / 2 << ")\">throughput (GB/s)</text>\n";
        for (std::size_t i = 0; i < g.series.size(); ++i) {
            const auto& s = g.series[i];
            const char* color = kColors[i % std::size(kColors)];
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
            for (std::size_t k = 0; k < s.pts.size(); ++k)
                os << (k ? " " : "") << fixed(px(s.pts[k].first), 1) << ',' << fixed(py(s.pts[k].second), 1);
            os << "\"/>\n";
            for (const auto& [x, y] : s.pts)
                os << "<circle cx=\"" << fixed(px(x), 1) << "\" cy=\"" << fixed(py(y), 1)
                   << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            double ly = T + 10 + 20.0 * static_cast<double>(i);
            os << "<line x1=\"" << W - R + 16 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40
               << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.label)
               << "</text>\n";
        }
        os << "</svg>\n";
        charts.push_back({results.plan + "-ddr4-" + std::to_string(g.rate) + "-" +
                              std::to_string(g.channels) + "ch",
                          os.str()});
    }
    return charts;
}

std::string category_of(const TrafficConfig& cfg, ReportDirection direction) {
    std::string c(addr_name(cfg.addressing));
    c += '/';
    if (cfg.op_mode == OpMode::Mixed) c += "mixed-";
    c += to_string(direction);
    return c;
}

CompareReport compare(const ResultSet& baseline, const ResultSet& other) {
    auto mismatch = [](const std::string& m) { throw Error(ErrorCode::ShapeMismatch, m); };
    if (baseline.rows.size() != other.rows.size())
        mismatch("result sets have " + std::to_string(baseline.rows.size()) + " and " +
                 std::to_string(other.rows.size()) + " rows");
    CompareReport rep;
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> by_cat;
    for (std::size_t i = 0; i < baseline.rows.size(); ++i) {
        const ResultRow& a = baseline.rows[i];
        const ResultRow& b = other.rows[i];
        if (a.point != b.point || a.repetition != b.repetition || a.channel != b.channel ||
            a.channels != b.channels || a.direction != b.direction ||
            a.config.op_mode != b.config.op_mode || a.config.addressing != b.config.addressing ||
            a.config.burst_type != b.config.burst_type || a.config.burst_len != b.config.burst_len)
            mismatch("row " + std::to_string(i) + " does not describe the same point");
        PointRatio pr;
        pr.row = i;
        pr.category = category_of(a.config, a.direction);
        pr.burst_len = a.config.burst_len;
        pr.baseline_gbps = a.throughput_gbps;
        pr.other_gbps = b.throughput_gbps;
        pr.ratio = b.throughput_gbps / a.throughput_gbps;
        if (!by_cat.count(pr.category)) order.push_back(pr.category);
        by_cat[pr.category].push_back(pr.ratio);
        rep.points.push_back(pr);
    }
    for (const auto& c : order) {
        const auto& v = by_cat[c];
        CategoryStats s;
        s.category = c;
        s.count = v.size();
        s.min = *std::min_element(v.begin(), v.end());
        s.max = *std::max_element(v.begin(), v.end());
        double sum = 0.0;
        for (double x : v) sum += x;
        s.mean = sum / static_cast<double>(v.size());
        rep.categories.push_back(s);
    }
    return rep;
}

std::string format_compare(const CompareReport& report) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-5s %-22s %5s %10s %10s %8s\n", "row", "category", "burst",
                  "baseline", "other", "ratio");
    os << buf;
    for (const auto& p : report.points) {
        std::snprintf(buf, sizeof buf, "%-5zu %-22s %5u %10.3f %10.3f %8.3f\n", p.row,
                      p.category.c_str(), p.burst_len, p.baseline_gbps, p.other_gbps, p.ratio);
        os << buf;
    }
    os << '\n';
    std::snprintf(buf, sizeof buf, "%-22s %5s %8s %8s %8s\n", "category", "n", "min", "mean", "max");
    os << buf;
    for (const auto& c : report.categories) {
        std::snprintf(buf, sizeof buf, "%-22s %5zu %8.3f %8.3f %8.3f\n", c.category.c_str(), c.count,
                      c.min, c.mean, c.max);
        os << buf;
    }
    return os.str();
}

}  // namespace ddr4bench
