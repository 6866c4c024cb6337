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

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

#include "ddr4bench/bench.hpp"

namespace fs = std::filesystem;
using namespace ddr4bench;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

BenchPlan load_plan(const std::string& spec) {
    auto names = builtin_plan_names();
    if (std::find(names.begin(), names.end(), spec) != names.end()) return builtin_plan(spec);
    std::ifstream in(spec);
    if (!in) throw Error(ErrorCode::Io, "no built-in plan or file named " + spec);
    return parse_plan(in);
}

ResultSet load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    return read_csv(in);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cycle-level DDR4 memory subsystem benchmark"};
    app.require_subcommand(0, 1);

    std::string plan_spec = "table3";
    std::optional<std::uint32_t> rate;
    std::optional<std::uint32_t> channels;
    std::optional<std::uint32_t> max_channels;
    std::optional<std::uint32_t> repetitions;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool csv = false;
    bool svg = false;
    bool no_refresh = false;
    bool log_commands = false;
    bool quiet = false;
    bool list_plans = false;
    std::string timings;
    unsigned jobs = 1;

    app.add_option("--plan", plan_spec, "Built-in plan name or plan file")->capture_default_str();
    app.add_option("--rate", rate, "Data rate in MT/s (1600, 1866, 2133, 2400)");
    app.add_option("--channels", channels, "Channel count");
    app.add_option("--max-channels", max_channels, "Raise the channel soft limit");
    app.add_option("--repetitions", repetitions, "Repetitions per point");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Override random-address and data seeds");
    app.add_flag("--csv", csv, "Write <plan>.csv to the output directory");
    app.add_flag("--svg", svg, "Write SVG charts to the output directory");
    app.add_option("--timings", timings, "Timing override file (name = value lines)");
    app.add_flag("--no-refresh", no_refresh, "Disable refresh");
    app.add_option("--jobs", jobs, "Worker threads for plan points")->capture_default_str();
    app.add_flag("--command-log", log_commands, "Write each channel's DRAM command log as CSV");
    app.add_flag("-q,--quiet", quiet, "Do not print the summary table");
    app.add_flag("--list-plans", list_plans, "List built-in plans and exit");

    auto* host_cmd = app.add_subcommand("host", "Serve the host protocol on stdin/stdout");
    host_cmd->fallthrough();
    auto* cmp_cmd = app.add_subcommand("compare", "Compare two result CSV files");
    std::string cmp_base, cmp_other;
    cmp_cmd->add_option("baseline", cmp_base, "Baseline CSV")->required();
    cmp_cmd->add_option("other", cmp_other, "Other CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_plans) {
            for (const auto& n : builtin_plan_names())
                std::cout << n << " (" << builtin_plan(n).points.size() << " points)\n";
            return 0;
        }

        RunOptions opts;
        opts.refresh = !no_refresh;
        opts.jobs = std::max(1u, jobs);
        opts.seed = seed;
        opts.log_commands = log_commands;
        if (!timings.empty()) opts.timing_overrides = read_file(timings);

        if (*cmp_cmd) {
            auto report = compare(load_csv(cmp_base), load_csv(cmp_other));
            std::cout << format_compare(report);
            return 0;
        }

        if (*host_cmd) {
            HostOptions ho;
            ho.channels = channels.value_or(1);
            ho.channel = make_channel_options(rate.value_or(1600), opts);
            HostController host(ho);
            std::string line;
            while (std::getline(std::cin, line)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                if (line == "quit" || line == "exit") break;
                std::cout << host.execute_line(line) << std::endl;
            }
            return 0;
        }

        BenchPlan plan = load_plan(plan_spec);
        if (rate) plan.data_rate_mts = *rate;
        if (channels) plan.channel_count = *channels;
        if (max_channels) plan.max_channels = *max_channels;
        if (repetitions) plan.repetitions = *repetitions;

        fs::path out(out_dir);
        if (csv || svg || log_commands) fs::create_directories(out);

        std::mutex log_mutex;
        if (log_commands) {
            opts.on_channel = [&](const ChannelSim& sim, std::size_t point, std::uint32_t rep,
                                  std::uint32_t ch) {
                std::ostringstream name;
                name << plan.name << "-p" << point << "-r" << rep << "-c" << ch << ".cmdlog.csv";
                std::ostringstream text;
                write_command_log_csv(text, sim.dram().log());
                std::lock_guard lock(log_mutex);
                write_file(out / name.str(), text.str());
            };
        }

        ResultSet results = run_plan(plan, opts);
        if (!quiet) std::cout << summary_table(results);
        if (csv) {
            std::ostringstream text;
            write_csv(text, results);
            write_file(out / (plan.name + ".csv"), text.str());
        }
        if (svg)
            for (const auto& chart : render_charts(results))
                write_file(out / (chart.name + ".svg"), chart.svg);

        if (auto errors = results.data_errors(); errors > 0) {
            std::cerr << "ddr4bench: " << errors << " data errors\n";
            return 1;
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "ddr4bench: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ddr4bench: " << e.what() << '\n';
        return 2;
    }
}
