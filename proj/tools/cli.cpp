/*
 * Copyright (C) 2026 The PMT Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "cli.hpp"

#include "pmt/error.hpp"
#include "pmt/trace.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <iostream>
#include <set>
#include <string_view>

extern char** environ;

namespace pmt::cli {

std::string default_backend() {
  const char* env = std::getenv("PMT_DEFAULT_BACKEND");
  return env != nullptr && *env != '\0' ? env : "rapl";
}

int cmd_list(std::ostream& out) {
  for (const auto& info : list_backends()) {
    const auto& d = info.descriptor;
    out << fmt::format("{} {} devices={} min_interval_ms={} kind={}", d.backend_name,
                       info.available ? "available" : "unavailable", info.device_count, d.min_interval.count(),
                       to_string(d.counter_kind));
    if (!info.available && !info.detail.empty()) {
      out << " reason=\"" << info.detail << '"';
    }
    out << '\n';
  }
  return 0;
}

std::optional<int> run_child(const std::vector<std::string>& command) {
  if (command.empty()) {
    return std::nullopt;
  }
  std::vector<char*> argv;
  argv.reserve(command.size() + 1);
  for (const auto& arg : command) {
    argv.push_back(const_cast<char*>(arg.c_str()));
  }
  argv.push_back(nullptr);

  pid_t pid = 0;
  if (::posix_spawnp(&pid, argv[0], nullptr, nullptr, argv.data(), environ) != 0) {
    return std::nullopt;
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      return std::nullopt;
    }
  }
  if (WIFEXITED(status)) {
    return WEXITSTATUS(status);
  }
  if (WIFSIGNALED(status)) {
    return 128 + WTERMSIG(status);
  }
  return 1;
}

int cmd_run(const RunOptions& options, std::ostream& report, std::ostream& err, RunReport* result) {
  if (options.command.empty()) {
    err << "error: no command given\n";
    return kExitBackendError;
  }
  std::vector<std::string> backends = options.backends;
  if (backends.empty()) {
    backends.push_back(default_backend());
  }
  if (std::set<std::string>(backends.begin(), backends.end()).size() != backends.size()) {
    err << "error: a backend was requested twice; use synthetic-<tag> names for several synthetic sensors\n";
    return kExitBackendError;
  }

  RunReport run;
  std::vector<Sensor> sensors;
  std::vector<State> starts;
  try {
    for (const auto& name : backends) {
      Config config;
      if (auto it = options.backend_config.find(name); it != options.backend_config.end()) {
        config = it->second;
      }
      if (options.interval_ms != 0) {
        config["interval_ms"] = std::to_string(options.interval_ms);
      }
      if (options.dump_path) {
        auto path = options.dump_path->string() + "." + name;
        config["dump_path"] = path;
        run.dump_paths.emplace_back(std::move(path));
      }
      sensors.push_back(create_sensor(name, options.device, config));
    }
    for (const auto& sensor : sensors) {
      starts.push_back(sensor.read());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBackendError;
  }

  const auto status = run_child(options.command);
  if (!status) {
    err << fmt::format("error: cannot run '{}'\n", options.command.front());
    return kExitSpawnFailure;
  }
  run.exit_status = *status;

  int exit_code = run.exit_status;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    try {
      const State end = sensors[i].read();
      sensors[i].stop();
      if (sensors[i].dump_active()) {
        sensors[i].stop_dump();
      }
      Measurement m = sensors[i].measure(starts[i], end);
      m.backend_name = backends[i];
      report << fmt::format("{} {:.6f} J {:.6f} W {:.6f} s\n", m.backend_name, m.joules, m.watts, m.seconds);
      run.measurements.push_back(std::move(m));
    } catch (const Error& e) {
      err << fmt::format("error: {}: {}\n", backends[i], e.what());
      if (exit_code == 0) {
        exit_code = kExitBackendError;
      }
    }
  }
  if (result != nullptr) {
    *result = std::move(run);
  }
  return exit_code;
}

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
  if (options.traces.empty()) {
    err << "error: no trace files given\n";
    return 1;
  }
  std::vector<Trace> traces;
  std::vector<TraceSummary> summaries;
  std::vector<std::string> names;
  try {
    for (const auto& path : options.traces) {
      traces.push_back(read_trace(path));
      try {
        summaries.push_back(summarize(traces.back()));
      } catch (const EmptyTrace&) {
        throw EmptyTrace(fmt::format("{}: trace has no records", path.string()));
      }
      names.push_back(path.filename().string());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  // Traces recorded side by side: energies add up, the region lasts as long as the longest one.
  Measurement combined;
  combined.backend_name = "combined";
  for (const auto& s : summaries) {
    combined.joules += s.joules;
    combined.seconds = std::max(combined.seconds, s.duration);
  }
  combined.watts = combined.seconds > 0.0 ? combined.joules / combined.seconds : 0.0;

  auto efficiency = [&](const Measurement& m) -> std::string {
    if (!options.flop_count) {
      return {};
    }
    try {
      return fmt::format("{:.6g}", flops_efficiency(m, *options.flop_count));
    } catch (const DegenerateMeasurement&) {
      return "nan";
    }
  };

  if (options.csv) {
    out << "trace,backend,records,duration_s,joules,mean_watts,min_watts,max_watts,edp_js";
    out << (options.flop_count ? ",gflops_per_watt\r\n" : "\r\n");
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto& s = summaries[i];
      const Measurement m = to_measurement(s, traces[i].header.backend_name);
      out << fmt::format("{},{},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}", csv_field(names[i]),
                         csv_field(traces[i].header.backend_name), s.records, s.duration, s.joules, s.mean_watts,
                         s.min_watts, s.max_watts, energy_delay_product(m));
      if (options.flop_count) {
        out << ',' << efficiency(m);
      }
      out << "\r\n";
    }
    out << "\r\n" << stacked_csv(traces, names);
    return 0;
  }

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& s = summaries[i];
    const Measurement m = to_measurement(s, traces[i].header.backend_name);
    out << fmt::format("{} backend={} records={} duration_s={:.6f} joules={:.6f} mean_watts={:.6f} min_watts={:.6f} "
                       "max_watts={:.6f} edp_js={:.6f}",
                       names[i], traces[i].header.backend_name, s.records, s.duration, s.joules, s.mean_watts,
                       s.min_watts, s.max_watts, energy_delay_product(m));
    if (options.flop_count) {
      out << " gflops_per_watt=" << efficiency(m);
    }
    out << '\n';
    if (options.phases) {
      const auto phases = detect_phases(traces[i]);
      for (std::size_t p = 0; p < phases.size(); ++p) {
        out << fmt::format("  phase {} begin_s={:.6f} end_s={:.6f} mean_watts={:.6f} records={}\n", p,
                           phases[p].begin, phases[p].end, phases[p].mean_watts, phases[p].records);
      }
    }
  }
  out << fmt::format("combined joules={:.6f} seconds={:.6f} watts={:.6f} edp_js={:.6f}", combined.joules,
                     combined.seconds, combined.watts, energy_delay_product(combined));
  if (options.flop_count) {
    out << " gflops_per_watt=" << efficiency(combined);
  }
  out << '\n';
  return 0;
}

namespace {

// "<backend>.<key>=<value>"
bool parse_setting(const std::string& text, std::map<std::string, Config>& into) {
  const auto eq = text.find('=');
  const auto dot = text.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq || dot == 0 || dot + 1 == eq) {
    return false;
  }
  into[text.substr(0, dot)][text.substr(dot + 1, eq - dot - 1)] = text.substr(eq + 1);
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power and energy measurement toolkit", "pmt"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List backends and their availability");

  RunOptions run_options;
  std::string dump_path;
  std::optional<double> synthetic_watts;
  std::vector<std::string> settings;
  auto* run = app.add_subcommand("run", "Run a command and report its energy");
  run->add_option("--backend,-b", run_options.backends, "Backend to measure with (repeatable)")
      ->allow_extra_args(false);
  run->add_option("--device,-d", run_options.device, "Device index");
  run->add_option("--interval-ms,-i", run_options.interval_ms, "Sampling interval in milliseconds");
  run->add_option("--dump", dump_path, "Write a trace per backend to PATH.<backend>");
  run->add_option("--synthetic-watts", synthetic_watts, "Constant power of synthetic backends");
  run->add_option("--set", settings, "Backend option as BACKEND.KEY=VALUE (repeatable)")
      ->allow_extra_args(false);
  run->add_option("command", run_options.command, "Command to run, after --");

  AnalyzeOptions analyze_options;
  std::vector<std::string> trace_paths;
  std::uint64_t flops = 0;
  auto* analyze = app.add_subcommand("analyze", "Summarize dump-mode traces");
  analyze->add_option("traces", trace_paths, "Trace files")->required();
  auto* flops_option = analyze->add_option("--flops", flops, "Floating-point operations executed in the traced region");
  analyze->add_flag("--csv", analyze_options.csv, "Emit CSV");
  analyze->add_flag("--phases", analyze_options.phases, "List detected power plateaus");

  // Everything after the first "--" belongs to the child, flags included.
  std::vector<std::string> args;
  bool separated = false;
  for (int i = 1; i < argc; ++i) {
    if (!separated && std::string_view(argv[i]) == "--") {
      separated = true;
      continue;
    }
    (separated ? run_options.command : args).emplace_back(argv[i]);
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (list->parsed()) {
    return cmd_list(std::cout);
  }
  if (run->parsed()) {
    if (run_options.command.empty()) {
      std::cerr << "error: no command given; usage: pmt run [options] -- COMMAND [ARGS...]\n";
      return kExitBackendError;
    }
    if (!dump_path.empty()) {
      run_options.dump_path = dump_path;
    }
    for (const auto& s : settings) {
      if (!parse_setting(s, run_options.backend_config)) {
        std::cerr << fmt::format("error: --set expects BACKEND.KEY=VALUE, got '{}'\n", s);
        return kExitBackendError;
      }
    }
    if (run_options.backends.empty()) {
      run_options.backends.push_back(default_backend());
    }
    if (synthetic_watts) {
      const auto& names = run_options.backends;
      for (const auto& name : names) {
        if (name == "synthetic" || name.rfind("synthetic-", 0) == 0) {
          run_options.backend_config[name].try_emplace("power_watts", fmt::format("{}", *synthetic_watts));
        }
      }
    }
    return cmd_run(run_options, std::cerr, std::cerr);
  }
  if (analyze->parsed()) {
    analyze_options.traces.assign(trace_paths.begin(), trace_paths.end());
    if (flops_option->count() > 0) {
      analyze_options.flop_count = flops;
    }
    return cmd_analyze(analyze_options, std::cout, std::cerr);
  }
  return 1;
}

}  // namespace pmt::cli
