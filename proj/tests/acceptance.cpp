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
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any of them fails.

#include "cli.hpp"
#include "pmt/error.hpp"
#include "pmt/gpu.hpp"
#include "pmt/powercap.hpp"
#include "pmt/sampler.hpp"
#include "pmt/sensor.hpp"
#include "pmt/state.hpp"
#include "pmt/trace.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/scripted_gpu.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool within(double value, double lo, double hi) { return value >= lo && value <= hi; }

Outcome constant_power() {
  const auto t0 = Clock::now();
  auto sensor = pmt::create_sensor("synthetic", 0, {{"power_watts", "30"}});
  const auto start = sensor.read();
  std::this_thread::sleep_for(5s);
  const auto end = sensor.read();
  const auto m = sensor.measure(start, end);
  const bool ok = within(m.joules, 142.5, 157.5) && within(m.watts, 28.5, 31.5) && within(m.seconds, 4.9, 5.2);
  return {ok, fmt::format("joules={:.4f} watts={:.4f} seconds={:.4f} runtime_s={:.2f}", m.joules, m.watts, m.seconds,
                          seconds_since(t0))};
}

Outcome wraparound() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(0xacce97ULL);
  std::uniform_real_distribution<double> exponent(3.0, 11.0);
  std::uniform_int_distribution<int> length(1, 200);
  int exact = 0;
  int wraps = 0;
  constexpr int kTrajectories = 1000;
  for (int i = 0; i < kTrajectories; ++i) {
    const auto modulus = static_cast<std::uint64_t>(std::pow(10.0, exponent(rng)));
    pmt::testing::ModularCounter counter{modulus};
    const auto steps = pmt::testing::random_increments(rng, modulus, static_cast<std::size_t>(length(rng)));
    pmt::RawSample sample{counter.raw(), modulus, 0.0};
    auto acc = pmt::prime_accumulator(sample, pmt::CounterKind::CumulativeEnergy, 0.0);
    std::uint64_t reconstructed = 0;
    for (const auto inc : steps) {
      const auto before = counter.raw();
      counter.total += inc;
      sample.counter_uj = counter.raw();
      wraps += sample.counter_uj < before;
      reconstructed += pmt::powercap::wrap_corrected_delta(before, sample.counter_uj, modulus);
      acc = pmt::tick(acc, sample, pmt::CounterKind::CumulativeEnergy, 0.1);
    }
    const double joules = static_cast<double>(counter.total) * 1e-6;
    const bool accumulator_ok = std::abs(acc.accumulated_joules - joules) <= 1e-12 * std::max(joules, 1.0);
    exact += reconstructed == counter.total && accumulator_ok;
  }
  const double runtime = seconds_since(t0);
  return {exact == kTrajectories && runtime < 1.0,
          fmt::format("exact={}/{} wraps={} runtime_s={:.3f}", exact, kTrajectories, wraps, runtime)};
}

Outcome powercap_fixture() {
  pmt::testing::TempDir root;
  // Small range so the writer forces rollovers.
  constexpr std::uint64_t kRange = 5'000'000;
  std::uint64_t raw = 4'000'000;
  const auto domain = pmt::testing::make_rapl_domain(root.path(), "intel-rapl:0", "package-0", raw, kRange);
  const auto t0 = Clock::now();
  auto sensor = pmt::create_sensor("rapl", 0, {{"root", root.path().string()}});
  const auto start = sensor.read();

  // 12.0 J over 2 s in 20 unequal steps.
  std::vector<std::uint64_t> steps;
  for (int i = 0; i < 20; ++i) {
    steps.push_back(i % 2 == 0 ? 400'000 : 800'000);
  }
  std::uint64_t written = 0;
  for (const auto step : steps) {
    std::this_thread::sleep_for(100ms);
    raw = (raw + step) % kRange;
    written += step;
    pmt::testing::set_counter(domain, raw);
  }
  // Let the sampler pick up the last value.
  std::this_thread::sleep_for(sensor.interval() * 2 + 50ms);
  const auto end = sensor.read();
  const double joules = pmt::joules(start, end);
  const double expected = static_cast<double>(written) * 1e-6;
  return {expected == 12.0 && std::abs(joules - expected) <= 1e-6,
          fmt::format("written_j={:.6f} reported_j={:.9f} error_j={:.3g} runtime_s={:.2f}", expected, joules,
                      joules - expected, seconds_since(t0))};
}

Outcome dump_agreement() {
  pmt::testing::TempDir dir;
  const auto path = dir / "trace.txt";
  auto sensor = pmt::create_sensor("synthetic", 0, {{"power_watts", "45"}, {"interval_ms", "10"}});
  const auto start = sensor.read();
  sensor.start_dump(path);
  std::this_thread::sleep_for(4s);
  sensor.stop_dump();
  const auto end = sensor.read();

  const auto trace = pmt::read_trace(path);
  const auto summary = pmt::summarize(trace);
  const double paired = pmt::joules(start, end);
  const double relative = std::abs(summary.joules - paired) / paired;

  std::ifstream in(path);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) {
    lines += !line.empty() && line.front() != '#';
  }
  const double elapsed = pmt::seconds(start, end);
  const double expected_lines = elapsed / 0.010;
  return {relative <= 0.01 && std::abs(static_cast<double>(lines) - expected_lines) <= 2.0,
          fmt::format("dump_j={:.4f} paired_j={:.4f} rel_diff_pct={:.4f} records={} expected={:.1f}", summary.joules,
                      paired, relative * 100, lines, expected_lines)};
}

Outcome sampling_limits() {
  bool rejected = false;
  std::string what;
  try {
    pmt::create_sensor("synthetic", 0, {{"min_interval_ms", "500"}, {"interval_ms", "5"}});
  } catch (const pmt::IntervalTooSmall& e) {
    rejected = true;
    what = e.what();
  }

  auto calls = std::make_shared<pmt::testing::ReaderCalls>();
  bool accepted = false;
  try {
    auto gpu = pmt::gpu::create_gpu_sensor(pmt::testing::constant_reader(calls, 100'000), 0,
                                           pmt::SamplerConfig{pmt::gpu::kMinInterval, {}});
    std::this_thread::sleep_for(50ms);
    accepted = gpu.interval() == 10ms && gpu.read().timestamp > 0.0;
  } catch (const std::exception& e) {
    what += e.what();
  }
  return {rejected && accepted,
          fmt::format("5ms_on_500ms_rejected={} 10ms_on_10ms_accepted={} ({})", rejected, accepted, what)};
}

Outcome read_overhead() {
  const auto t0 = Clock::now();
  auto sensor = pmt::create_sensor("synthetic", 0, {{"power_watts", "30"}, {"interval_ms", "1"}});
  constexpr int kReads = 10'000;
  std::vector<double> latencies;
  latencies.reserve(kReads);
  for (int i = 0; i < kReads; ++i) {
    const auto before = Clock::now();
    const auto state = sensor.read();
    latencies.push_back(seconds_since(before));
    if (state.timestamp < 0.0) {
      return {false, "negative timestamp"};
    }
  }
  const double median = pmt::testing::median(latencies);
  const double runtime = seconds_since(t0);
  return {median < 1e-3 && runtime < 30.0, fmt::format("median_us={:.3f} runtime_s={:.3f}", median * 1e6, runtime)};
}

Outcome metric_arithmetic() {
  const pmt::Measurement m1{100.0, 50.0, 2.0, "x"};
  const double edp = pmt::energy_delay_product(m1);
  const pmt::Measurement m2{100.0, 50.0, 2.0, "x"};
  const double efficiency = pmt::flops_efficiency(m2, 1'000'000'000ULL);
  return {edp == 200.0 && efficiency == 0.01, fmt::format("edp={:.17g} gflops_per_watt={:.17g}", edp, efficiency)};
}

Outcome gpu_plateaus() {
  constexpr double kPeriod = 0.6;
  constexpr auto kInterval = 20ms;
  const double interval_s = std::chrono::duration<double>(kInterval).count();
  pmt::testing::TempDir dir;
  const auto path = dir / "gpu.txt";
  auto calls = std::make_shared<pmt::testing::ReaderCalls>();
  auto reader = std::make_unique<pmt::testing::ScriptedReader>(calls, 1, [](double t) -> std::uint32_t {
    return std::fmod(t, kPeriod) < kPeriod / 2 ? 15'000 : 260'000;
  });
  {
    auto sensor = pmt::gpu::create_gpu_sensor(std::move(reader), 0, pmt::SamplerConfig{kInterval, path});
    std::this_thread::sleep_for(1800ms);
    sensor.stop_dump();
  }

  std::ostringstream out, err;
  pmt::cli::AnalyzeOptions options;
  options.traces = {path};
  options.phases = true;
  if (pmt::cli::cmd_analyze(options, out, err) != 0) {
    return {false, "analyze failed: " + err.str()};
  }
  const std::string report = out.str();
  const bool extremes = report.find("min_watts=15.000000") != std::string::npos &&
                        report.find("max_watts=260.000000") != std::string::npos;

  const auto trace = pmt::read_trace(path);
  const auto summary = pmt::summarize(trace);
  const auto phases = pmt::detect_phases(trace);
  int aligned = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double level = i % 2 == 0 ? 15.0 : 260.0;
    bool ok = std::abs(phases[i].mean_watts - level) < 1e-9;
    if (i > 0) {
      const double lag = phases[i].begin - static_cast<double>(i) * kPeriod / 2;
      worst = std::max(worst, std::abs(lag));
      ok = ok && lag >= -0.005 && lag <= interval_s + 0.005;
    }
    aligned += ok;
  }
  const bool mean_between = summary.mean_watts > 15.0 && summary.mean_watts < 260.0;
  return {extremes && mean_between && phases.size() >= 5 && aligned == static_cast<int>(phases.size()),
          fmt::format("min_w={:.1f} max_w={:.1f} mean_w={:.1f} phases={} aligned={} worst_lag_ms={:.1f}",
                      summary.min_watts, summary.max_watts, summary.mean_watts, phases.size(), aligned,
                      worst * 1e3)};
}

Outcome cli_round_trip() {
  pmt::testing::TempDir dir;
  pmt::cli::RunOptions options;
  options.backends = {"synthetic"};
  options.backend_config["synthetic"]["power_watts"] = "25";
  options.interval_ms = 10;
  options.dump_path = dir / "run";
  options.command = {"sleep", "1"};
  std::ostringstream report, err;
  pmt::cli::RunReport result;
  const int code = pmt::cli::cmd_run(options, report, err, &result);
  if (code != 0 || result.measurements.size() != 1 || result.dump_paths.size() != 1) {
    return {false, fmt::format("run exited {}: {}", code, err.str())};
  }

  std::ostringstream analyzed;
  pmt::cli::AnalyzeOptions analyze;
  analyze.traces = {result.dump_paths.front()};
  if (pmt::cli::cmd_analyze(analyze, analyzed, err) != 0) {
    return {false, "analyze failed: " + err.str()};
  }
  const std::string text = analyzed.str();
  const auto at = text.find(" joules=");
  const double analyze_joules = at == std::string::npos ? -1.0 : std::stod(text.substr(at + 8));
  const double run_joules = result.measurements.front().joules;
  const double relative = std::abs(analyze_joules - run_joules) / run_joules;

  pmt::cli::RunOptions failing = options;
  failing.dump_path.reset();
  failing.command = {"sh", "-c", "exit 3"};
  std::ostringstream sink;
  const int propagated = pmt::cli::cmd_run(failing, sink, sink);

  return {relative <= 0.05 && propagated == 3,
          fmt::format("run_j={:.4f} analyze_j={:.4f} rel_diff_pct={:.3f} exit_codes={},{}", run_joules, analyze_joules,
                      relative * 100, code, propagated)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "constant-power integration", constant_power},
      {2, "wraparound oracle", wraparound},
      {3, "powercap fixture", powercap_fixture},
      {4, "dump/measure agreement", dump_agreement},
      {5, "sampling limits", sampling_limits},
      {6, "read overhead", read_overhead},
      {7, "metric arithmetic", metric_arithmetic},
      {8, "idle/burst plateaus", gpu_plateaus},
      {9, "cli round trip", cli_round_trip},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("exception: {}", e.what())};
    }
    failures += !outcome.pass;
    fmt::print("{} criterion {}: {} ({})\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name, outcome.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
