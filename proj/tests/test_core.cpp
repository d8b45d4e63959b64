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
#include "pmt/error.hpp"
#include "pmt/sensor.hpp"
#include "pmt/state.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>
#include <vector>

using namespace std::chrono_literals;
using pmt::State;
using pmt::testing::TempDir;

namespace {

State at(double t, double j) {
  State s;
  s.timestamp = t;
  s.joules_total = j;
  return s;
}

bool has_backend(const std::vector<pmt::BackendInfo>& infos, const std::string& name, bool available) {
  return std::any_of(infos.begin(), infos.end(), [&](const pmt::BackendInfo& i) {
    return i.descriptor.backend_name == name && i.available == available;
  });
}

void check_state_invariants(const State& s) {
  REQUIRE(s.joules_per_channel.size() == s.channel_names.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < s.joules_per_channel.size(); ++i) {
    CHECK(s.joules_per_channel[i] >= 0.0);
    if (s.channel_in_total[i]) {
      sum += s.joules_per_channel[i];
    }
  }
  CHECK(s.joules_total >= 0.0);
  CHECK(std::abs(s.joules_total - sum) <= 1e-9 * std::max(1.0, std::abs(sum)));
}

}  // namespace

TEST_CASE("joules, seconds and watts over a pair of states") {
  CHECK(pmt::joules(at(1, 5), at(1, 5)) == 0.0);
  CHECK(pmt::joules(at(0, 0), at(1, 100)) == 100.0);
  CHECK(pmt::joules(at(0, 12.5), at(1, 13.0)) == 0.5);

  CHECK(pmt::seconds(at(3, 0), at(3, 0)) == 0.0);
  CHECK(pmt::seconds(at(1.0, 0), at(6.0, 0)) == 5.0);
  CHECK_THROWS_AS(pmt::seconds(at(2.0, 0), at(1.0, 0)), pmt::NegativeInterval);
  CHECK_THROWS_AS(pmt::joules(at(2.0, 0), at(1.0, 0)), pmt::NegativeInterval);

  CHECK(pmt::watts(at(0, 0), at(5, 100)) == 20.0);
  CHECK(pmt::watts(at(0, 7), at(5, 7)) == 0.0);
  CHECK(pmt::watts(at(4, 7), at(4, 7)) == 0.0);
  CHECK_THROWS_AS(pmt::watts(at(2.0, 0), at(1.0, 0)), pmt::NegativeInterval);
}

TEST_CASE("energy-delay product and flops efficiency") {
  CHECK(pmt::energy_delay_product({100.0, 50.0, 2.0, ""}) == 200.0);
  CHECK(pmt::energy_delay_product({0.0, 0.0, 42.0, ""}) == 0.0);
  CHECK(pmt::energy_delay_product({300.0, 30.0, 10.0, ""}) == 3000.0);

  CHECK(pmt::flops_efficiency({100.0, 50.0, 2.0, ""}, 1'000'000'000ULL) == 0.01);
  CHECK(pmt::flops_efficiency({100.0, 50.0, 2.0, ""}, 0) == 0.0);
  CHECK(pmt::flops_efficiency({100.0, 100.0, 1.0, ""}, 2'000'000'000'000ULL) == 20.0);
  CHECK_THROWS_AS(pmt::flops_efficiency({0.0, 0.0, 1.0, ""}, 10), pmt::DegenerateMeasurement);
  CHECK_THROWS_AS(pmt::flops_efficiency({0.0, 10.0, 0.0, ""}, 10), pmt::DegenerateMeasurement);
}

TEST_CASE("metric algebra over random states") {
  auto& rng = pmt::testing::rng();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> grid(0, 1LL << 40);
  for (int i = 0; i < 2000; ++i) {
    // On a dyadic grid differences are exact, so additivity must hold bit for bit.
    std::vector<double> t{grid(rng) / 1024.0, grid(rng) / 1024.0, grid(rng) / 1024.0};
    std::vector<double> j{grid(rng) / 1024.0, grid(rng) / 1024.0, grid(rng) / 1024.0};
    std::sort(t.begin(), t.end());
    std::sort(j.begin(), j.end());
    const State a = at(t[0], j[0]), b = at(t[1], j[1]), c = at(t[2], j[2]);
    CHECK(pmt::joules(a, c) == pmt::joules(a, b) + pmt::joules(b, c));

    // Arbitrary reals: equal up to rounding.
    const State x = at(unit(rng), unit(rng) * 1e3);
    const State y = at(x.timestamp + unit(rng) * 10 + 1e-6, x.joules_total + unit(rng) * 1e3);
    const State z = at(y.timestamp + unit(rng) * 10, y.joules_total + unit(rng) * 1e3);
    CHECK(pmt::joules(x, z) == doctest::Approx(pmt::joules(x, y) + pmt::joules(y, z)).epsilon(1e-12));

    const double s = pmt::seconds(x, y);
    CHECK(pmt::watts(x, y) * s == doctest::Approx(pmt::joules(x, y)).epsilon(1e-9));
    const auto m = pmt::measure(x, y, "r");
    CHECK(m.watts * m.seconds == doctest::Approx(m.joules).epsilon(1e-9));
  }
}

TEST_CASE("create_sensor resolves backends from the registry") {
  SUBCASE("synthetic") {
    auto sensor = pmt::create_sensor("synthetic", 0, {{"power_watts", "30"}});
    CHECK(sensor.descriptor().counter_kind == pmt::CounterKind::InstantaneousPower);
    CHECK(sensor.descriptor().backend_name == "synthetic");
  }
  SUBCASE("tagged synthetic instances keep their name") {
    auto sensor = pmt::create_sensor("synthetic-a", 0, {{"power_watts", "1"}});
    CHECK(sensor.descriptor().backend_name == "synthetic-a");
  }
  SUBCASE("rapl over a fixture tree") {
    TempDir root;
    pmt::testing::make_rapl_domain(root.path(), "intel-rapl:0", "package-0", 1000);
    auto sensor = pmt::create_sensor("rapl", 0, {{"root", root.path().string()}});
    CHECK(sensor.descriptor().channel_names == std::vector<std::string>{"package-0"});
    CHECK(sensor.descriptor().counter_kind == pmt::CounterKind::CumulativeEnergy);
  }
  SUBCASE("rapl through PMT_SYSFS_ROOT") {
    TempDir sys;
    pmt::testing::make_rapl_domain(sys / "class/powercap", "intel-rapl:0", "package-0", 1000);
    pmt::testing::ScopedEnv env("PMT_SYSFS_ROOT", sys.path().string());
    auto sensor = pmt::create_sensor("rapl");
    CHECK(sensor.descriptor().channel_names == std::vector<std::string>{"package-0"});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(pmt::create_sensor("nope"), pmt::UnknownBackend);
    CHECK_THROWS_AS(pmt::create_sensor("synthetic-"), pmt::UnknownBackend);
    TempDir empty;
    CHECK_THROWS_AS(pmt::create_sensor("rapl", 0, {{"root", empty.path().string()}}), pmt::DeviceUnavailable);
    CHECK_THROWS_AS(pmt::create_sensor("hwmon", 0, {{"root", empty.path().string()}}), pmt::DeviceUnavailable);
    CHECK_THROWS_AS(pmt::create_sensor("synthetic", 1), pmt::DeviceUnavailable);
    CHECK_THROWS_AS(pmt::create_sensor("synthetic", 0, {{"bogus", "1"}}), pmt::InvalidConfig);
    CHECK_THROWS_AS(pmt::create_sensor("synthetic", 0, {{"interval_ms", "ten"}}), pmt::InvalidConfig);
    CHECK_THROWS_AS(pmt::create_sensor("synthetic", 0, {{"min_interval_ms", "500"}, {"interval_ms", "5"}}),
                    pmt::InvalidConfig);
    CHECK_THROWS_AS(pmt::create_sensor("synthetic", 0, {{"power_watts", "-3"}}), pmt::InvalidConfig);
  }
}

TEST_CASE("read returns zero-based cumulative states") {
  auto sensor = pmt::create_sensor("synthetic", 0, {{"power_watts", "30"}, {"interval_ms", "10"}});
  const State first = sensor.read();
  check_state_invariants(first);
  CHECK(first.joules_total <= 30.0 * 0.010 + 1e-9);
  CHECK(first.timestamp < 0.5);

  std::this_thread::sleep_for(1500ms);
  const State second = sensor.read();
  check_state_invariants(second);
  const double elapsed = pmt::seconds(first, second);
  CHECK(elapsed == doctest::Approx(1.5).epsilon(0.1));
  // Constant power: energy is P times the elapsed time, up to two sampling intervals.
  CHECK(std::abs(pmt::joules(first, second) - 30.0 * elapsed) <= 2 * 0.010 * 30.0);
}

TEST_CASE("read converts RAPL microjoules to joules") {
  TempDir root;
  const auto domain = pmt::testing::make_rapl_domain(root.path(), "intel-rapl:0", "package-0", 1'000'000);
  auto sensor = pmt::create_sensor("rapl", 0, {{"root", root.path().string()}});
  const State start = sensor.read();
  pmt::testing::set_counter(domain, 6'000'000);
  std::this_thread::sleep_for(250ms);
  const State end = sensor.read();
  CHECK(pmt::joules(start, end) == doctest::Approx(5.0).epsilon(1e-12));
  check_state_invariants(end);
}

TEST_CASE("states outlive their sensor") {
  State kept;
  {
    auto sensor = pmt::create_sensor("synthetic", 0, {{"power_watts", "5"}});
    std::this_thread::sleep_for(30ms);
    kept = sensor.read();
  }
  CHECK(kept.timestamp > 0.0);
  CHECK(kept.joules_total > 0.0);
  CHECK(kept.channel_names.size() == 1);
}

TEST_CASE("list_backends reports availability") {
  const auto defaults = pmt::list_backends();
  CHECK(has_backend(defaults, "synthetic", true));
  CHECK(defaults.size() == pmt::registered_backends().size());

  TempDir root;
  pmt::testing::make_rapl_domain(root.path(), "intel-rapl:0", "package-0", 1000);
  const auto with_tree = pmt::list_backends({{"root", root.path().string()}});
  CHECK(has_backend(with_tree, "rapl", true));

  TempDir empty;
  const auto without = pmt::list_backends({{"root", empty.path().string()}});
  CHECK(has_backend(without, "rapl", false));

  // Names are unique and every descriptor honors the 1 ms floor.
  auto names = pmt::registered_backends();
  std::sort(names.begin(), names.end());
  CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
  for (const auto& info : defaults) {
    CHECK(info.descriptor.min_interval >= 1ms);
  }
}

TEST_CASE("concurrent reads observe a consistent, monotone sequence") {
  // A fast square wave so power changes between almost every pair of reads.
  auto sensor = pmt::create_sensor(
      "synthetic", 0,
      {{"shape", "square"}, {"base_watts", "10"}, {"peak_watts", "90"}, {"period_s", "0.004"}, {"interval_ms", "1"}});
  constexpr int kThreads = 4;
  constexpr int kReads = 3000;
  std::vector<std::vector<State>> seen(kThreads);
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&, t] {
      seen[t].reserve(kReads);
      for (int i = 0; i < kReads; ++i) {
        seen[t].push_back(sensor.read());
      }
    });
  }
  for (auto& th : threads) {
    th.join();
  }
  std::vector<State> all;
  for (const auto& v : seen) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      REQUIRE(v[i].timestamp >= v[i - 1].timestamp);
      REQUIRE(v[i].joules_total >= v[i - 1].joules_total);
    }
    all.insert(all.end(), v.begin(), v.end());
  }
  std::sort(all.begin(), all.end(), [](const State& a, const State& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 1; i < all.size(); ++i) {
    REQUIRE(all[i].joules_total >= all[i - 1].joules_total);
  }
  check_state_invariants(all.back());
}

TEST_CASE("sensors on distinct backends do not influence each other") {
  auto low = pmt::create_sensor("synthetic-low", 0, {{"power_watts", "10"}});
  auto high = pmt::create_sensor("synthetic-high", 0, {{"power_watts", "50"}});
  const State low0 = low.read();
  const State high0 = high.read();
  for (int i = 0; i < 20; ++i) {
    (void)low.read();
    (void)high.read();
    std::this_thread::sleep_for(5ms);
  }
  const State low1 = low.read();
  const State high1 = high.read();
  // Running alone, a constant synthetic sensor reports exactly its power.
  CHECK(pmt::watts(low0, low1) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(pmt::watts(high0, high1) == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("moved-from sensors report SensorStopped") {
  auto a = pmt::create_sensor("synthetic", 0, {{"power_watts", "1"}});
  auto b = std::move(a);
  CHECK_NOTHROW((void)b.read());
  CHECK_THROWS_AS((void)a.read(), pmt::SensorStopped);  // NOLINT(bugprone-use-after-move)
}
