#include <doctest.h>

#include <cmath>
#include <set>

#include "mdyn/graph.hpp"
#include "mdyn/randomness.hpp"

using namespace mdyn;

TEST_CASE("derived seeds are distinct and deterministic") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a) {
    for (std::uint64_t b = 1; b <= 4; ++b) seen.insert(derive_seed(7, a, b));
  }
  CHECK(seen.size() == 200);
  static_assert(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("uniform and exponential draws") {
  CounterRng rng(12345);
  const int n = 200000;
  double sum_u = 0.0;
  double sum_e = 0.0;
  int below_one = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum_u += u;
    const double e = rng.exponential();
    REQUIRE(e > 0.0);
    sum_e += e;
    below_one += e <= 1.0;
  }
  CHECK(std::fabs(sum_u / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::fabs(sum_e / n - 1.0) < 4.0 / std::sqrt(n));
  const double cdf = 1.0 - std::exp(-1.0);
  CHECK(std::fabs(static_cast<double>(below_one) / n - cdf) < 4.0 * std::sqrt(cdf * (1 - cdf) / n));
  CHECK(rng.draws() == 2 * n);
}

TEST_CASE("event log: sorted, within horizon, Poisson counts") {
  const Graph g = build_cycle(10);
  const double horizon = 3.0;
  double total = 0.0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    const auto log = sample_event_log(g, horizon, static_cast<std::uint64_t>(s));
    for (std::size_t i = 1; i < log.events.size(); ++i) REQUIRE(log.events[i - 1].time <= log.events[i].time);
    for (const auto& e : log.events) {
      REQUIRE(e.time > 0.0);
      REQUIRE(e.time <= horizon);
      REQUIRE(e.coin <= 1);
    }
    total += static_cast<double>(log.events.size());
  }
  // Mean number of rings is n * horizon; variance equals mean.
  const double mean = total / seeds;
  CHECK(std::fabs(mean - 30.0) < 4.0 * std::sqrt(30.0 / seeds));
}

TEST_CASE("event log is reproducible and frozen vertices never ring") {
  const Graph g = build_path_with_frozen_boundary(5, 1.0, 0.0);
  const auto a = sample_event_log(g, 10.0, 99);
  const auto b = sample_event_log(g, 10.0, 99);
  CHECK(a == b);
  for (const auto& e : a.events) CHECK_FALSE(g.is_frozen(e.vertex));
  CHECK_FALSE(first_ring_time(a, 0));
  CHECK_THROWS(first_ring_time(a, 99));
  CHECK_THROWS(sample_event_log(g, INFINITY, 1));
}

TEST_CASE("clock stream matches materialized log") {
  const Graph g = build_torus(5, 2);
  const auto log = sample_event_log(g, 4.0, 5);
  ClockStream stream(g, 4.0, 5);
  std::size_t i = 0;
  while (auto e = stream.next()) {
    REQUIRE(i < log.events.size());
    CHECK(*e == log.events[i]);
    ++i;
  }
  CHECK(i == log.events.size());
}

TEST_CASE("first ring time is Exp(1)") {
  const Graph g = build_complete(3);
  int rang = 0;
  const int n = 20000;
  for (int s = 0; s < n; ++s) {
    const auto log = sample_event_log(g, 0.5, static_cast<std::uint64_t>(s) + 1000000);
    rang += first_ring_time(log, 1).has_value();
  }
  const double p = 1.0 - std::exp(-0.5);
  CHECK(std::fabs(static_cast<double>(rang) / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}
