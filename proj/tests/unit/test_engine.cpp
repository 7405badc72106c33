#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mdyn/engine.hpp"

using namespace mdyn;

TEST_CASE("initial configurations") {
  const Graph g = build_path_with_frozen_boundary(4, 1.0, 0.0);
  const auto u = init_uniform(g, 3);
  CHECK(u.mode == OpinionMode::Real);
  CHECK(u.values[0] == 1.0);
  CHECK(u.values[5] == 0.0);
  CHECK(u == init_uniform(g, 3));
  CHECK_FALSE(u == init_uniform(g, 4));
  const auto b = init_bernoulli(g, 0.3, 3);
  CHECK(b == threshold_project(u, 0.3));
  for (double v : b.values) CHECK((v == 0.0 || v == 1.0));
  OpinionConfig bad{{0.5, 2.0}, OpinionMode::Real};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  OpinionConfig bad_bin{{0.5}, OpinionMode::Binary};
  CHECK_THROWS_AS(bad_bin.validate(), std::invalid_argument);
}

TEST_CASE("trajectory lookups") {
  OpinionConfig init{{0.2, 0.8}, OpinionMode::Real};
  std::vector<Flip> flips = {{1.0, 0, 0.2, 0.8}, {2.0, 1, 0.8, 0.2}, {3.0, 0, 0.8, 0.5}};
  const Trajectory tr(init, flips, 4.0, 5);
  CHECK(tr.value_at(0, 0.5) == 0.2);
  CHECK(tr.value_at(0, 1.0) == 0.8);
  CHECK(tr.value_at(0, 3.5) == 0.5);
  CHECK(tr.value_at(1, 4.0) == 0.2);
  CHECK(tr.flip_count(0) == 2);
  CHECK(tr.last_flip_time(0) == 3.0);
  CHECK(tr.last_flip_time(1) == 2.0);
  CHECK(tr.final_config().values == std::vector<double>{0.5, 0.2});
  CHECK_THROWS((void)tr.value_at(0, 4.5));
  CHECK_THROWS((void)tr.value_at(0, -0.1));
}

TEST_CASE("run rejects mismatched inputs") {
  const Graph g = build_cycle(5);
  const auto log = sample_event_log(g, 1.0, 1);
  CHECK_THROWS_AS(run(g, RuleKind::Majority, init_uniform(g, 1), log), std::invalid_argument);
  CHECK_THROWS_AS(run(g, RuleKind::Median, init_bernoulli(g, 0.5, 1), log), std::invalid_argument);
  CHECK_THROWS_AS(run(g, RuleKind::Median, init_uniform(build_cycle(6), 1), log), std::invalid_argument);
  CHECK_THROWS_AS(run(build_cycle(6), RuleKind::Median, init_uniform(build_cycle(6), 1), log),
                  std::invalid_argument);
}

TEST_CASE("streaming simulation reproduces the batch run") {
  for (RuleKind rule : {RuleKind::Median, RuleKind::MedianCoins, RuleKind::Majority, RuleKind::ZTGD}) {
    for (const Graph& g : {build_torus(6, 2), build_complete(6), build_cycle(9)}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const double horizon = 6.0;
        const auto init = is_binary(rule) ? init_bernoulli(g, 0.45, seed) : init_uniform(g, seed);
        const auto tr = run(g, rule, init, sample_event_log(g, horizon, seed + 100));
        Simulation sim(g, rule, init, seed + 100, horizon);
        std::vector<Flip> seen;
        sim.advance_to(2.0, [&](const Flip& f, std::span<const double>) { seen.push_back(f); });
        CHECK(std::vector<double>(sim.state().begin(), sim.state().end()) == tr.config_at(2.0).values);
        sim.advance_to(horizon, [&](const Flip& f, std::span<const double>) { seen.push_back(f); });
        CHECK(seen == tr.flips());
        CHECK(std::vector<double>(sim.state().begin(), sim.state().end()) == tr.final_config().values);
      }
    }
  }
}

TEST_CASE("majority on a cycle fixes after the first ring") {
  const Graph g = build_cycle(30);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto tr = run(g, RuleKind::Majority, init_bernoulli(g, 0.5, seed), sample_event_log(g, 10.0, seed));
    for (Vertex x = 0; x < 30; ++x) CHECK(tr.flip_count(x) <= 1);
  }
}

TEST_CASE("thresholded median coins is ztgd with complemented coins") {
  // The lower middle value lies below p exactly when the indicator tie
  // resolves to one, so coin c for the real process is coin 1 - c for ZTGD.
  const Graph g = build_torus(6, 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto log = sample_event_log(g, 5.0, seed);
    EventLog flipped = log;
    for (auto& e : flipped.events) e.coin = static_cast<std::uint8_t>(1 - e.coin);
    const auto eta0 = init_uniform(g, seed + 7);
    const auto real = run(g, RuleKind::MedianCoins, eta0, log);
    for (double p : {0.3, 0.5, 0.7}) {
      const auto bin = run(g, RuleKind::ZTGD, threshold_project(eta0, p), flipped);
      for (double t : {1.0, 2.5, 5.0}) {
        CHECK(threshold_project(real.config_at(t), p).values == bin.config_at(t).values);
      }
    }
  }
}

TEST_CASE("sequential runs") {
  const Graph g = build_cycle(4);
  OpinionConfig init{{1, 0, 0, 1}, OpinionMode::Binary};
  const std::vector<Vertex> schedule = {1, 0};
  const auto steps = run_sequential(g, schedule, init);
  REQUIRE(steps.size() == 3);
  CHECK(steps[0] == init);
  // Vertex 1 sees {1, 0, 0}: stays 0. Vertex 0 sees {1, 1, 0}: stays 1.
  CHECK(steps[1].values == std::vector<double>{1, 0, 0, 1});
  const std::vector<Vertex> s2 = {2};
  // Vertex 2 sees neighbors {0, 1}, a tie; the coin decides.
  const std::vector<std::uint8_t> one = {1};
  const auto z = run_sequential(g, s2, init, TieBreak::Coins, one);
  CHECK(z[1].values[2] == 1.0);
  CHECK_THROWS(run_sequential(g, s2, init, TieBreak::Coins, {}));
}

TEST_CASE("absorption stops the streaming run early") {
  const Graph g = build_complete(5);
  Simulation sim(g, RuleKind::Median, init_uniform(g, 1), 2, 1e6);
  sim.advance_to(1e6);
  CHECK(sim.absorbed());
  CHECK(sim.rings() < 1000);
}
