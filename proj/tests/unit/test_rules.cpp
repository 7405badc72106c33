#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mdyn/randomness.hpp"
#include "mdyn/rules.hpp"

using namespace mdyn;

namespace {

std::vector<double> indicator(const std::vector<double>& pool, double p) {
  std::vector<double> out;
  for (double v : pool) out.push_back(v <= p ? 1.0 : 0.0);
  return out;
}

}  // namespace

TEST_CASE("median of small pools") {
  const std::vector<double> pool = {0.9, 0.1, 0.5, 0.3, 0.7};
  CHECK(median_update(pool) == 0.5);
  const std::vector<double> one = {0.25};
  CHECK(median_update(one) == 0.25);
  const std::vector<double> even = {0.1, 0.9};
  CHECK_THROWS_AS((void)median_update(even), std::invalid_argument);
}

TEST_CASE("median coins picks a middle value") {
  const std::vector<double> pool = {0.9, 0.1, 0.5, 0.3};
  CHECK(median_coins_update(pool, 0) == 0.3);
  CHECK(median_coins_update(pool, 1) == 0.5);
  const std::vector<double> odd = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS((void)median_coins_update(odd, 0), std::invalid_argument);
}

TEST_CASE("majority and ztgd") {
  const std::vector<double> a = {1, 1, 0};
  const std::vector<double> b = {0, 1, 0};
  CHECK(majority_update(a) == 1.0);
  CHECK(majority_update(b) == 0.0);
  const std::vector<double> bad = {0.5, 1, 0};
  CHECK_THROWS_AS((void)majority_update(bad), std::invalid_argument);

  const std::vector<double> tie = {1, 0, 1, 0};
  CHECK(ztgd_update(tie, 0.0, 0) == 0.0);
  CHECK(ztgd_update(tie, 0.0, 1) == 1.0);
  const std::vector<double> strict = {1, 1, 1, 0};
  CHECK(ztgd_update(strict, 0.0, 0) == 1.0);
}

TEST_CASE("rule names round trip") {
  for (RuleKind r : {RuleKind::Median, RuleKind::MedianCoins, RuleKind::Majority, RuleKind::ZTGD}) {
    CHECK(parse_rule(to_string(r)) == r);
  }
  CHECK_FALSE(parse_rule("voter"));
  CHECK(is_binary(RuleKind::Majority));
  CHECK_FALSE(is_binary(RuleKind::MedianCoins));
  CHECK(uses_coins(RuleKind::ZTGD));
}

TEST_CASE("thresholding commutes with the median") {
  // 1{median <= p} equals the majority of 1{pool <= p}, for every pool and p.
  CounterRng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t size = 1 + 2 * (rng.next() % 5);
    std::vector<double> pool(size);
    // Rational grid with many ties.
    for (auto& v : pool) v = static_cast<double>(rng.next() % 9) / 8.0;
    for (int k = 0; k <= 8; ++k) {
      const double p = k / 8.0;
      CHECK((median_update(pool) <= p ? 1.0 : 0.0) == majority_update(indicator(pool, p)));
    }
  }
}

TEST_CASE("median is monotone and permutation invariant") {
  CounterRng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> pool(5);
    for (auto& v : pool) v = rng.uniform();
    const double m = median_update(pool);
    std::vector<double> bumped = pool;
    for (auto& v : bumped) v = std::min(1.0, v + rng.uniform() * 0.1);
    CHECK(median_update(bumped) >= m);
    std::vector<double> perm = pool;
    std::reverse(perm.begin(), perm.end());
    std::rotate(perm.begin(), perm.begin() + 2, perm.end());
    CHECK(median_update(perm) == m);
  }
}

TEST_CASE("median minimizes absolute deviation") {
  CounterRng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> pool(7);
    for (auto& v : pool) v = rng.uniform();
    auto cost = [&](double c) {
      double s = 0.0;
      for (double v : pool) s += std::fabs(v - c);
      return s;
    };
    const double best = cost(median_update(pool));
    for (int k = 0; k <= 100; ++k) CHECK(best <= cost(k / 100.0) + 1e-12);
    // Either middle value minimizes for an even pool too.
    std::vector<double> even(pool.begin(), pool.begin() + 6);
    auto cost_even = [&](double c) {
      double s = 0.0;
      for (double v : even) s += std::fabs(v - c);
      return s;
    };
    CHECK(cost_even(median_coins_update(even, 0)) == doctest::Approx(cost_even(median_coins_update(even, 1))));
  }
}
