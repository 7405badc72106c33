#include "mdyn/rules.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace mdyn {

std::string_view to_string(RuleKind r) {
  switch (r) {
    case RuleKind::Median: return "median";
    case RuleKind::MedianCoins: return "median_coins";
    case RuleKind::Majority: return "majority";
    case RuleKind::ZTGD: return "ztgd";
  }
  return "unknown";
}

std::optional<RuleKind> parse_rule(std::string_view name) {
  for (auto r : {RuleKind::Median, RuleKind::MedianCoins, RuleKind::Majority, RuleKind::ZTGD}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

namespace detail {

double select_median(std::span<double> pool) {
  auto mid = pool.begin() + static_cast<std::ptrdiff_t>(pool.size() / 2);
  std::nth_element(pool.begin(), mid, pool.end());
  return *mid;
}

double select_middle(std::span<double> pool, std::uint8_t coin) {
  const auto half = static_cast<std::ptrdiff_t>(pool.size() / 2);
  auto upper = pool.begin() + half;
  std::nth_element(pool.begin(), upper, pool.end());
  if (coin != 0) return *upper;
  // Everything left of `upper` is <= it; the lower middle is their maximum.
  return *std::max_element(pool.begin(), upper);
}

}  // namespace detail

namespace {

void require_binary(std::span<const double> pool) {
  for (double v : pool) {
    if (v != 0.0 && v != 1.0) throw std::invalid_argument("binary rule: pool entry is not 0 or 1");
  }
}

}  // namespace

double median_update(std::span<const double> pool) {
  if (pool.size() % 2 == 0) throw std::invalid_argument("median_update: pool size must be odd");
  std::vector<double> scratch(pool.begin(), pool.end());
  return detail::select_median(scratch);
}

double median_coins_update(std::span<const double> pool, std::uint8_t coin) {
  if (pool.empty() || pool.size() % 2 != 0) {
    throw std::invalid_argument("median_coins_update: pool size must be even and >= 2");
  }
  std::vector<double> scratch(pool.begin(), pool.end());
  return detail::select_middle(scratch, coin);
}

double majority_update(std::span<const double> pool) {
  if (pool.size() % 2 == 0) throw std::invalid_argument("majority_update: pool size must be odd");
  require_binary(pool);
  std::size_t ones = 0;
  for (double v : pool) ones += v == 1.0 ? 1 : 0;
  return 2 * ones > pool.size() ? 1.0 : 0.0;
}

double ztgd_update(std::span<const double> pool, double current, std::uint8_t coin) {
  if (pool.empty() || pool.size() % 2 != 0) {
    throw std::invalid_argument("ztgd_update: pool size must be even and >= 2");
  }
  require_binary(pool);
  if (current != 0.0 && current != 1.0) throw std::invalid_argument("ztgd_update: current is not 0 or 1");
  std::size_t ones = 0;
  for (double v : pool) ones += v == 1.0 ? 1 : 0;
  if (2 * ones > pool.size()) return 1.0;
  if (2 * ones < pool.size()) return 0.0;
  return coin != 0 ? 1.0 : 0.0;
}

}  // namespace mdyn
