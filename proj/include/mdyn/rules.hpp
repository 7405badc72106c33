#ifndef MDYN_RULES_HPP
#define MDYN_RULES_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace mdyn {

enum class RuleKind { Median, MedianCoins, Majority, ZTGD };

[[nodiscard]] constexpr bool is_binary(RuleKind r) {
  return r == RuleKind::Majority || r == RuleKind::ZTGD;
}
/// Coin rules pool only the plain neighborhood at even-degree vertices and
/// break the resulting tie with the event coin.
[[nodiscard]] constexpr bool uses_coins(RuleKind r) {
  return r == RuleKind::MedianCoins || r == RuleKind::ZTGD;
}

[[nodiscard]] std::string_view to_string(RuleKind r);
[[nodiscard]] std::optional<RuleKind> parse_rule(std::string_view name);

// Single-site updates. All are pure; pools are never modified.

/// Middle order statistic of an odd-sized pool.
[[nodiscard]] double median_update(std::span<const double> pool);

/// Lower (coin = 0) or upper (coin = 1) middle order statistic of an
/// even-sized, non-empty pool.
[[nodiscard]] double median_coins_update(std::span<const double> pool, std::uint8_t coin);

/// 1 iff more than half of an odd-sized binary pool is 1.
[[nodiscard]] double majority_update(std::span<const double> pool);

/// Zero-temperature Glauber update from the even-sized binary neighbor pool:
/// strict majority wins, an exact tie takes the coin.
[[nodiscard]] double ztgd_update(std::span<const double> pool, double current, std::uint8_t coin);

namespace detail {

// In-place selection used by the engine on its scratch buffer.
double select_median(std::span<double> pool);
double select_middle(std::span<double> pool, std::uint8_t coin);

}  // namespace detail

}  // namespace mdyn

#endif  // MDYN_RULES_HPP
