#ifndef MDYN_RANDOMNESS_HPP
#define MDYN_RANDOMNESS_HPP

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "mdyn/graph.hpp"

namespace mdyn {

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Independent sub-seed for (seed, a, b); used to split one top-level seed
/// into per-vertex, per-replica and per-purpose streams.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                                  std::uint64_t b = 0) {
  return mix64(mix64(mix64(seed) ^ a) + b);
}

/// Counter-based stream: draw i is a pure function of (key, i).
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next() { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }
  /// Uniform on the grid {k * 2^-53 : 0 <= k < 2^53}.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }
  /// Exponential(1), strictly positive.
  double exponential();
  std::uint8_t bit() { return static_cast<std::uint8_t>(next() >> 63); }

  [[nodiscard]] std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream purposes mixed into derive_seed.
enum class StreamTag : std::uint64_t { Clock = 1, Coin = 2, Init = 3, Replica = 4 };

struct Event {
  double time = 0.0;
  Vertex vertex = 0;
  /// Fair tie-break bit; consumed only by coin rules at even-degree vertices.
  std::uint8_t coin = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Every clock ring (and its coin) on a graph up to a time horizon.
struct EventLog {
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::size_t vertex_count = 0;
  std::vector<Event> events;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// Lazily merged per-vertex Poisson clocks. Yields exactly the event sequence
/// of sample_event_log() for the same (graph, horizon, seed) without storing it.
///
/// Vertex x draws its inter-arrival times from the counter stream keyed by
/// (seed, x, Clock) and its coins from (seed, x, Coin), so adding vertices
/// never perturbs the clocks of existing ones. Frozen vertices never ring.
class ClockStream {
 public:
  ClockStream(const Graph& g, double horizon, std::uint64_t seed);

  /// Next event in time order, or std::nullopt past the horizon.
  std::optional<Event> next();
  [[nodiscard]] double horizon() const { return horizon_; }

 private:
  struct Pending {
    double time;
    Vertex vertex;
    bool operator>(const Pending& o) const {
      return time > o.time || (time == o.time && vertex > o.vertex);
    }
  };

  double horizon_;
  std::vector<CounterRng> clocks_;
  std::vector<CounterRng> coins_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
};

/// Materialized ClockStream. Identical arguments give bit-identical logs.
EventLog sample_event_log(const Graph& g, double horizon, std::uint64_t seed);

std::optional<double> first_ring_time(const EventLog& log, Vertex x);

}  // namespace mdyn

#endif  // MDYN_RANDOMNESS_HPP
