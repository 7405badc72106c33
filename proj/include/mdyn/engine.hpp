#ifndef MDYN_ENGINE_HPP
#define MDYN_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mdyn/graph.hpp"
#include "mdyn/randomness.hpp"
#include "mdyn/rules.hpp"

namespace mdyn {

enum class OpinionMode { Real, Binary };

/// Vertex-indexed opinions. Binary opinions are stored as 0.0 / 1.0 so that
/// both modes share the update machinery.
struct OpinionConfig {
  std::vector<double> values;
  OpinionMode mode = OpinionMode::Real;

  /// Throws std::invalid_argument if a value is outside [0,1] (real) or not
  /// in {0,1} (binary).
  void validate() const;
  [[nodiscard]] std::size_t size() const { return values.size(); }

  friend bool operator==(const OpinionConfig&, const OpinionConfig&) = default;
};

/// I.i.d. uniform opinions on the 2^-53 grid, one counter stream per vertex;
/// frozen vertices take their fixed value.
OpinionConfig init_uniform(const Graph& g, std::uint64_t seed);
/// Binary i.i.d. Bernoulli(p): threshold_project(init_uniform(g, seed), p).
OpinionConfig init_bernoulli(const Graph& g, double p, std::uint64_t seed);

/// 1 where value <= p, else 0.
OpinionConfig threshold_project(const OpinionConfig& c, double p);

struct Flip {
  double time = 0.0;
  Vertex vertex = 0;
  double old_value = 0.0;
  double new_value = 0.0;

  friend bool operator==(const Flip&, const Flip&) = default;
};

/// Piecewise-constant path: an initial configuration and the time-ordered
/// list of value changes. Rings that left the value unchanged are counted
/// but not recorded.
class Trajectory {
 public:
  Trajectory(OpinionConfig initial, std::vector<Flip> flips, double horizon, std::size_t rings);

  [[nodiscard]] const OpinionConfig& initial() const { return initial_; }
  [[nodiscard]] const std::vector<Flip>& flips() const { return flips_; }
  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] std::size_t rings() const { return rings_; }

  /// Value after the last flip of x at time <= t. Throws std::out_of_range
  /// unless 0 <= t <= horizon.
  [[nodiscard]] double value_at(Vertex x, double t) const;
  [[nodiscard]] OpinionConfig config_at(double t) const;
  [[nodiscard]] OpinionConfig final_config() const { return config_at(horizon_); }
  [[nodiscard]] std::optional<double> last_flip_time(Vertex x) const;
  [[nodiscard]] std::size_t flip_count(Vertex x) const;
  /// Indices into flips() of the flips at x, in time order.
  [[nodiscard]] std::span<const std::uint32_t> flips_of(Vertex x) const;

  friend bool operator==(const Trajectory& a, const Trajectory& b) {
    return a.initial_ == b.initial_ && a.flips_ == b.flips_ && a.horizon_ == b.horizon_ &&
           a.rings_ == b.rings_;
  }

 private:
  OpinionConfig initial_;
  std::vector<Flip> flips_;
  double horizon_;
  std::size_t rings_;
  std::vector<std::vector<std::uint32_t>> by_vertex_;
};

/// New value of x given the full current state and the event coin.
using UpdateFn = std::function<double(const Graph&, std::span<const double> state, Vertex x,
                                      std::uint8_t coin)>;

/// The update a rule performs at x: Median/Majority pool the effective
/// neighborhood; MedianCoins/ZTGD pool N(x) and consume the coin when deg(x)
/// is even. Isolated vertices keep their opinion under coin rules.
UpdateFn rule_update(RuleKind rule);

/// Replays the rule along the log. Throws std::invalid_argument when the
/// configuration mode does not match the rule, or when the log was not
/// sampled on a graph of this shape (size mismatch, event at a frozen vertex).
Trajectory run(const Graph& g, RuleKind rule, const OpinionConfig& init, const EventLog& log);
/// Same replay with an arbitrary update (used for negative controls).
Trajectory run(const Graph& g, const UpdateFn& update, const OpinionConfig& init,
               const EventLog& log);

enum class TieBreak { SelfInclusion, Coins };

/// Deterministic sequential majority updates at the scheduled vertices.
/// With TieBreak::Coins, even-degree vertices use ztgd_update and consume
/// the next bit of `coins`. Returns the initial configuration followed by the
/// configuration after each step.
std::vector<OpinionConfig> run_sequential(const Graph& g, std::span<const Vertex> schedule,
                                          const OpinionConfig& init,
                                          TieBreak ties = TieBreak::SelfInclusion,
                                          std::span<const std::uint8_t> coins = {});

/// Event-driven simulation that draws its clocks from a ClockStream instead
/// of a stored log. Processes the same events as run() on
/// sample_event_log(g, horizon, seed) and therefore produces the same flips.
///
/// Tracks which vertices could still change under some coin. Once none can,
/// the configuration is absorbing and further events are skipped.
class Simulation {
 public:
  using FlipObserver = std::function<void(const Flip&, std::span<const double> state)>;

  Simulation(const Graph& g, RuleKind rule, OpinionConfig init, std::uint64_t seed,
             double horizon);

  /// Processes every event with time <= t (capped at the horizon). The
  /// observer sees each flip together with the state after it.
  void advance_to(double t, const FlipObserver& observer = {});

  [[nodiscard]] std::span<const double> state() const { return state_; }
  [[nodiscard]] double time() const { return now_; }
  [[nodiscard]] bool absorbed() const { return unstable_count_ == 0; }
  [[nodiscard]] std::size_t rings() const { return rings_; }
  [[nodiscard]] std::size_t flips() const { return flips_; }

 private:
  [[nodiscard]] bool can_change(Vertex x);
  void refresh(Vertex x);

  const Graph& graph_;
  RuleKind rule_;
  std::vector<double> state_;
  ClockStream clock_;
  std::optional<Event> pending_;
  std::vector<double> scratch_;
  std::vector<std::uint8_t> unstable_;
  std::size_t unstable_count_ = 0;
  double now_ = 0.0;
  std::size_t rings_ = 0;
  std::size_t flips_ = 0;
};

}  // namespace mdyn

#endif  // MDYN_ENGINE_HPP
