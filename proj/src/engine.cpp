#include "mdyn/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace mdyn {

namespace {

// Pool for x under `rule`, gathered into scratch; returns the new value.
double apply_rule(const Graph& g, RuleKind rule, std::span<const double> state, Vertex x,
                  std::uint8_t coin, std::vector<double>& scratch) {
  const auto nbrs = g.neighbors(x);
  scratch.clear();
  for (Vertex y : nbrs) scratch.push_back(state[y]);
  if (nbrs.size() % 2 == 1) return detail::select_median(scratch);
  if (uses_coins(rule)) {
    if (scratch.empty()) return state[x];
    return detail::select_middle(scratch, coin);
  }
  scratch.push_back(state[x]);
  return detail::select_median(scratch);
}

void check_mode(RuleKind rule, const OpinionConfig& init) {
  init.validate();
  const bool binary = init.mode == OpinionMode::Binary;
  if (binary != is_binary(rule)) {
    throw std::invalid_argument("run: configuration mode does not match rule");
  }
}

void check_shapes(const Graph& g, const OpinionConfig& init, const EventLog& log) {
  if (init.size() != g.vertex_count()) {
    throw std::invalid_argument("run: configuration size does not match graph");
  }
  if (log.vertex_count != g.vertex_count()) {
    throw std::invalid_argument("run: event log was sampled on a different graph");
  }
}

template <class Update>
Trajectory replay(const Graph& g, const OpinionConfig& init, const EventLog& log, Update&& update) {
  std::vector<double> state = init.values;
  std::vector<Flip> flips;
  for (const Event& e : log.events) {
    if (e.vertex >= g.vertex_count() || g.is_frozen(e.vertex)) {
      throw std::invalid_argument("run: event log does not match graph");
    }
    const double old_value = state[e.vertex];
    const double new_value = update(std::span<const double>(state), e.vertex, e.coin);
    if (new_value != old_value) {
      state[e.vertex] = new_value;
      flips.push_back({e.time, e.vertex, old_value, new_value});
    }
  }
  return Trajectory(init, std::move(flips), log.horizon, log.events.size());
}

}  // namespace

void OpinionConfig::validate() const {
  for (double v : values) {
    if (mode == OpinionMode::Binary) {
      if (v != 0.0 && v != 1.0) throw std::invalid_argument("opinion config: binary value not in {0,1}");
    } else if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("opinion config: real value outside [0,1]");
    }
  }
}

OpinionConfig init_uniform(const Graph& g, std::uint64_t seed) {
  OpinionConfig c;
  c.mode = OpinionMode::Real;
  c.values.resize(g.vertex_count());
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    const auto v = static_cast<Vertex>(x);
    if (g.is_frozen(v)) {
      c.values[x] = g.frozen_value(v);
    } else {
      CounterRng rng(derive_seed(seed, x, static_cast<std::uint64_t>(StreamTag::Init)));
      c.values[x] = rng.uniform();
    }
  }
  return c;
}

OpinionConfig init_bernoulli(const Graph& g, double p, std::uint64_t seed) {
  return threshold_project(init_uniform(g, seed), p);
}

OpinionConfig threshold_project(const OpinionConfig& c, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("threshold_project: p outside [0,1]");
  OpinionConfig out;
  out.mode = OpinionMode::Binary;
  out.values.reserve(c.size());
  for (double v : c.values) out.values.push_back(v <= p ? 1.0 : 0.0);
  return out;
}

Trajectory::Trajectory(OpinionConfig initial, std::vector<Flip> flips, double horizon,
                       std::size_t rings)
    : initial_(std::move(initial)), flips_(std::move(flips)), horizon_(horizon), rings_(rings),
      by_vertex_(initial_.size()) {
  for (std::size_t i = 0; i < flips_.size(); ++i) {
    const Vertex x = flips_[i].vertex;
    if (x >= initial_.size()) throw std::invalid_argument("trajectory: flip at invalid vertex");
    by_vertex_[x].push_back(static_cast<std::uint32_t>(i));
  }
}

double Trajectory::value_at(Vertex x, double t) const {
  if (x >= initial_.size()) throw std::out_of_range("value_at: invalid vertex id");
  if (!(t >= 0.0 && t <= horizon_)) throw std::out_of_range("value_at: time outside [0, horizon]");
  const auto& idx = by_vertex_[x];
  auto it = std::upper_bound(idx.begin(), idx.end(), t,
                             [this](double time, std::uint32_t i) { return time < flips_[i].time; });
  if (it == idx.begin()) return initial_.values[x];
  return flips_[*std::prev(it)].new_value;
}

OpinionConfig Trajectory::config_at(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) throw std::out_of_range("config_at: time outside [0, horizon]");
  OpinionConfig c = initial_;
  for (const Flip& f : flips_) {
    if (f.time > t) break;
    c.values[f.vertex] = f.new_value;
  }
  return c;
}

std::optional<double> Trajectory::last_flip_time(Vertex x) const {
  if (x >= initial_.size()) throw std::out_of_range("last_flip_time: invalid vertex id");
  if (by_vertex_[x].empty()) return std::nullopt;
  return flips_[by_vertex_[x].back()].time;
}

std::size_t Trajectory::flip_count(Vertex x) const { return flips_of(x).size(); }

std::span<const std::uint32_t> Trajectory::flips_of(Vertex x) const {
  if (x >= initial_.size()) throw std::out_of_range("flips_of: invalid vertex id");
  return by_vertex_[x];
}

UpdateFn rule_update(RuleKind rule) {
  return [rule, scratch = std::vector<double>()](const Graph& g, std::span<const double> state,
                                                 Vertex x, std::uint8_t coin) mutable {
    return apply_rule(g, rule, state, x, coin, scratch);
  };
}

Trajectory run(const Graph& g, RuleKind rule, const OpinionConfig& init, const EventLog& log) {
  check_mode(rule, init);
  check_shapes(g, init, log);
  std::vector<double> scratch;
  return replay(g, init, log, [&](std::span<const double> state, Vertex x, std::uint8_t coin) {
    return apply_rule(g, rule, state, x, coin, scratch);
  });
}

Trajectory run(const Graph& g, const UpdateFn& update, const OpinionConfig& init,
               const EventLog& log) {
  init.validate();
  check_shapes(g, init, log);
  return replay(g, init, log, [&](std::span<const double> state, Vertex x, std::uint8_t coin) {
    return update(g, state, x, coin);
  });
}

std::vector<OpinionConfig> run_sequential(const Graph& g, std::span<const Vertex> schedule,
                                          const OpinionConfig& init, TieBreak ties,
                                          std::span<const std::uint8_t> coins) {
  if (init.mode != OpinionMode::Binary) {
    throw std::invalid_argument("run_sequential: configuration must be binary");
  }
  init.validate();
  if (init.size() != g.vertex_count()) {
    throw std::invalid_argument("run_sequential: configuration size does not match graph");
  }
  for (Vertex x : schedule) {
    if (x >= g.vertex_count()) throw std::invalid_argument("run_sequential: invalid schedule entry");
  }
  const RuleKind rule = ties == TieBreak::Coins ? RuleKind::ZTGD : RuleKind::Majority;
  std::vector<OpinionConfig> out;
  out.reserve(schedule.size() + 1);
  out.push_back(init);
  std::vector<double> scratch;
  std::size_t next_coin = 0;
  for (Vertex x : schedule) {
    OpinionConfig c = out.back();
    std::uint8_t coin = 0;
    if (rule == RuleKind::ZTGD && g.degree(x) % 2 == 0 && g.degree(x) > 0) {
      if (next_coin >= coins.size()) throw std::invalid_argument("run_sequential: coin stream exhausted");
      coin = coins[next_coin++];
    }
    c.values[x] = apply_rule(g, rule, c.values, x, coin, scratch);
    out.push_back(std::move(c));
  }
  return out;
}

Simulation::Simulation(const Graph& g, RuleKind rule, OpinionConfig init, std::uint64_t seed,
                       double horizon)
    : graph_(g), rule_(rule), state_(std::move(init.values)), clock_(g, horizon, seed),
      unstable_(g.vertex_count(), 0) {
  OpinionConfig check{state_, init.mode};
  check_mode(rule, check);
  if (state_.size() != g.vertex_count()) {
    throw std::invalid_argument("simulation: configuration size does not match graph");
  }
  for (std::size_t x = 0; x < state_.size(); ++x) refresh(static_cast<Vertex>(x));
}

bool Simulation::can_change(Vertex x) {
  if (graph_.is_frozen(x)) return false;
  const double current = state_[x];
  const auto nbrs = graph_.neighbors(x);
  if (uses_coins(rule_) && nbrs.size() % 2 == 0) {
    if (nbrs.empty()) return false;
    return apply_rule(graph_, rule_, state_, x, 0, scratch_) != current ||
           apply_rule(graph_, rule_, state_, x, 1, scratch_) != current;
  }
  return apply_rule(graph_, rule_, state_, x, 0, scratch_) != current;
}

void Simulation::refresh(Vertex x) {
  const std::uint8_t flag = can_change(x) ? 1 : 0;
  if (flag != unstable_[x]) {
    if (flag != 0) {
      ++unstable_count_;
    } else {
      --unstable_count_;
    }
    unstable_[x] = flag;
  }
}

void Simulation::advance_to(double t, const FlipObserver& observer) {
  t = std::min(t, clock_.horizon());
  if (t < now_) throw std::invalid_argument("simulation: cannot move backwards in time");
  while (unstable_count_ > 0) {
    if (!pending_) {
      pending_ = clock_.next();
      if (!pending_) break;
    }
    if (pending_->time > t) break;
    const Event e = *pending_;
    pending_.reset();
    ++rings_;
    // A vertex that cannot change under any coin would leave the state as is.
    if (unstable_[e.vertex] == 0) continue;
    const double old_value = state_[e.vertex];
    const double new_value = apply_rule(graph_, rule_, state_, e.vertex, e.coin, scratch_);
    if (new_value == old_value) continue;
    state_[e.vertex] = new_value;
    ++flips_;
    refresh(e.vertex);
    for (Vertex y : graph_.neighbors(e.vertex)) refresh(y);
    if (observer) observer(Flip{e.time, e.vertex, old_value, new_value}, state_);
  }
  now_ = t;
}

}  // namespace mdyn
