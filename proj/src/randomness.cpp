#include "mdyn/randomness.hpp"

#include <cmath>
#include <stdexcept>

namespace mdyn {

double CounterRng::exponential() {
  // (k + 1/2) 2^-53 lies strictly inside (0,1), so the result is finite and > 0.
  const double u = (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53;
  return -std::log(u);
}

ClockStream::ClockStream(const Graph& g, double horizon, std::uint64_t seed) : horizon_(horizon) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("event log: horizon must be >= 0");
  const std::size_t n = g.vertex_count();
  clocks_.reserve(n);
  coins_.reserve(n);
  std::vector<Pending> initial;
  initial.reserve(n);
  for (std::size_t x = 0; x < n; ++x) {
    clocks_.emplace_back(derive_seed(seed, x, static_cast<std::uint64_t>(StreamTag::Clock)));
    coins_.emplace_back(derive_seed(seed, x, static_cast<std::uint64_t>(StreamTag::Coin)));
    if (g.is_frozen(static_cast<Vertex>(x))) continue;
    const double t = clocks_[x].exponential();
    if (t <= horizon_) initial.push_back({t, static_cast<Vertex>(x)});
  }
  queue_ = decltype(queue_)(std::greater<>{}, std::move(initial));
}

std::optional<Event> ClockStream::next() {
  if (queue_.empty()) return std::nullopt;
  const Pending top = queue_.top();
  queue_.pop();
  const double following = top.time + clocks_[top.vertex].exponential();
  if (following <= horizon_) queue_.push({following, top.vertex});
  return Event{top.time, top.vertex, coins_[top.vertex].bit()};
}

EventLog sample_event_log(const Graph& g, double horizon, std::uint64_t seed) {
  if (!std::isfinite(horizon)) throw std::invalid_argument("event log: horizon must be finite");
  EventLog log;
  log.horizon = horizon;
  log.seed = seed;
  log.vertex_count = g.vertex_count();
  ClockStream stream(g, horizon, seed);
  log.events.reserve(static_cast<std::size_t>(
      horizon * static_cast<double>(g.vertex_count() - g.frozen_count()) * 1.05 + 16));
  while (auto e = stream.next()) log.events.push_back(*e);
  return log;
}

std::optional<double> first_ring_time(const EventLog& log, Vertex x) {
  if (x >= log.vertex_count) throw std::out_of_range("first_ring_time: invalid vertex id");
  for (const auto& e : log.events) {
    if (e.vertex == x) return e.time;
  }
  return std::nullopt;
}

}  // namespace mdyn
