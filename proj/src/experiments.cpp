#include "mdyn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parallel.hpp"

namespace mdyn {

namespace {

std::uint64_t clock_seed_of(std::uint64_t rs) {
  return derive_seed(rs, 0, static_cast<std::uint64_t>(StreamTag::Clock));
}

std::uint64_t init_seed_of(std::uint64_t rs) {
  return derive_seed(rs, 0, static_cast<std::uint64_t>(StreamTag::Init));
}

void require_vertex(const Graph& g, Vertex x) {
  if (x >= g.vertex_count()) throw std::invalid_argument("experiment: invalid vertex id");
}

void require_replicas(std::size_t replicas) {
  if (replicas == 0) throw std::invalid_argument("experiment: replicas must be >= 1");
}

/// Initial configuration for replica seed rs: uniform for real rules,
/// thresholded uniform for binary ones.
OpinionConfig replica_init(const Graph& g, RuleKind rule, double p, std::uint64_t rs) {
  OpinionConfig c = init_uniform(g, init_seed_of(rs));
  if (is_binary(rule)) return threshold_project(c, p);
  return c;
}

}  // namespace

double binomial_se(double p, std::size_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

std::uint64_t replica_seed(std::uint64_t seed, std::size_t r) {
  return derive_seed(seed, r, static_cast<std::uint64_t>(StreamTag::Replica));
}

std::string_view to_string(Verdict v) {
  return v == Verdict::Consistent ? "consistent" : "inconsistent";
}

// ---------------------------------------------------------------------------

MarginalEstimate estimate_marginal(const Graph& g, RuleKind rule, Vertex x, double t,
                                   double threshold, std::size_t replicas, std::uint64_t seed) {
  const double times[] = {t};
  const double thresholds[] = {threshold};
  return estimate_marginal_grid(g, rule, x, times, thresholds, replicas, seed).front();
}

std::vector<MarginalEstimate> estimate_marginal_grid(const Graph& g, RuleKind rule, Vertex x,
                                                     std::span<const double> times,
                                                     std::span<const double> thresholds,
                                                     std::size_t replicas, std::uint64_t seed) {
  require_vertex(g, x);
  require_replicas(replicas);
  if (times.empty() || thresholds.empty()) throw std::invalid_argument("marginal: empty grid");
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("marginal: time must be >= 0");
  }
  for (double a : thresholds) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("marginal: threshold outside [0,1]");
  }
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });
  const double t_max = times[order.back()];
  const std::size_t cells = times.size() * thresholds.size();

  const std::size_t workers = detail::worker_count(replicas);
  std::vector<std::vector<std::size_t>> hits(workers, std::vector<std::size_t>(cells, 0));
  detail::for_each_replica(replicas, [&](std::size_t w, std::size_t r) {
    const std::uint64_t rs = replica_seed(seed, r);
    auto& local = hits[w];
    if (!is_binary(rule)) {
      Simulation sim(g, rule, replica_init(g, rule, 0.0, rs), clock_seed_of(rs), t_max);
      for (std::size_t ti : order) {
        sim.advance_to(times[ti]);
        const double v = sim.state()[x];
        for (std::size_t pi = 0; pi < thresholds.size(); ++pi) {
          if (v <= thresholds[pi]) ++local[ti * thresholds.size() + pi];
        }
      }
      return;
    }
    for (std::size_t pi = 0; pi < thresholds.size(); ++pi) {
      Simulation sim(g, rule, replica_init(g, rule, thresholds[pi], rs), clock_seed_of(rs), t_max);
      for (std::size_t ti : order) {
        sim.advance_to(times[ti]);
        if (sim.state()[x] == 1.0) ++local[ti * thresholds.size() + pi];
      }
    }
  });

  std::vector<MarginalEstimate> out;
  out.reserve(cells);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    for (std::size_t pi = 0; pi < thresholds.size(); ++pi) {
      std::size_t total = 0;
      for (const auto& h : hits) total += h[ti * thresholds.size() + pi];
      MarginalEstimate e;
      e.graph = g.name();
      e.vertex = x;
      e.t = times[ti];
      e.threshold = thresholds[pi];
      e.replicas = replicas;
      e.estimate = static_cast<double>(total) / static_cast<double>(replicas);
      e.std_error = binomial_se(e.estimate, replicas);
      e.seed = seed;
      out.push_back(e);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

PathwiseReport check_coupling(const Graph& g, const EventLog& log, const OpinionConfig& eta0,
                              std::span<const double> p_grid) {
  return check_coupling(g, log, eta0, p_grid, rule_update(RuleKind::Majority));
}

PathwiseReport check_coupling(const Graph& g, const EventLog& log, const OpinionConfig& eta0,
                              std::span<const double> p_grid, const UpdateFn& majority) {
  if (eta0.mode != OpinionMode::Real) throw std::invalid_argument("check_coupling: eta0 must be real-valued");
  const Trajectory median = run(g, RuleKind::Median, eta0, log);
  PathwiseReport report;
  for (double p : p_grid) {
    const OpinionConfig xi0 = threshold_project(eta0, p);
    const Trajectory majority_path = run(g, majority, xi0, log);

    // Flips of the thresholded median path, in order.
    std::vector<Flip> expected;
    for (const Flip& f : median.flips()) {
      const double before = f.old_value <= p ? 1.0 : 0.0;
      const double after = f.new_value <= p ? 1.0 : 0.0;
      if (before != after) expected.push_back({f.time, f.vertex, before, after});
    }
    const auto& actual = majority_path.flips();
    const std::size_t common = std::min(expected.size(), actual.size());
    std::size_t i = 0;
    while (i < common && expected[i] == actual[i]) ++i;
    report.checks += log.events.size();
    if (i < common || expected.size() != actual.size()) {
      const Flip& site = i < common ? (expected[i].time <= actual[i].time ? expected[i] : actual[i])
                                    : (i < expected.size() ? expected[i] : actual[i]);
      report.pass = false;
      report.failure = PathwiseReport::Site{p, site.time, site.vertex};
      return report;
    }
  }
  return report;
}

OpinionConfig swap_construction(const OpinionConfig& eta0, double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha < 0.5)) throw std::invalid_argument("swap_construction: alpha must lie in [0, 1/2)");
  if (!(beta >= 0.0 && alpha + beta <= 1.0)) throw std::invalid_argument("swap_construction: need beta >= 0 and alpha + beta <= 1");
  OpinionConfig xi0 = eta0;
  for (double& v : xi0.values) {
    if (v < alpha) {
      v += beta;
    } else if (v >= beta && v < beta + alpha) {
      v -= beta;
    }
  }
  return xi0;
}

PathwiseReport check_domination(const Graph& g, const EventLog& log, double alpha, double beta,
                                const OpinionConfig& eta0) {
  const OpinionConfig xi0 = swap_construction(eta0, alpha, beta);
  const Trajectory eta = run(g, RuleKind::Median, eta0, log);
  const Trajectory xi = run(g, RuleKind::Median, xi0, log);

  std::vector<double> eta_state = eta0.values;
  std::vector<double> xi_state = xi0.values;
  const double upper = beta + alpha;
  PathwiseReport report;
  auto holds = [&](Vertex v) {
    ++report.checks;
    const double e = eta_state[v];
    if (!(e >= 0.0 && e < alpha)) return true;
    return xi_state[v] >= beta && xi_state[v] < upper;
  };
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (!holds(static_cast<Vertex>(v))) {
      report.pass = false;
      report.failure = PathwiseReport::Site{alpha, 0.0, static_cast<Vertex>(v)};
      return report;
    }
  }
  const auto& fe = eta.flips();
  const auto& fx = xi.flips();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < fe.size() || j < fx.size()) {
    const double t = std::min(i < fe.size() ? fe[i].time : INFINITY, j < fx.size() ? fx[j].time : INFINITY);
    Vertex v = 0;
    if (i < fe.size() && fe[i].time == t) {
      v = fe[i].vertex;
      eta_state[v] = fe[i++].new_value;
    }
    if (j < fx.size() && fx[j].time == t) {
      v = fx[j].vertex;
      xi_state[v] = fx[j++].new_value;
    }
    if (!holds(v)) {
      report.pass = false;
      report.failure = PathwiseReport::Site{alpha, t, v};
      return report;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

ScanResult monotonicity_scan(const Graph& g, RuleKind rule, Vertex x, double threshold,
                             std::span<const double> t_grid, std::size_t replicas,
                             std::uint64_t seed) {
  if (t_grid.empty()) throw std::invalid_argument("monotonicity_scan: empty time grid");
  if (threshold > 0.5) throw std::invalid_argument("monotonicity_scan: threshold must be <= 1/2");
  std::vector<double> times(t_grid.begin(), t_grid.end());
  std::sort(times.begin(), times.end());
  const double thresholds[] = {threshold};
  ScanResult out;
  out.estimates = estimate_marginal_grid(g, rule, x, times, thresholds, replicas, seed);
  for (std::size_t i = 1; i < out.estimates.size(); ++i) {
    const auto& a = out.estimates[i - 1];
    const auto& b = out.estimates[i];
    const double increase = b.estimate - a.estimate;
    const double se = std::hypot(a.std_error, b.std_error);
    out.statistic.push_back(increase);
    out.statistic_se.push_back(se);
    if (increase > 3.0 * se && increase > 0.0) out.verdict = Verdict::Inconsistent;
  }
  return out;
}

ScanResult unimodality_scan(const Graph& g, RuleKind rule, Vertex x, double t,
                            std::span<const double> p_grid, std::size_t replicas,
                            std::uint64_t seed) {
  if (p_grid.size() < 3) throw std::invalid_argument("unimodality_scan: grid needs at least 3 points");
  std::vector<double> ps(p_grid.begin(), p_grid.end());
  std::sort(ps.begin(), ps.end());
  if (ps.front() < 0.0 || ps.back() > 0.5) throw std::invalid_argument("unimodality_scan: grid must lie in [0, 1/2]");
  if (std::adjacent_find(ps.begin(), ps.end()) != ps.end()) throw std::invalid_argument("unimodality_scan: repeated grid point");
  const double times[] = {t};
  ScanResult out;
  out.estimates = estimate_marginal_grid(g, rule, x, times, ps, replicas, seed);
  for (std::size_t i = 1; i + 1 < ps.size(); ++i) {
    const double h1 = ps[i] - ps[i - 1];
    const double h2 = ps[i + 1] - ps[i];
    const double c0 = 2.0 / (h1 * (h1 + h2));
    const double c1 = -2.0 / (h1 * h2);
    const double c2 = 2.0 / (h2 * (h1 + h2));
    const auto& e0 = out.estimates[i - 1];
    const auto& e1 = out.estimates[i];
    const auto& e2 = out.estimates[i + 1];
    const double d2 = c0 * e0.estimate + c1 * e1.estimate + c2 * e2.estimate;
    const double se = std::sqrt(c0 * c0 * e0.std_error * e0.std_error +
                                c1 * c1 * e1.std_error * e1.std_error +
                                c2 * c2 * e2.std_error * e2.std_error);
    out.statistic.push_back(d2);
    out.statistic_se.push_back(se);
    if (d2 < -3.0 * se && d2 < 0.0) out.verdict = Verdict::Inconsistent;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class FixationAccumulator {
 public:
  FixationAccumulator(const Graph& g, double horizon, double window, std::size_t bins)
      : graph_(g) {
    if (!(window >= 0.0 && window <= horizon)) throw std::invalid_argument("fixation: window must lie in [0, horizon]");
    if (bins == 0) throw std::invalid_argument("fixation: bins must be >= 1");
    report_.horizon = horizon;
    report_.window = window;
    report_.flips_per_vertex.assign(g.vertex_count(), 0);
    report_.last_flip_histogram.assign(bins, 0);
  }

  void add(std::span<const std::size_t> counts, std::span<const double> last_flip) {
    ++report_.trajectories;
    const double cutoff = report_.horizon - report_.window;
    const auto bins = report_.last_flip_histogram.size();
    for (std::size_t v = 0; v < counts.size(); ++v) {
      report_.flips_per_vertex[v] += counts[v];
      ++report_.flip_count_distribution[counts[v]];
      report_.max_flips = std::max(report_.max_flips, counts[v]);
      if (counts[v] == 0) {
        ++report_.never_flipped;
      } else {
        auto bin = static_cast<std::size_t>(last_flip[v] / report_.horizon * static_cast<double>(bins));
        ++report_.last_flip_histogram[std::min(bin, bins - 1)];
      }
      if (graph_.is_frozen(static_cast<Vertex>(v))) continue;
      ++eligible_;
      if (counts[v] == 0 || last_flip[v] < cutoff) ++fixed_;
    }
  }

  FixationReport finish() {
    report_.fixation_fraction =
        eligible_ == 0 ? 1.0 : static_cast<double>(fixed_) / static_cast<double>(eligible_);
    return report_;
  }

  void merge(const FixationAccumulator& o) {
    report_.trajectories += o.report_.trajectories;
    for (std::size_t v = 0; v < report_.flips_per_vertex.size(); ++v) {
      report_.flips_per_vertex[v] += o.report_.flips_per_vertex[v];
    }
    for (const auto& [k, n] : o.report_.flip_count_distribution) report_.flip_count_distribution[k] += n;
    for (std::size_t b = 0; b < report_.last_flip_histogram.size(); ++b) {
      report_.last_flip_histogram[b] += o.report_.last_flip_histogram[b];
    }
    report_.never_flipped += o.report_.never_flipped;
    report_.max_flips = std::max(report_.max_flips, o.report_.max_flips);
    eligible_ += o.eligible_;
    fixed_ += o.fixed_;
  }

 private:
  const Graph& graph_;
  FixationReport report_;
  std::size_t eligible_ = 0;
  std::size_t fixed_ = 0;
};

}  // namespace

FixationReport fixation_report(std::span<const Trajectory> trajectories, const Graph& g,
                               double window, std::size_t bins) {
  if (trajectories.empty()) throw std::invalid_argument("fixation_report: no trajectories");
  FixationAccumulator acc(g, trajectories.front().horizon(), window, bins);
  std::vector<std::size_t> counts(g.vertex_count());
  std::vector<double> last(g.vertex_count());
  for (const auto& traj : trajectories) {
    if (traj.initial().size() != g.vertex_count()) throw std::invalid_argument("fixation_report: trajectory does not match graph");
    if (traj.horizon() != trajectories.front().horizon()) throw std::invalid_argument("fixation_report: horizons differ");
    for (std::size_t v = 0; v < counts.size(); ++v) {
      counts[v] = traj.flip_count(static_cast<Vertex>(v));
      last[v] = traj.last_flip_time(static_cast<Vertex>(v)).value_or(0.0);
    }
    acc.add(counts, last);
  }
  return acc.finish();
}

FixationReport fixation_run(const Graph& g, RuleKind rule, double horizon, double window,
                            std::size_t replicas, std::uint64_t seed, double p,
                            std::size_t bins) {
  require_replicas(replicas);
  const std::size_t workers = detail::worker_count(replicas);
  std::vector<FixationAccumulator> parts;
  for (std::size_t w = 0; w < workers; ++w) parts.emplace_back(g, horizon, window, bins);
  detail::for_each_replica(replicas, [&](std::size_t w, std::size_t r) {
    const std::uint64_t rs = replica_seed(seed, r);
    std::vector<std::size_t> counts(g.vertex_count(), 0);
    std::vector<double> last(g.vertex_count(), 0.0);
    Simulation sim(g, rule, replica_init(g, rule, p, rs), clock_seed_of(rs), horizon);
    sim.advance_to(horizon, [&](const Flip& f, std::span<const double>) {
      ++counts[f.vertex];
      last[f.vertex] = f.time;
    });
    parts[w].add(counts, last);
  });
  for (std::size_t w = 1; w < workers; ++w) parts.front().merge(parts[w]);
  return parts.front().finish();
}

bool LimitHistogram::pass() const {
  return std::all_of(windows.begin(), windows.end(), [](const WindowCheck& w) { return w.pass; });
}

LimitHistogram limit_histogram(const Graph& g, Vertex x, std::size_t replicas, double horizon,
                               double window, std::size_t bins,
                               std::span<const std::pair<double, double>> windows,
                               std::span<const double> tail_alphas, std::uint64_t seed) {
  if (g.torus_dim() != 2) throw std::invalid_argument("limit_histogram: graph must be a 2-d torus");
  require_vertex(g, x);
  require_replicas(replicas);
  if (bins == 0) throw std::invalid_argument("limit_histogram: bins must be >= 1");
  if (!(window >= 0.0 && window <= horizon)) throw std::invalid_argument("limit_histogram: window must lie in [0, horizon]");
  for (const auto& [a, b] : windows) {
    if (!(0.0 <= a && a < b && b <= 1.0)) throw std::invalid_argument("limit_histogram: windows need 0 <= alpha < beta <= 1");
  }

  // NaN marks a replica rejected by the trailing-window filter.
  std::vector<double> final_value(replicas);
  const double cutoff = horizon - window;
  detail::for_each_replica(replicas, [&](std::size_t, std::size_t r) {
    const std::uint64_t rs = replica_seed(seed, r);
    double last_flip = -1.0;
    Simulation sim(g, RuleKind::Median, replica_init(g, RuleKind::Median, 0.0, rs), clock_seed_of(rs), horizon);
    sim.advance_to(horizon, [&](const Flip& f, std::span<const double>) {
      if (f.vertex == x) last_flip = f.time;
    });
    final_value[r] = window > 0.0 && last_flip >= cutoff ? NAN : sim.state()[x];
  });

  LimitHistogram out;
  out.graph = g.name();
  out.vertex = x;
  out.horizon = horizon;
  out.window = window;
  out.replicas = replicas;
  out.seed = seed;
  out.histogram.assign(bins, 0);
  std::vector<double> accepted;
  accepted.reserve(replicas);
  for (double v : final_value) {
    if (std::isnan(v)) {
      ++out.rejected;
      continue;
    }
    accepted.push_back(v);
    const auto bin = std::min(static_cast<std::size_t>(v * static_cast<double>(bins)), bins - 1);
    ++out.histogram[bin];
  }
  out.accepted = accepted.size();
  const auto n = accepted.size();
  auto fraction = [&](auto&& pred) {
    if (n == 0) return 0.0;
    const auto k = std::count_if(accepted.begin(), accepted.end(), pred);
    return static_cast<double>(k) / static_cast<double>(n);
  };
  for (const auto& [a, b] : windows) {
    WindowCheck w;
    w.alpha = a;
    w.beta = b;
    w.estimate = fraction([a = a, b = b](double v) { return v >= a && v <= b; });
    w.std_error = binomial_se(w.estimate, n);
    w.bound = std::pow(b - a, 4);
    w.pass = n > 0 && w.estimate + 3.0 * w.std_error >= w.bound;
    out.windows.push_back(w);
  }
  for (double a : tail_alphas) {
    TailPoint tp;
    tp.alpha = a;
    tp.estimate = fraction([a](double v) { return v <= a; });
    tp.ratio = a > 0.0 ? tp.estimate / std::pow(a, 4) : 0.0;
    out.tail.push_back(tp);
  }
  return out;
}

// ---------------------------------------------------------------------------

long double local_energy(const Graph& g, std::span<const double> state, Vertex x) {
  long double h = 0.0L;
  const long double here = state[x];
  for (Vertex y : g.neighbors(x)) h += std::fabs(static_cast<long double>(state[y]) - here);
  return h;
}

namespace {

/// Energy change at x caused by x moving from old_value to the value now in state.
long double own_flip_delta(const Graph& g, std::span<const double> state, Vertex x, double old_value) {
  long double before = 0.0L;
  for (Vertex y : g.neighbors(x)) {
    before += std::fabs(static_cast<long double>(state[y]) - static_cast<long double>(old_value));
  }
  return local_energy(g, state, x) - before;
}

}  // namespace

EnergyTrace energy_trace(const Graph& g, RuleKind rule, const OpinionConfig& init,
                         std::uint64_t clock_seed, double horizon, Vertex x,
                         std::span<const double> eps_grid) {
  require_vertex(g, x);
  EnergyTrace trace;
  trace.vertex = x;
  trace.n_eps.assign(eps_grid.size(), 0);
  std::vector<std::uint8_t> watched(g.vertex_count(), 0);
  watched[x] = 1;
  for (Vertex y : g.neighbors(x)) watched[y] = 1;
  trace.energy.emplace_back(0.0, static_cast<double>(local_energy(g, init.values, x)));
  Simulation sim(g, rule, init, clock_seed, horizon);
  sim.advance_to(horizon, [&](const Flip& f, std::span<const double> state) {
    if (watched[f.vertex] == 0) return;
    if (f.vertex == x) {
      const auto delta = static_cast<double>(own_flip_delta(g, state, x, f.old_value));
      trace.own_delta.push_back(delta);
      for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        if (std::fabs(delta) >= eps_grid[e]) ++trace.n_eps[e];
      }
    }
    trace.energy.emplace_back(f.time, static_cast<double>(local_energy(g, state, x)));
  });
  return trace;
}

SlopeFit log_log_slope(std::span<const double> t, std::span<const double> y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < std::min(t.size(), y.size()); ++i) {
    if (t[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(t[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  SlopeFit fit;
  fit.points = lx.size();
  if (lx.size() < 2) return fit;
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  if (lx.size() > 2) {
    const double intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double r = ly[i] - intercept - fit.slope * lx[i];
      ssr += r * r;
    }
    fit.std_error = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return fit;
}

EnergyReport energy_report(const Graph& g, RuleKind rule, Vertex x, std::size_t replicas,
                           double horizon, std::span<const double> eps_grid,
                           std::span<const double> observe_times, std::uint64_t seed) {
  require_vertex(g, x);
  require_replicas(replicas);
  if (is_binary(rule)) throw std::invalid_argument("energy_report: rule must be real-valued");
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw std::invalid_argument("energy_report: eps must be > 0");
  }
  std::vector<double> obs(observe_times.begin(), observe_times.end());
  std::sort(obs.begin(), obs.end());
  for (double t : obs) {
    if (!(t >= 0.0 && t <= horizon)) throw std::invalid_argument("energy_report: observe time outside [0, horizon]");
  }

  struct ReplicaResult {
    std::vector<std::size_t> n_eps;
    std::vector<double> deviation;
    std::vector<double> energy;
    std::size_t own_flips = 0;
    std::size_t positive = 0;
    double max_delta = -INFINITY;
  };
  std::vector<ReplicaResult> results(replicas);
  detail::for_each_replica(replicas, [&](std::size_t, std::size_t r) {
    const std::uint64_t rs = replica_seed(seed, r);
    ReplicaResult& res = results[r];
    res.n_eps.assign(eps_grid.size(), 0);
    Simulation sim(g, rule, replica_init(g, rule, 0.0, rs), clock_seed_of(rs), horizon);
    auto observer = [&](const Flip& f, std::span<const double> state) {
      if (f.vertex != x) return;
      const auto delta = static_cast<double>(own_flip_delta(g, state, x, f.old_value));
      ++res.own_flips;
      res.max_delta = std::max(res.max_delta, delta);
      if (delta > 0.0) ++res.positive;
      for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        if (std::fabs(delta) >= eps_grid[e]) ++res.n_eps[e];
      }
    };
    for (double t : obs) {
      sim.advance_to(t, observer);
      res.deviation.push_back(std::fabs(sim.state()[x] - 0.5));
      res.energy.push_back(static_cast<double>(local_energy(g, sim.state(), x)));
    }
    sim.advance_to(horizon, observer);
  });

  EnergyReport out;
  out.graph = g.name();
  out.vertex = x;
  out.rule = rule;
  out.horizon = horizon;
  out.replicas = replicas;
  out.seed = seed;
  out.dimension = g.torus_dim();
  out.eps.assign(eps_grid.begin(), eps_grid.end());
  out.observe_times = obs;
  out.max_own_delta = -INFINITY;
  const double n = static_cast<double>(replicas);
  for (std::size_t e = 0; e < eps_grid.size(); ++e) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& res : results) {
      const auto c = static_cast<double>(res.n_eps[e]);
      sum += c;
      sum_sq += c * c;
    }
    const double mean = sum / n;
    const double var = replicas > 1 ? std::max(sum_sq - n * mean * mean, 0.0) / (n - 1.0) : 0.0;
    out.mean_n_eps.push_back(mean);
    out.se_n_eps.push_back(std::sqrt(var / n));
  }
  out.mean_abs_deviation.assign(obs.size(), 0.0);
  out.mean_energy.assign(obs.size(), 0.0);
  for (const auto& res : results) {
    out.own_flips += res.own_flips;
    out.positive_own_deltas += res.positive;
    out.max_own_delta = std::max(out.max_own_delta, res.max_delta);
    for (std::size_t k = 0; k < obs.size(); ++k) {
      out.mean_abs_deviation[k] += res.deviation[k] / n;
      out.mean_energy[k] += res.energy[k] / n;
    }
  }
  out.deviation_slope = log_log_slope(obs, out.mean_abs_deviation);
  out.energy_slope = log_log_slope(obs, out.mean_energy);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Vertex> bipartite_schedule(int m) {
  if (m < 1) throw std::invalid_argument("bipartite_schedule: m must be >= 1");
  std::vector<Vertex> schedule;
  schedule.push_back(0);
  for (int j = 0; j < m; ++j) schedule.push_back(static_cast<Vertex>(3 + j));
  schedule.push_back(0);
  return schedule;
}

BipartiteMonteCarlo bipartite_monte_carlo(double p, int m, std::size_t samples,
                                          std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bipartite_monte_carlo: p outside [0,1]");
  if (m < 1 || m % 2 == 0) throw std::invalid_argument("bipartite_monte_carlo: m must be odd");
  require_replicas(samples);
  const Graph g = build_complete_bipartite(3, m);
  const auto schedule = bipartite_schedule(m);
  const std::size_t steps = schedule.size() + 1;
  const std::size_t workers = detail::worker_count(samples);
  std::vector<std::vector<std::size_t>> ones(workers, std::vector<std::size_t>(steps, 0));
  detail::for_each_replica(samples, [&](std::size_t w, std::size_t r) {
    const OpinionConfig init = init_bernoulli(g, p, init_seed_of(replica_seed(seed, r)));
    const auto path = run_sequential(g, schedule, init);
    for (std::size_t k = 0; k < steps; ++k) {
      if (path[k].values[0] == 1.0) ++ones[w][k];
    }
  });
  BipartiteMonteCarlo out;
  out.m = m;
  out.p = p;
  out.samples = samples;
  for (std::size_t k = 0; k < steps; ++k) {
    std::size_t total = 0;
    for (const auto& o : ones) total += o[k];
    const double est = static_cast<double>(total) / static_cast<double>(samples);
    out.steps.push_back({est, binomial_se(est, samples)});
  }
  return out;
}

}  // namespace mdyn
