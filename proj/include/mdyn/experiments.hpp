#ifndef MDYN_EXPERIMENTS_HPP
#define MDYN_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdyn/engine.hpp"
#include "mdyn/graph.hpp"
#include "mdyn/randomness.hpp"
#include "mdyn/rules.hpp"

namespace mdyn {

/// sqrt(p (1 - p) / n)
[[nodiscard]] double binomial_se(double p, std::size_t n);

/// Seed of replica r under a top-level seed. Clocks and initial opinions of
/// the replica are derived from it with distinct stream tags.
[[nodiscard]] std::uint64_t replica_seed(std::uint64_t seed, std::size_t r);

enum class Verdict { Consistent, Inconsistent };
[[nodiscard]] std::string_view to_string(Verdict v);

// ---------------------------------------------------------------------------
// Marginals

struct MarginalEstimate {
  std::string graph;
  Vertex vertex = 0;
  double t = 0.0;
  /// alpha for real-valued rules, p for binary ones.
  double threshold = 0.0;
  std::size_t replicas = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

/// Fraction of independent replicas with eta_t(x) <= alpha (real rules,
/// uniform initial opinions) or xi_t(x) = 1 (binary rules, Bernoulli(p)
/// initial opinions).
MarginalEstimate estimate_marginal(const Graph& g, RuleKind rule, Vertex x, double t,
                                   double threshold, std::size_t replicas, std::uint64_t seed);

/// Every (t, threshold) cell from one set of replicas; each replica is run
/// once to max(times). Result is ordered time-major.
std::vector<MarginalEstimate> estimate_marginal_grid(const Graph& g, RuleKind rule, Vertex x,
                                                     std::span<const double> times,
                                                     std::span<const double> thresholds,
                                                     std::size_t replicas, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pathwise couplings

struct PathwiseReport {
  bool pass = true;
  std::size_t checks = 0;
  struct Site {
    double threshold = 0.0;
    double time = 0.0;
    Vertex vertex = 0;
  };
  /// First divergence (coupling) or violation (domination).
  std::optional<Site> failure;
};

/// Runs median dynamics from eta0 and, for each p, majority dynamics from
/// threshold_project(eta0, p) on the same log; the thresholded median path
/// must equal the majority path flip for flip.
PathwiseReport check_coupling(const Graph& g, const EventLog& log, const OpinionConfig& eta0,
                              std::span<const double> p_grid);
/// Same check against an arbitrary binary update (negative controls).
PathwiseReport check_coupling(const Graph& g, const EventLog& log, const OpinionConfig& eta0,
                              std::span<const double> p_grid, const UpdateFn& majority);

/// Shifts values in [0, alpha) up by beta and values in [beta, beta + alpha)
/// down by beta; everything else is unchanged.
OpinionConfig swap_construction(const OpinionConfig& eta0, double alpha, double beta);

/// Runs median dynamics from eta0 and from swap_construction(eta0, alpha,
/// beta) on the same log and checks, at every vertex after every event,
/// that eta in [0, alpha) implies xi in [beta, beta + alpha).
PathwiseReport check_domination(const Graph& g, const EventLog& log, double alpha, double beta,
                                const OpinionConfig& eta0);

// ---------------------------------------------------------------------------
// Conjecture scans. These measure; they never prove.

struct ScanResult {
  std::vector<MarginalEstimate> estimates;
  /// Successive differences (monotonicity) or second divided differences
  /// (convexity), with their propagated standard errors.
  std::vector<double> statistic;
  std::vector<double> statistic_se;
  Verdict verdict = Verdict::Consistent;
};

/// t -> mu_t(x)(threshold) should not increase; an increase larger than three
/// pooled standard errors makes the verdict Inconsistent.
ScanResult monotonicity_scan(const Graph& g, RuleKind rule, Vertex x, double threshold,
                             std::span<const double> t_grid, std::size_t replicas,
                             std::uint64_t seed);

/// p -> P[xi^p_t(x) = 1] on p_grid within [0, 1/2] should be convex; a second
/// divided difference below -3 standard errors makes the verdict Inconsistent.
/// Throws std::invalid_argument for fewer than 3 grid points.
ScanResult unimodality_scan(const Graph& g, RuleKind rule, Vertex x, double t,
                            std::span<const double> p_grid, std::size_t replicas,
                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Fixation and limits

struct FixationReport {
  double horizon = 0.0;
  double window = 0.0;
  std::size_t trajectories = 0;
  /// Flips per vertex summed over trajectories.
  std::vector<std::size_t> flips_per_vertex;
  /// Number of (trajectory, vertex) pairs with a given flip count.
  std::map<std::size_t, std::size_t> flip_count_distribution;
  /// Last-flip times over [0, horizon] in equal bins; vertices that never
  /// flip are counted in never_flipped.
  std::vector<std::size_t> last_flip_histogram;
  std::size_t never_flipped = 0;
  /// Fraction of non-frozen (trajectory, vertex) pairs with no flip in
  /// [horizon - window, horizon].
  double fixation_fraction = 0.0;
  std::size_t max_flips = 0;
};

FixationReport fixation_report(std::span<const Trajectory> trajectories, const Graph& g,
                               double window, std::size_t bins = 20);

/// Streaming counterpart: replicas of `rule` from uniform (or Bernoulli(p)
/// for binary rules) initial opinions, without storing trajectories.
FixationReport fixation_run(const Graph& g, RuleKind rule, double horizon, double window,
                            std::size_t replicas, std::uint64_t seed, double p = 0.5,
                            std::size_t bins = 20);

struct WindowCheck {
  double alpha = 0.0;
  double beta = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct TailPoint {
  double alpha = 0.0;
  double estimate = 0.0;
  double ratio = 0.0;
};

struct LimitHistogram {
  std::string graph;
  Vertex vertex = 0;
  double horizon = 0.0;
  double window = 0.0;
  std::size_t replicas = 0;
  /// Replicas whose vertex flipped inside the trailing window; excluded from
  /// every estimate below.
  std::size_t rejected = 0;
  std::size_t accepted = 0;
  std::vector<std::size_t> histogram;
  std::vector<WindowCheck> windows;
  std::vector<TailPoint> tail;
  std::uint64_t seed = 0;
  [[nodiscard]] bool pass() const;
};

/// Median dynamics on a 2-d torus: distribution of eta_horizon(x), the
/// (beta - alpha)^4 lower-bound check on each window and the measured ratio
/// P[eta in [0, a]] / a^4 at each tail point.
LimitHistogram limit_histogram(const Graph& g, Vertex x, std::size_t replicas, double horizon,
                               double window, std::size_t bins,
                               std::span<const std::pair<double, double>> windows,
                               std::span<const double> tail_alphas, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Energy

/// Sum over neighbors y of |state[y] - state[x]|, accumulated in extended
/// precision (exact for opinions on the 2^-53 grid).
[[nodiscard]] long double local_energy(const Graph& g, std::span<const double> state, Vertex x);

struct EnergyTrace {
  Vertex vertex = 0;
  /// H at x right after each flip of x or of a neighbor, with its time.
  std::vector<std::pair<double, double>> energy;
  /// Energy change caused by each own flip of x.
  std::vector<double> own_delta;
  /// N_eps for each entry of the eps grid.
  std::vector<std::size_t> n_eps;
};

EnergyTrace energy_trace(const Graph& g, RuleKind rule, const OpinionConfig& init,
                         std::uint64_t clock_seed, double horizon, Vertex x,
                         std::span<const double> eps_grid);

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log y against log t over points with t, y > 0.
SlopeFit log_log_slope(std::span<const double> t, std::span<const double> y);

struct EnergyReport {
  std::string graph;
  Vertex vertex = 0;
  RuleKind rule = RuleKind::MedianCoins;
  double horizon = 0.0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  std::vector<double> eps;
  std::vector<double> mean_n_eps;
  std::vector<double> se_n_eps;
  std::size_t own_flips = 0;
  /// Largest own-flip energy change seen; <= 0 when the median property holds.
  double max_own_delta = 0.0;
  std::size_t positive_own_deltas = 0;
  std::vector<double> observe_times;
  std::vector<double> mean_abs_deviation;
  std::vector<double> mean_energy;
  SlopeFit deviation_slope;
  SlopeFit energy_slope;
  /// Dimension of the torus; the bound on E[N_eps] is dim / eps.
  int dimension = 0;
};

EnergyReport energy_report(const Graph& g, RuleKind rule, Vertex x, std::size_t replicas,
                           double horizon, std::span<const double> eps_grid,
                           std::span<const double> observe_times, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sequential K_{3,m} counterexample

/// The schedule (1,1), (2,1), ..., (2,m), (1,1) on build_complete_bipartite(3, m).
std::vector<Vertex> bipartite_schedule(int m);

struct SequenceEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct BipartiteMonteCarlo {
  int m = 0;
  double p = 0.0;
  std::size_t samples = 0;
  /// P[(1,1) = 1] after each step 0..m+2.
  std::vector<SequenceEstimate> steps;
};

BipartiteMonteCarlo bipartite_monte_carlo(double p, int m, std::size_t samples,
                                          std::uint64_t seed);

}  // namespace mdyn

#endif  // MDYN_EXPERIMENTS_HPP
