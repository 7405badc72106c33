#ifndef MDYN_ANALYTIC_HPP
#define MDYN_ANALYTIC_HPP

#include <array>
#include <cstdint>

namespace mdyn::analytic {

/// Exact C(n, k) in 128-bit arithmetic; throws std::overflow_error past the
/// representable range (n <= 128 is always safe).
[[nodiscard]] unsigned __int128 binomial_exact(int n, int k);
[[nodiscard]] long double binomial(int n, int k);

/// P[Bin(n, a) >= k], summed term by term in extended precision.
[[nodiscard]] double binomial_upper_tail(int n, int k, double a);

/// Marginal P[eta_t(x) < alpha] for median dynamics on K_N, N = 2n + 1.
[[nodiscard]] double mu_kn_odd(int n, double alpha, double t);
/// Same for N = 2n, n >= 1 (ties among the first ringer's pool split 1/2).
[[nodiscard]] double mu_kn_even(int n, double alpha, double t);
/// d/d alpha of mu_kn_even in closed form.
[[nodiscard]] double mu_kn_even_dalpha(int n, double alpha, double t);
/// d/d alpha of mu_kn_odd in closed form.
[[nodiscard]] double mu_kn_odd_dalpha(int n, double alpha, double t);

/// Derivative sum for the odd complete graph: literal summation and its
/// telescoped closed form C(2n+1, n+1) (n+1) [a(1-a)]^n.
[[nodiscard]] double direct_s(int n, double alpha);
[[nodiscard]] double telescoped_s(int n, double alpha);
/// Even counterpart; closed form n a C(2n, n) [a(1-a)]^(n-1), n >= 1.
[[nodiscard]] double direct_sbar(int n, double alpha);
[[nodiscard]] double telescoped_sbar(int n, double alpha);

/// P[xi^p_t(0) = 1] for majority dynamics on Z.
[[nodiscard]] double p_z(double p, double t);

/// Expected number of ones at time t inside an alternating interval of
/// length k whose boundary opinions are i (left) and j (right). Requires k odd
/// iff i == j.
[[nodiscard]] double f_interval(int i, int j, int k, double t);

/// Probability that the origin lies in an alternating interval of type (i,j,k).
[[nodiscard]] double interval_prob(int i, int j, int k, double p);

struct SeriesValue {
  double value = 0.0;
  /// Upper bound on the magnitude of the truncated remainder.
  double tail_bound = 0.0;
  int terms = 0;
};

/// sum over admissible (i,j,k) of interval_prob(i,j,k,p).
[[nodiscard]] SeriesValue interval_total_mass(double p, int k_max = 0);
/// sum over admissible (i,j,k) of interval_prob * f_interval / k; equals p_z.
/// With k_max = 0 the series stops once (p(1-p))^(k/2) < 1e-16.
[[nodiscard]] SeriesValue interval_reconstruction(double p, double t, int k_max = 0);

struct BipartiteSequence {
  double p0 = 0.0;
  double p1 = 0.0;
  /// Value after the final update of the distinguished vertex (step m + 2).
  double p_final = 0.0;
  [[nodiscard]] bool monotone() const {
    return (p0 <= p1 && p1 <= p_final) || (p0 >= p1 && p1 >= p_final);
  }
};

/// Probability that (1,1) holds opinion 1 along the K_{3,m} schedule
/// (1,1), (2,1), ..., (2,m), (1,1). m must be odd.
[[nodiscard]] BipartiteSequence bipartite_sequence(double p, int m);

/// 1 iff 5 x_1 + x_2 + ... + x_7 > 5.
[[nodiscard]] int lehner_f(const std::array<int, 7>& x);
/// E_p[lehner_f] in closed form.
[[nodiscard]] double lehner_expectation(double p);

}  // namespace mdyn::analytic

#endif  // MDYN_ANALYTIC_HPP
