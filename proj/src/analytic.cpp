#include "mdyn/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdyn::analytic {

namespace {

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " outside [0,1]");
}

void require_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
}

long double ipow(long double base, int e) {
  long double out = 1.0L;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

void require_interval_parity(int i, int j, int k) {
  if ((i != 0 && i != 1) || (j != 0 && j != 1)) {
    throw std::invalid_argument("interval: boundary opinions must be bits");
  }
  if (k < 1) throw std::invalid_argument("interval: length must be >= 1");
  if ((i == j) != (k % 2 == 1)) {
    throw std::invalid_argument("interval: length must be odd iff boundary opinions agree");
  }
}

}  // namespace

unsigned __int128 binomial_exact(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int i = 0; i < k; ++i) {
    unsigned __int128 prod;
    if (__builtin_mul_overflow(c, static_cast<unsigned __int128>(n - i), &prod)) {
      throw std::overflow_error("binomial_exact: coefficient exceeds 128 bits");
    }
    c = prod / static_cast<unsigned __int128>(i + 1);
  }
  return c;
}

long double binomial(int n, int k) { return static_cast<long double>(binomial_exact(n, k)); }

double binomial_upper_tail(int n, int k, double a) {
  require_unit(a, "binomial_upper_tail: probability");
  long double sum = 0.0L;
  for (int j = std::max(k, 0); j <= n; ++j) {
    sum += binomial(n, j) * ipow(a, j) * ipow(1.0L - a, n - j);
  }
  return static_cast<double>(sum);
}

double mu_kn_odd(int n, double alpha, double t) {
  if (n < 0) throw std::invalid_argument("mu_kn_odd: n must be >= 0");
  require_unit(alpha, "mu_kn_odd: alpha");
  require_time(t);
  const double quiet = std::exp(-t);
  return quiet * alpha + (1.0 - quiet) * binomial_upper_tail(2 * n + 1, n + 1, alpha);
}

double mu_kn_even(int n, double alpha, double t) {
  if (n < 1) throw std::invalid_argument("mu_kn_even: n must be >= 1");
  require_unit(alpha, "mu_kn_even: alpha");
  require_time(t);
  const double quiet = std::exp(-t);
  const long double tie =
      0.5L * binomial(2 * n, n) * ipow(static_cast<long double>(alpha) * (1.0L - alpha), n);
  const double rung = binomial_upper_tail(2 * n, n + 1, alpha) + static_cast<double>(tie);
  return quiet * alpha + (1.0 - quiet) * rung;
}

double mu_kn_odd_dalpha(int n, double alpha, double t) {
  const double quiet = std::exp(-t);
  return quiet + (1.0 - quiet) * telescoped_s(n, alpha);
}

double mu_kn_even_dalpha(int n, double alpha, double t) {
  if (n < 1) throw std::invalid_argument("mu_kn_even_dalpha: n must be >= 1");
  require_unit(alpha, "mu_kn_even_dalpha: alpha");
  const double quiet = std::exp(-t);
  const long double core = binomial(2 * n, n) * (static_cast<long double>(n) / 2.0L) *
                           ipow(static_cast<long double>(alpha) * (1.0L - alpha), n - 1);
  return quiet + (1.0 - quiet) * static_cast<double>(core);
}

double direct_s(int n, double alpha) {
  if (n < 0) throw std::invalid_argument("direct_s: n must be >= 0");
  require_unit(alpha, "direct_s: alpha");
  const int big = 2 * n + 1;
  const long double a = alpha;
  const long double b = 1.0L - a;
  long double sum = 0.0L;
  for (int k = n + 1; k <= big; ++k) {
    long double term = k * ipow(a, k - 1) * ipow(b, big - k);
    if (big - k > 0) term -= (big - k) * ipow(a, k) * ipow(b, big - 1 - k);
    sum += binomial(big, k) * term;
  }
  return static_cast<double>(sum);
}

double telescoped_s(int n, double alpha) {
  if (n < 0) throw std::invalid_argument("telescoped_s: n must be >= 0");
  require_unit(alpha, "telescoped_s: alpha");
  const long double a = alpha;
  return static_cast<double>(binomial(2 * n + 1, n + 1) * (n + 1) * ipow(a * (1.0L - a), n));
}

double direct_sbar(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("direct_sbar: n must be >= 1");
  require_unit(alpha, "direct_sbar: alpha");
  const int big = 2 * n;
  const long double a = alpha;
  const long double b = 1.0L - a;
  long double sum = 0.0L;
  for (int k = n + 1; k <= big; ++k) {
    long double term = k * ipow(a, k - 1) * ipow(b, big - k);
    if (big - k > 0) term -= (big - k) * ipow(a, k) * ipow(b, big - 1 - k);
    sum += binomial(big, k) * term;
  }
  return static_cast<double>(sum);
}

double telescoped_sbar(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("telescoped_sbar: n must be >= 1");
  require_unit(alpha, "telescoped_sbar: alpha");
  const long double a = alpha;
  return static_cast<double>(n * a * binomial(2 * n, n) * ipow(a * (1.0L - a), n - 1));
}

double p_z(double p, double t) {
  require_unit(p, "p_z: p");
  require_time(t);
  return 3.0 * p * p - 2.0 * p * p * p - std::exp(-t) * p * (1.0 - p) * (2.0 * p - 1.0);
}

double f_interval(int i, int j, int k, double t) {
  require_interval_parity(i, j, k);
  require_time(t);
  if (i != j) return k / 2.0;
  if (k == 1) return i == 1 ? 1.0 : 0.0;
  if (i == 1) return (k + 3) / 2.0 - std::exp(-t);
  return (k - 3) / 2.0 + std::exp(-t);
}

double interval_prob(int i, int j, int k, double p) {
  require_interval_parity(i, j, k);
  require_unit(p, "interval_prob: p");
  const long double q = static_cast<long double>(p) * (1.0L - p);
  if (i != j) return static_cast<double>(k * ipow(q, k / 2 + 1));
  const long double end = i == 1 ? p : 1.0L - p;
  return static_cast<double>(k * end * end * end * ipow(q, (k - 1) / 2));
}

namespace {

// Sum over k of the interval series with per-(i,j,k) weight w(i,j,k).
template <class Weight>
SeriesValue interval_series(double p, int k_max, Weight&& weight) {
  require_unit(p, "interval series: p");
  const double q = p * (1.0 - p);
  const double r = std::sqrt(q);
  SeriesValue out;
  long double sum = 0.0L;
  int k = 1;
  while (true) {
    if (k_max > 0 && k > k_max) break;
    if (k_max == 0 && k > 1 && std::pow(q, k / 2.0) < 1e-16) break;
    if (k % 2 == 1) {
      sum += interval_prob(1, 1, k, p) * weight(1, 1, k);
      sum += interval_prob(0, 0, k, p) * weight(0, 0, k);
    } else {
      sum += interval_prob(0, 1, k, p) * weight(0, 1, k);
      sum += interval_prob(1, 0, k, p) * weight(1, 0, k);
    }
    ++k;
  }
  const int last = k - 1;
  out.value = static_cast<double>(sum);
  out.terms = last;
  // Each remaining k contributes at most 2 k r^(k-1) (weights lie in [0,1]).
  if (r > 0.0) {
    const double rk = std::pow(r, last);
    out.tail_bound = 2.0 * ((last + 1) * rk - last * rk * r) / ((1.0 - r) * (1.0 - r));
  }
  return out;
}

}  // namespace

SeriesValue interval_total_mass(double p, int k_max) {
  return interval_series(p, k_max, [](int, int, int) { return 1.0; });
}

SeriesValue interval_reconstruction(double p, double t, int k_max) {
  require_time(t);
  return interval_series(p, k_max, [t](int i, int j, int k) { return f_interval(i, j, k, t) / k; });
}

BipartiteSequence bipartite_sequence(double p, int m) {
  require_unit(p, "bipartite_sequence: p");
  if (m < 1 || m % 2 == 0) throw std::invalid_argument("bipartite_sequence: m must be odd and >= 1");
  BipartiteSequence s;
  s.p0 = p;
  s.p1 = binomial_upper_tail(m, (m + 1) / 2, p);
  s.p_final = p * p + 2.0 * s.p1 * p * (1.0 - p);
  return s;
}

int lehner_f(const std::array<int, 7>& x) {
  int weighted = 5 * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) weighted += x[i];
  return weighted > 5 ? 1 : 0;
}

double lehner_expectation(double p) {
  require_unit(p, "lehner_expectation: p");
  return p * (1.0 - std::pow(1.0 - p, 6)) + (1.0 - p) * std::pow(p, 6);
}

}  // namespace mdyn::analytic
