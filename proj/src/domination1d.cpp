#include "combperc/domination1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "combperc/rng.hpp"

namespace combperc {

namespace {

constexpr double kProductFloor = 1e-18;

void check_c(double c) {
  if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("coverage parameter c must lie in [0, 1)");
}

std::vector<double> stationary_pmf(double c, int w_max) {
  // P(W = w) = c^w P(W <= w); differencing the cdf would cancel near 1.
  std::vector<double> pi(static_cast<std::size_t>(w_max) + 1);
  for (int w = 0; w <= w_max; ++w) pi[static_cast<std::size_t>(w)] = std::pow(c, w) * stationary_cdf(c, w);
  return pi;
}

// One step of W -> max(W - 1, G), truncated at w_max (mass of G > w_max dropped).
std::vector<double> step_chain(const std::vector<double>& alpha, double c) {
  const int w_max = static_cast<int>(alpha.size()) - 1;
  std::vector<double> geom(alpha.size());
  for (int w = 0; w <= w_max; ++w) geom[static_cast<std::size_t>(w)] = (1.0 - c) * std::pow(c, w);
  std::vector<double> next(alpha.size(), 0.0);
  for (int w = 0; w <= w_max; ++w) {
    const double mass = alpha[static_cast<std::size_t>(w)];
    if (mass == 0.0) continue;
    const int m = w - 1;
    if (m >= 0) next[static_cast<std::size_t>(m)] += mass * (1.0 - std::pow(c, m + 1));
    for (int u = std::max(m + 1, 0); u <= w_max; ++u) {
      next[static_cast<std::size_t>(u)] += mass * geom[static_cast<std::size_t>(u)];
    }
  }
  return next;
}

// Keeps the states consistent with B = b and renormalizes; false on a null event.
bool condition_on(std::vector<double>& alpha, std::uint8_t b) {
  double total = 0.0;
  for (std::size_t w = 0; w < alpha.size(); ++w) {
    if ((w > 0) != (b != 0)) alpha[w] = 0.0;
    total += alpha[w];
  }
  if (!(total > 0.0)) return false;
  for (double& a : alpha) a /= total;
  return true;
}

double predict_covered(const std::vector<double>& alpha, double c) {
  // W' = max(W - 1, G) > 0 surely when W >= 2, otherwise iff G > 0.
  double total = 0.0, covered = 0.0;
  for (std::size_t w = 0; w < alpha.size(); ++w) {
    total += alpha[w];
    covered += alpha[w] * (w >= 2 ? 1.0 : c);
  }
  return covered / total;
}

std::vector<std::uint8_t> slice(const std::vector<std::uint8_t>& v, std::size_t from,
                                std::size_t count) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from),
          v.begin() + static_cast<std::ptrdiff_t>(from + count)};
}

}  // namespace

int geometric_by_inversion(double c, double u) {
  if (c <= 0.0 || u >= 1.0) return 0;
  if (!(u > 0.0)) throw std::invalid_argument("geometric_by_inversion: u must lie in (0, 1]");
  const double g = std::floor(std::log(u) / std::log(c));
  return g >= static_cast<double>(std::numeric_limits<int>::max() / 4)
             ? std::numeric_limits<int>::max() / 4
             : static_cast<int>(g);
}

int geometric_at(double c, std::uint64_t seed, std::uint64_t stream, std::int64_t n) {
  const double u = 1.0 - to_unit_interval(hash_words(seed, {stream, static_cast<std::uint64_t>(n)}));
  return geometric_by_inversion(c, u);
}

std::vector<std::uint8_t> coverage_one_sided(const std::vector<int>& G) {
  const std::size_t size = G.size();
  std::vector<std::uint8_t> B(size, 0);
  for (std::size_t n = 0; n < size; ++n) {
    const std::size_t end = std::min(size, n + static_cast<std::size_t>(std::max(G[n], 0)));
    for (std::size_t i = n; i < end; ++i) B[i] = 1;
  }
  return B;
}

std::vector<std::uint8_t> coverage_two_sided(const std::vector<int>& G) {
  const auto size = static_cast<std::ptrdiff_t>(G.size());
  std::vector<std::uint8_t> B(G.size(), 0);
  for (std::ptrdiff_t n = 0; n < size; ++n) {
    const std::ptrdiff_t g = G[static_cast<std::size_t>(n)];
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, n - g + 1); i < std::min(size, n + g); ++i) {
      B[static_cast<std::size_t>(i)] = 1;
    }
  }
  return B;
}

std::vector<int> coverage_chain(const std::vector<int>& G) {
  std::vector<int> W(G.size());
  int w = 0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    w = std::max(w - 1, G[i]);
    W[i] = w;
  }
  return W;
}

std::vector<std::uint8_t> sample_covered(double c, Range range, std::uint64_t seed, bool two_sided,
                                         int burn_in) {
  check_c(c);
  if (range.empty()) return {};
  const int lo = range.lo - burn_in;
  const int hi = two_sided ? range.hi + burn_in : range.hi;
  std::vector<int> G;
  G.reserve(static_cast<std::size_t>(hi - lo));
  for (int n = lo; n < hi; ++n) G.push_back(geometric_at(c, seed, 0, n));
  const auto B = two_sided ? coverage_two_sided(G) : coverage_one_sided(G);
  return slice(B, static_cast<std::size_t>(burn_in), static_cast<std::size_t>(range.size()));
}

double stationary_cdf(double c, int w) {
  check_c(c);
  if (w < 0) return 0.0;
  double prod = 1.0;
  for (int k = 0;; ++k) {
    const double term = std::pow(c, w + k + 1);
    prod *= 1.0 - term;
    if (term < kProductFloor) break;
  }
  return prod;
}

double stationary_coverage(double c) { return 1.0 - stationary_cdf(c, 0); }

ConditionalValue exact_conditional(const std::vector<std::uint8_t>& pattern, double c, int w_max) {
  check_c(c);
  if (w_max < 1) throw std::invalid_argument("exact_conditional: w_max must be at least 1");
  std::vector<double> alpha = stationary_pmf(c, w_max);
  for (std::uint8_t b : pattern) {
    alpha = step_chain(alpha, c);
    if (!condition_on(alpha, b)) {
      throw NullConditioningError("exact_conditional: history has probability zero");
    }
  }
  ConditionalValue out;
  out.probability = predict_covered(alpha, c);
  out.tail_error = std::pow(c, w_max + 1) / (1.0 - c);
  return out;
}

double oldest_customer_pmf(double c, int n) {
  check_c(c);
  if (n < 0) return 0.0;
  double prod = std::pow(c, n);
  for (int j = n + 1;; ++j) {
    const double term = std::pow(c, j);
    prod *= 1.0 - term;
    if (term < kProductFloor) break;
  }
  return prod;
}

double coverage_given_oldest(double c, int n) {
  check_c(c);
  double none_earlier = 1.0;
  for (int j = 0; j < n; ++j) none_earlier *= 1.0 - std::pow(c, j + 1);
  return c + (1.0 - c) * (1.0 - none_earlier);
}

double coverage_via_oldest(double c) {
  check_c(c);
  double total = 0.0;
  for (int n = 0;; ++n) {
    total += oldest_customer_pmf(c, n) * coverage_given_oldest(c, n);
    if (std::pow(c, n) < kProductFloor) break;
  }
  return total;
}

BoundReport verify_2c_bound(double c, int max_length, int w_max) {
  BoundReport r;
  r.c = c;
  r.bound = std::min(2.0 * c, 1.0);
  r.tail_error = std::pow(c, w_max + 1) / (1.0 - c);
  for (int len = 0; len <= max_length; ++len) {
    for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
      std::vector<std::uint8_t> pattern(static_cast<std::size_t>(len));
      for (int j = 0; j < len; ++j) pattern[static_cast<std::size_t>(j)] = (bits >> j) & 1u;
      try {
        const double v = exact_conditional(pattern, c, w_max).probability;
        ++r.patterns;
        if (v > r.max_conditional) {
          r.max_conditional = v;
          r.argmax_pattern = pattern;
        }
      } catch (const NullConditioningError&) {
        ++r.null_patterns;
      }
    }
  }
  r.holds = r.max_conditional <= r.bound + r.tail_error;
  return r;
}

TwoSidedSplit two_sided_from(const std::vector<int>& L, const std::vector<int>& R, int range_offset) {
  if (L.size() != R.size()) throw std::invalid_argument("two_sided_from: L and R differ in length");
  const auto size = static_cast<std::ptrdiff_t>(L.size());
  TwoSidedSplit s;
  s.range = {range_offset, range_offset + static_cast<int>(size)};
  std::vector<int> G(L.size());
  for (std::size_t n = 0; n < L.size(); ++n) G[n] = std::min(L[n], R[n]);
  s.covered = coverage_two_sided(G);
  s.covered_left.assign(L.size(), 0);
  s.covered_right = coverage_one_sided(R);
  for (std::ptrdiff_t n = 0; n < size; ++n) {
    const std::ptrdiff_t l = L[static_cast<std::size_t>(n)];
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, n - l + 1); i <= n && l > 0; ++i) {
      s.covered_left[static_cast<std::size_t>(i)] = 1;
    }
  }
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (s.covered[i] && !s.covered_left[i] && !s.covered_right[i]) s.inclusion_holds = false;
  }
  return s;
}

TwoSidedSplit two_sided_construction(double c, Range range, std::uint64_t seed, int burn_in) {
  check_c(c);
  const double root = std::sqrt(c);
  std::vector<int> L, R;
  for (int n = range.lo - burn_in; n < range.hi + burn_in; ++n) {
    L.push_back(geometric_at(root, seed, 1, n));
    R.push_back(geometric_at(root, seed, 2, n));
  }
  TwoSidedSplit full = two_sided_from(L, R, range.lo - burn_in);
  TwoSidedSplit s;
  s.parameter = std::min(4.0 * root, 1.0);
  s.range = range;
  const auto from = static_cast<std::size_t>(burn_in);
  const auto count = static_cast<std::size_t>(range.size());
  s.covered = slice(full.covered, from, count);
  s.covered_left = slice(full.covered_left, from, count);
  s.covered_right = slice(full.covered_right, from, count);
  s.inclusion_holds = full.inclusion_holds;
  return s;
}

StickDominationReport geom_stick_domination(double c, double tail_floor) {
  check_c(c);
  StickDominationReport r;
  r.c = c;
  const double root = std::sqrt(c);
  for (int k = 0; k < 1'000'000; ++k) {
    const double stretched = std::pow(c, (k + 1) / 2 + 1);
    const double target = std::pow(root, k + 1);
    if (stretched < tail_floor && target < tail_floor) break;
    r.checked_up_to = k;
    if (stretched > target && r.first_violation < 0) {
      r.first_violation = k;
      r.holds = false;
    }
  }
  return r;
}

SequentialCoupling sequential_domination_coupling(double c, std::size_t length, std::uint64_t seed,
                                                  int w_max) {
  check_c(c);
  const double bound = std::min(2.0 * c, 1.0);
  SequentialCoupling s;
  s.coverage.resize(length);
  s.dominating.resize(length);
  SplitMix64 rng(hash_words(seed, {0x5e9ULL}));
  std::vector<double> alpha = stationary_pmf(c, w_max);
  for (std::size_t i = 0; i < length; ++i) {
    const double p = predict_covered(alpha, c);
    s.max_conditional = std::max(s.max_conditional, p);
    const double u = rng.uniform();
    s.coverage[i] = u < p ? 1 : 0;
    s.dominating[i] = u < bound ? 1 : 0;
    if (s.coverage[i] > s.dominating[i]) s.ordered = false;
    alpha = step_chain(alpha, c);
    condition_on(alpha, s.coverage[i]);
  }
  return s;
}

}  // namespace combperc
