#pragma once

// Overlapping geometric intervals on Z. Customers arrive at every integer n
// with i.i.d. Geom(c) service times G_n (P(G = r) = (1 - c) c^r); B_i marks
// that some customer is present at time i. The residual coverage
//
//   W_i = max(W_{i-1} - 1, G_i),   B_i = 1[W_i > 0]
//
// is a Markov chain, which turns conditional probabilities given a finite
// history into a forward filter.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "combperc/lattice.hpp"

namespace combperc {

inline constexpr int kDefaultWMax = 60;

// Inversion: floor(log(u) / log(c)) for u in (0, 1].
int geometric_by_inversion(double c, double u);

// G_n drawn from a counter-based hash of (seed, stream, n), so any range of
// indices can be regenerated independently.
int geometric_at(double c, std::uint64_t seed, std::uint64_t stream, std::int64_t n);

// B for the indices of G: one-sided [n, n + G_n), or two-sided (n - G_n, n + G_n).
// Only intervals whose centres lie in the vector are counted.
std::vector<std::uint8_t> coverage_one_sided(const std::vector<int>& G);
std::vector<std::uint8_t> coverage_two_sided(const std::vector<int>& G);

// The residual-coverage chain for the same G (W starts from 0 before index 0).
std::vector<int> coverage_chain(const std::vector<int>& G);

// Coverage over `range`. Centres are drawn on the range extended by `burn_in`
// on the left (and on the right in two-sided mode), so values inside the range
// are exact unless some G exceeds the burn-in.
std::vector<std::uint8_t> sample_covered(double c, Range range, std::uint64_t seed,
                                         bool two_sided, int burn_in = kDefaultWMax);

class NullConditioningError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ConditionalValue {
  double probability = 0.0;
  double tail_error = 0.0;  // c^{W_max + 1} / (1 - c)
};

// P(W <= w) under the stationary law: prod_{k >= 0} (1 - c^{w + k + 1}).
double stationary_cdf(double c, int w);

// P(B_0 = 1) = 1 - prod_{n >= 0} (1 - c^{n+1}).
double stationary_coverage(double c);

// P(B_0 = 1 | B_{-m} .. B_{-1} = pattern), pattern listed oldest first, by a
// forward filter over W truncated at w_max and started from the stationary law.
ConditionalValue exact_conditional(const std::vector<std::uint8_t>& pattern, double c,
                                   int w_max = kDefaultWMax);

// Route through N = max{n >= 0 : G_{-n} >= n}, the age of the oldest customer
// still present: P(N = n) and P(B_0 = 1 | N = n).
double oldest_customer_pmf(double c, int n);
double coverage_given_oldest(double c, int n);
// sum_n P(N = n) P(B_0 = 1 | N = n), truncated where P(N > n) is negligible.
double coverage_via_oldest(double c);

struct BoundReport {
  double c = 0.0;
  double bound = 0.0;       // min(2c, 1)
  double tail_error = 0.0;
  double max_conditional = 0.0;
  std::vector<std::uint8_t> argmax_pattern;
  std::size_t patterns = 0;  // feasible patterns evaluated
  std::size_t null_patterns = 0;
  bool holds = true;         // max_conditional <= bound + tail_error
};

// Every 0/1 history of length 0..max_length.
BoundReport verify_2c_bound(double c, int max_length, int w_max = kDefaultWMax);

struct TwoSidedSplit {
  double parameter = 0.0;  // min(4 sqrt(c), 1)
  Range range;
  std::vector<std::uint8_t> covered;        // union of (n - G_n, n + G_n), G = min(L, R)
  std::vector<std::uint8_t> covered_left;   // union of (n - L_n, n]
  std::vector<std::uint8_t> covered_right;  // union of [n, n + R_n)
  bool inclusion_holds = true;
};

// Deterministic inclusion check for explicit L, R over the same index set;
// `range_offset` is the index of L[0].
TwoSidedSplit two_sided_from(const std::vector<int>& L, const std::vector<int>& R,
                             int range_offset);

// L, R i.i.d. Geom(sqrt c) on `range` extended by `burn_in` on both sides.
TwoSidedSplit two_sided_construction(double c, Range range, std::uint64_t seed,
                                     int burn_in = kDefaultWMax);

struct StickDominationReport {
  double c = 0.0;
  int checked_up_to = 0;  // largest k examined
  int first_violation = -1;
  bool holds = true;
};

// P((2G - 1)_+ > k) = c^{floor((k+1)/2) + 1} against P(Geom(sqrt c) > k) = sqrt(c)^{k+1},
// for every k until both tails drop below `tail_floor`.
StickDominationReport geom_stick_domination(double c, double tail_floor = 1e-12);

// Sequential coupling of the one-sided coverage process below i.i.d.
// Bernoulli(min(2c, 1)): B_i is drawn as 1[U_i < P(B_i = 1 | past)] and the
// dominating site as 1[U_i < min(2c, 1)], using the filter at every step.
struct SequentialCoupling {
  std::vector<std::uint8_t> coverage;
  std::vector<std::uint8_t> dominating;
  double max_conditional = 0.0;
  bool ordered = true;  // coverage <= dominating everywhere
};

SequentialCoupling sequential_domination_coupling(double c, std::size_t length,
                                                  std::uint64_t seed, int w_max = kDefaultWMax);

}  // namespace combperc
