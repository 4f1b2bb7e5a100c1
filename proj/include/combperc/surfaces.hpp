#pragma once

// Reachability sets S_n of r-open Lambda-paths, the stacked surfaces L_n just
// above them, and the good/bad classification of odd-height sites.
//
// Everything is computed from one occupation-time table: up-steps cost 1 when
// they land on an open site and 0 otherwise, down/diagonal steps cost 0, and
// every even-height site y is switched on at time y_d / 2. Then
//
//   z in S_n   <=>   T(z) <= n,        L_n(x) = min{ l : T((x,l)) > n }.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "combperc/fpp.hpp"
#include "combperc/lattice.hpp"

namespace combperc {

inline constexpr int kAboveWindow = std::numeric_limits<int>::max();

class BoundDivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lambda-step adjacency of a window in index space.
class LambdaGraph {
 public:
  explicit LambdaGraph(const LatticeWindow& window);

  const LatticeWindow& window() const { return window_; }

  // visit(u, w) for each step out of v: the up-step with weight
  // open(u) ? 1 : 0, then every in-window down/diagonal step with weight 0.
  template <class IsOpen, class Visit>
  void for_each_out(std::size_t v, IsOpen&& is_open, Visit&& visit) const {
    const Site z = window_.site(v);
    const int d = window_.dim();
    if (z[d - 1] + 1 < window_.vertical().hi) {
      const std::size_t up = v + 1;
      visit(up, is_open(up) ? 1.0 : 0.0);
    }
    if (z[d - 1] - 1 < window_.vertical().lo) return;
    for (const DownStep& s : down_) {
      bool inside = true;
      for (int a = 0; a + 1 < d && inside; ++a) {
        const int c = z[a] + s.shift[static_cast<std::size_t>(a)];
        inside = window_.range(a).contains(c);
      }
      if (inside) visit(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(v) + s.offset), 0.0);
    }
  }

 private:
  struct DownStep {
    std::array<int, kMaxDim> shift{};
    std::ptrdiff_t offset = 0;
  };
  LatticeWindow window_;
  std::vector<DownStep> down_;
};

struct OccupationField {
  LatticeWindow window;
  std::vector<double> T;

  double at(const Site& z) const { return T[window.index(z)]; }
};

// y_d / 2 at even heights, infinity at odd heights.
double lambda_source_time(int height);

OccupationField occupation_time_field(const PercolationField& field);

class SurfaceStack {
 public:
  SurfaceStack(OccupationField occupation, Range n_range, std::vector<int> heights,
               std::vector<std::uint8_t> certified);

  const LatticeWindow& window() const { return occupation_.window; }
  const LatticeWindow& horizontal() const { return horizontal_; }
  const OccupationField& occupation() const { return occupation_; }
  Range n_range() const { return n_range_; }

  // L_n(x), or kAboveWindow when no height in the window leaves S_n.
  int height(int n, const Site& x) const;
  bool certified(int n, const Site& x) const;
  std::size_t certified_count() const;

  // Drops certification wherever `reference` (computed on a larger window
  // agreeing with this one) reports a different value.
  void restrict_to_agreement(const SurfaceStack& reference);

 private:
  std::size_t slot(int n, const Site& x) const;

  OccupationField occupation_;
  LatticeWindow horizontal_;
  Range n_range_;
  std::vector<int> heights_;
  std::vector<std::uint8_t> certified_;
};

// Requires window bottom <= 2 * n_range.lo. Initially certified where x lies
// in the horizontal interior and L_n(x) in the vertical interior.
SurfaceStack surface_stack_from_T(const OccupationField& T, Range n_range);

// Stack on `field`, certified where it agrees with the stack on `reference`
// (a larger window sampled with the same seed).
SurfaceStack certified_stack(const PercolationField& field,
                             const PercolationField& reference, Range n_range);

// Samples the window and the window grown by its own padding (padding P
// against 2P) and certifies by agreement.
SurfaceStack sample_certified_stack(double p, std::uint64_t seed,
                                    const LatticeWindow& window, Range n_range);

// Exact S_n within `window` by exhaustive search over Lambda-paths from every
// source of height 2(n - r). With `enforce_distinct` the search carries the
// set of up-step endpoints used so far and forbids repeats; `budget` caps the
// number of search states.
std::vector<Site> reach_set_bruteforce(const PercolationField& field, int n,
                                       const LatticeWindow& window, bool enforce_distinct,
                                       std::size_t budget = 20'000'000);

enum class SiteClass : std::uint8_t { kUnclassified, kGood, kBad };

class GoodBadField {
 public:
  GoodBadField(LatticeWindow window, std::vector<SiteClass> classes,
               std::vector<std::uint8_t> certified);

  const LatticeWindow& window() const { return window_; }
  SiteClass at(const Site& z) const { return classes_[window_.index(z)]; }
  bool is_bad(const Site& z) const { return at(z) == SiteClass::kBad; }
  bool certified(const Site& z) const { return certified_[window_.index(z)] != 0; }
  std::vector<Site> bad_sites(bool certified_only = true) const;

 private:
  LatticeWindow window_;
  std::vector<SiteClass> classes_;
  std::vector<std::uint8_t> certified_;
};

// (x, 2n+1) is bad iff T((x, 2n+1)) <= n, i.e. iff L_n(x) != 2n+1. Uses the
// stack's own table.
GoodBadField classify_good_bad(const SurfaceStack& stack);

// (L1) open, (L2) Lipschitz, (L3) L_n > 2n and (L4) L_{n-1} < L_n, checked at
// every certified (n, x); a pair condition is checked when both ends are certified.
struct StackInvariantReport {
  std::size_t checked = 0;
  std::size_t l1 = 0, l2 = 0, l3 = 0, l4 = 0;  // violation counts
  std::vector<std::string> examples;           // first few violations, human readable
  bool ok() const { return l1 + l2 + l3 + l4 == 0; }
};

StackInvariantReport check_stack_invariants(const SurfaceStack& stack, const PercolationField& field);

// (Kq)^h / ((1-q)(1-K^2 q)^2) with K = 3^{d-1} + 2; an upper bound on
// P(L_0(0) > h). Throws BoundDivergenceError unless q < K^{-2}.
double tail_bound_L(int h, double q, int d);

}  // namespace combperc
