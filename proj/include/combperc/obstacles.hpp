#pragma once

// Obstacles A_y: the odd-height sites z that the anchor y (even height) reaches
// by a ((z_d - y_d - 1)/2)-open Lambda-path. In first-passage terms, with y the
// only source (switched on at y_d / 2) and the usual up/down passage rule,
//
//   z in A_y   <=>   T_y(z) <= (z_d - 1) / 2.
//
// The union over all anchors is exactly the bad set, and replacing each A_y by
// an independent copy can only make the union larger in law.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "combperc/lattice.hpp"
#include "combperc/surfaces.hpp"

namespace combperc {

struct Obstacle {
  Site anchor;
  std::vector<Site> members;  // sorted
  int radius = 0;             // smallest r with A_y inside the open ball B(y, r)
  bool certified = true;      // false when a member touches the window boundary
};

// Single-source occupation times from y over the field's window.
std::vector<double> single_source_times(const PercolationField& field, const Site& y);

Obstacle obstacle_at(const PercolationField& field, const Site& y);

// 0 for an empty set, otherwise max ||z - y||_inf + 1.
int obstacle_radius(const std::vector<Site>& members, const Site& y);

// Anchor-centred window: horizontal [y_i - half_width, y_i + half_width],
// vertical [y_d - half_width, y_d + half_width].
LatticeWindow obstacle_window(const Site& y, int half_width);

// Samples a fresh environment around y and grows the window (doubling the
// half-width up to `max_half_width`) until the obstacle is certified.
Obstacle sample_obstacle(double p, std::uint64_t seed, const Site& y, int half_width = 6,
                         int max_half_width = 96);

// Every even-height site of the window whose obstacle can reach into the
// window, i.e. all even-height sites below the top row.
std::vector<Site> window_anchors(const LatticeWindow& window);

std::vector<Obstacle> obstacles_in_window(const PercolationField& field);

struct BadSetReport {
  bool identical = true;
  std::size_t compared = 0;           // certified odd-height sites compared
  std::vector<Site> bad_not_covered;  // bad but in no obstacle
  std::vector<Site> covered_not_bad;  // in some obstacle but good
};

// Compares the bad set of `classes` with the union of `obstacles` on the
// certified odd-height sites of `classes`.
BadSetReport bad_set_identity_check(const GoodBadField& classes,
                                    const std::vector<Obstacle>& obstacles);

// Builds the stack, the classification and every obstacle on the field's
// window and compares them.
BadSetReport bad_set_identity_check(const PercolationField& field);

class SeedCollisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Each anchor gets its own environment on `window`, seeded by a hash of
// (base seed, anchor).
struct IndependentObstacleSampler {
  double p = 1.0;
  std::uint64_t base_seed = 0;
  LatticeWindow window;

  std::uint64_t anchor_seed(const Site& y) const;
};

std::vector<Obstacle> sample_independent_obstacles(const IndependentObstacleSampler& sampler,
                                                   const std::vector<Site>& anchors);

// sqrt(q) / ((1 - sqrt q)(1 - K sqrt q)^2) and K sqrt(q).
struct RadiusBoundConstants {
  double A = 0.0;
  double a = 0.0;
  double c = 0.0;  // max(A, a)
};

RadiusBoundConstants radius_bound_constants(double q, int d);

// c^{r+1} with c = max(A, a); an upper bound on P(R_y > r). Throws
// BoundDivergenceError unless K sqrt(q) < 1.
double radius_tail_bound(int r, double q, int d);

// An increasing functional of a set of sites (the caller vouches for
// monotonicity under inclusion).
struct SetFunctional {
  std::string name;
  std::function<double(const std::vector<Site>&)> evaluate;
};

SetFunctional count_in_window(const LatticeWindow& region);
SetFunctional indicator_of(const Site& z);

struct DominationSettings {
  double p = 0.97;
  std::uint64_t seed = 1;
  std::size_t trials = 10'000;
  LatticeWindow computation;  // dependent field and every independent copy live here
  LatticeWindow region;       // sites outside are ignored by the functionals
};

struct FunctionalEstimate {
  std::string name;
  double dependent_mean = 0.0;
  double dependent_se = 0.0;
  double independent_mean = 0.0;
  double independent_se = 0.0;
  bool flagged = false;  // dependent mean above independent mean + 3 combined SE
};

struct DominationReport {
  std::size_t trials = 0;
  std::vector<FunctionalEstimate> functionals;
  bool any_flagged() const;
};

// Default computational setting: a 9x9 region with heights [0, 9) inside a
// window padded by 4 on every side.
DominationSettings default_domination_settings(double p, std::uint64_t seed, std::size_t trials);

// Monte Carlo estimates of E F(union A_y) against E F(union of independent
// copies), one fresh dependent field and one fresh independent family per
// trial. Anchors above the region cannot contribute and are skipped.
DominationReport domination_evidence(const DominationSettings& settings,
                                     const std::vector<SetFunctional>& functionals);

}  // namespace combperc
