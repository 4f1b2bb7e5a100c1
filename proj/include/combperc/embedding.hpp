#pragma once

// The comb embedding: sticks and balls, the coordinate change that turns the
// odd-height layers into a lattice of their own, the perpendicular surface H
// built there, and the map
//
//   x(z) = (z_1 + H(z_2, .., z_{d-1}, 2 z_d + 1), z_2, .., z_{d-1}),
//   f(z) = (x(z), L_{z_d}(x(z))),
//
// together with a checker for the embedding contract in Z^d_[M].

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "combperc/lattice.hpp"
#include "combperc/surfaces.hpp"

namespace combperc {

// S(x, r) = { x + a e_d : |a| < r }; empty for r <= 0.
std::vector<Site> stick_members(const Site& x, int r);
// B(y, r) = { z : ||z - y||_inf < r }.
bool in_ball(const Site& z, const Site& y, int r);

class NotLipschitzError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Integer function on a box of Z^{d-1} with |h(x) - h(x')| <= 1 whenever
// ||x - x'||_inf = 1. Checked once, at construction.
class LipschitzFunction {
 public:
  LipschitzFunction(LatticeWindow domain, std::vector<int> values);

  const LatticeWindow& domain() const { return domain_; }
  int operator()(const Site& x) const { return values_[domain_.index(x)]; }

 private:
  LatticeWindow domain_;
  std::vector<int> values_;
};

struct StickBallResult {
  int stick_radius = 0;        // 2r - 1, the stick that controls B(y, r)
  bool stick_avoided = true;   // graph misses S(y, 2r - 1)
  bool ball_avoided = true;    // graph misses B(y, r)
};

// The tested law is stick_avoided => ball_avoided, for y above the domain.
StickBallResult stick_ball_check(const LipschitzFunction& h, const Site& y, int r);

// (m, v, 2n + 1) -> (v, n, m) and back.
Site transform_coords(const Site& z);
Site inverse_transform_coords(const Site& w);

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// H over u = (v, 2n + 1), stored on the transformed horizontal box of (v, n).
class PerpSurface {
 public:
  PerpSurface() = default;
  PerpSurface(LatticeWindow domain, std::vector<int> values, std::vector<std::uint8_t> certified);

  // Transformed horizontal box (v, n), including its padding band.
  const LatticeWindow& domain() const { return domain_; }

  // u = (v, 2n + 1) in original coordinates.
  bool covers(const Site& u) const;
  int value(const Site& u) const;
  bool certified(const Site& u) const;
  void set_value(const Site& u, int h);

  // u for a transformed horizontal point (v, n).
  static Site original_point(const Site& vn);
  static Site transformed_point(const Site& u);

  std::size_t certified_count() const;

 private:
  LatticeWindow domain_;
  std::vector<int> values_;
  std::vector<std::uint8_t> certified_;
};

// Region of the odd-height layers handed to the perpendicular construction:
// original horizontal ranges and a range of layers n (heights 2n + 1).
struct PerpRegion {
  std::vector<Range> horizontal;
  Range layers;
};

// Relabels the odd-height sites of `region` by transform_coords, treats bad and
// uncertified sites as closed, and takes the minimal surface L'_0 there. The
// transformed window carries padding 2 * padding; values are certified where
// they agree with the same construction on the window shrunk to `padding`.
// Requires the region's first horizontal range to contain 0.
PerpSurface build_perpendicular_surface(const GoodBadField& classes, const PerpRegion& region,
                                        int padding);

struct PerpInvariantReport {
  std::size_t checked = 0;
  std::size_t h1 = 0, h2 = 0;
  std::vector<std::string> examples;
  bool ok() const { return h1 + h2 == 0; }
};

// (H1) (H(u), u) is good; (H2) |H(u) - H(u')| <= 1 when |u_{d-1} - u'_{d-1}| <= 2
// and the other coordinates differ by at most 1; at certified points.
PerpInvariantReport check_perp_invariants(const PerpSurface& H, const GoodBadField& classes);

// Box of comb vertices. Fin edges (z, z + e_i), i < d, join every pair inside
// the box; backbone edges (z, z + e_d) only where z_1 = 0.
struct CombWindow {
  LatticeWindow box;

  int dim() const { return box.dim(); }
  bool contains_backbone() const { return box.range(0).contains(0); }
  // visit(z, z', is_backbone)
  template <class Visit>
  void for_each_edge(Visit&& visit) const {
    const int d = dim();
    for (std::size_t i = 0; i < box.volume(); ++i) {
      const Site z = box.site(i);
      for (int a = 0; a < d; ++a) {
        if (a == d - 1 && z[0] != 0) continue;
        const Site w = z + unit_vector(d, a);
        if (box.contains(w)) visit(z, w, a == d - 1);
      }
    }
  }
};

CombWindow make_comb_window(std::vector<Range> ranges);

struct CombEmbedding {
  CombWindow comb;
  std::vector<Site> x;       // x(z), indexed by comb.box.index(z)
  std::vector<Site> image;   // f(z)
  std::vector<Site> backbone_failures;  // z with z_1 = 0 and L_{z_d}(x(z)) != 2 z_d + 1

  const Site& at(const Site& z) const { return image[comb.box.index(z)]; }
};

// With `strict`, a backbone identity failure throws EmbeddingError; otherwise it
// is recorded. Any uncertified H or L value needed by the map throws.
CombEmbedding embed_comb(const SurfaceStack& stack, const PerpSurface& H, const CombWindow& comb,
                         bool strict = true);

struct Violation {
  std::string kind;  // "closed", "outside", "collision", "adjacency", "backbone"
  Site z;
  Site other;
  std::string detail;
};

struct EmbeddingReport {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  int fin_max_distance = 0;
  int backbone_max_distance = 0;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

EmbeddingReport verify_embedding(const CombEmbedding& f, const PercolationField& field, int M = 2);

// z_1..z_d, f_1..f_d per row.
void write_embedding_csv(std::ostream& os, const CombEmbedding& f);

}  // namespace combperc
