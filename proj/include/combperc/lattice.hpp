#pragma once

// Lattice geometry shared by every other module: integer sites, finite
// windows with a padding margin, seeded site-percolation fields, and the
// step set of Lambda-paths.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace combperc {

inline constexpr int kMaxDim = 6;

// A point of Z^d. Coordinates past `dim` are kept at zero so that the
// defaulted comparisons are meaningful.
struct Site {
  std::array<int, kMaxDim> coord{};
  int dim = 0;

  Site() = default;
  explicit Site(int d);
  Site(std::initializer_list<int> values);

  int& operator[](int i) { return coord[static_cast<std::size_t>(i)]; }
  int operator[](int i) const { return coord[static_cast<std::size_t>(i)]; }
  int last() const { return coord[static_cast<std::size_t>(dim - 1)]; }
  int& last() { return coord[static_cast<std::size_t>(dim - 1)]; }

  friend auto operator<=>(const Site&, const Site&) = default;
};

Site operator+(const Site& a, const Site& b);
Site operator-(const Site& a, const Site& b);

// Drops the last coordinate: (x_1..x_{d-1}, x_d) -> (x_1..x_{d-1}).
Site horizontal_part(const Site& z);
// Appends a last coordinate: (x, h) -> (x_1..x_{d-1}, h).
Site with_height(const Site& x, int height);
Site unit_vector(int d, int axis);

int linf_norm(const Site& z);
int linf_distance(const Site& a, const Site& b);
std::string to_string(const Site& z);

struct SiteHash {
  std::size_t operator()(const Site& z) const noexcept;
};

// Half-open integer range [lo, hi).
struct Range {
  int lo = 0;
  int hi = 0;

  int size() const { return hi - lo; }
  bool empty() const { return hi <= lo; }
  bool contains(int v) const { return v >= lo && v < hi; }
  friend bool operator==(const Range&, const Range&) = default;
};

// Finite box of Z^d. Axis d-1 is vertical; the others are horizontal.
// The certified interior is the box shrunk by `padding` on every side.
class LatticeWindow {
 public:
  LatticeWindow() = default;
  LatticeWindow(std::vector<Range> ranges, int padding);

  int dim() const { return static_cast<int>(ranges_.size()); }
  const Range& range(int axis) const {
    return ranges_[static_cast<std::size_t>(axis)];
  }
  const std::vector<Range>& ranges() const { return ranges_; }
  const Range& vertical() const { return ranges_.back(); }
  int padding() const { return padding_; }

  std::size_t volume() const { return volume_; }
  bool contains(const Site& z) const;
  bool in_interior(const Site& z) const;
  bool on_boundary(const Site& z) const;

  // Row-major, last coordinate fastest.
  std::size_t index(const Site& z) const;
  Site site(std::size_t index) const;
  std::size_t stride(int axis) const {
    return strides_[static_cast<std::size_t>(axis)];
  }

  // Same interior, padding grown by `margin` (extents grow by `margin` per side).
  LatticeWindow expanded(int margin) const;
  // Same interior, padding shrunk by `margin`.
  LatticeWindow shrunk(int margin) const;
  // The certified interior as a window of its own (padding 0).
  LatticeWindow interior() const;

  // The (d-1)-dimensional box of horizontal coordinates, padding preserved.
  LatticeWindow horizontal() const;

  friend bool operator==(const LatticeWindow& a, const LatticeWindow& b) {
    return a.ranges_ == b.ranges_ && a.padding_ == b.padding_;
  }

 private:
  std::vector<Range> ranges_;
  std::vector<std::size_t> strides_;
  int padding_ = 0;
  std::size_t volume_ = 0;
};

// Window of a single dimension-d box without the "d >= 2" and padding rules;
// used for horizontal slices and comb index sets.
LatticeWindow make_box(std::vector<Range> ranges);

// Uniform in [0,1) attached to a site by a counter-based hash of
// (seed, dimension, coordinates). Overlapping windows sampled with the same
// seed therefore agree site by site.
double site_uniform(std::uint64_t seed, const Site& z);

class PercolationField {
 public:
  PercolationField() = default;
  // Explicit states (1 = open), indexed by `window.index`. `p` is kept as
  // metadata only; hand-built fields may pass NaN.
  PercolationField(LatticeWindow window, std::vector<std::uint8_t> open,
                   double p, std::uint64_t seed);

  const LatticeWindow& window() const { return window_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  bool is_open(const Site& z) const;
  bool open_at(std::size_t index) const { return open_[index] != 0; }
  void set_open(const Site& z, bool open);
  std::size_t open_count() const;
  std::span<const std::uint8_t> states() const { return open_; }

 private:
  LatticeWindow window_;
  std::vector<std::uint8_t> open_;
  double p_ = 0.0;
  std::uint64_t seed_ = 0;
};

// I.i.d. Bernoulli(p) site states; open iff site_uniform(seed, z) < p.
PercolationField sample_field(double p, const LatticeWindow& window,
                              std::uint64_t seed);

// Every site open (p = 1) or closed (p = 0); convenience for tests and demos.
PercolationField uniform_field(const LatticeWindow& window, bool open);

// Neighbourhood of the spread-out lattice Z^d_[M].
bool spread_out_adjacent(const Site& x, const Site& y, int M);

// Site x of the coarse lattice is occupied iff the cube kx + [0,k)^d holds an
// open site. Window bounds must be multiples of k.
PercolationField coarse_grain(const PercolationField& field, int k);

// {e_d} followed by the 3^{d-1} down/diagonal steps, alpha in lexicographic
// order over {-1,0,1}^{d-1}.
std::vector<Site> lambda_steps(int d);

// 3^{d-1} + 2: down-step directions plus two states of an up-step.
int path_branching_constant(int d);

}  // namespace combperc
