#include "combperc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "combperc/rng.hpp"

namespace combperc {

Site::Site(int d) : dim(d) {
  if (d < 1 || d > kMaxDim) {
    throw std::invalid_argument("Site: dimension out of range");
  }
}

Site::Site(std::initializer_list<int> values)
    : Site(static_cast<int>(values.size())) {
  std::copy(values.begin(), values.end(), coord.begin());
}

namespace {

void require_same_dim(const Site& a, const Site& b) {
  if (a.dim != b.dim) throw std::invalid_argument("site dimension mismatch");
}

}  // namespace

Site operator+(const Site& a, const Site& b) {
  require_same_dim(a, b);
  Site r(a.dim);
  for (int i = 0; i < a.dim; ++i) r[i] = a[i] + b[i];
  return r;
}

Site operator-(const Site& a, const Site& b) {
  require_same_dim(a, b);
  Site r(a.dim);
  for (int i = 0; i < a.dim; ++i) r[i] = a[i] - b[i];
  return r;
}

Site horizontal_part(const Site& z) {
  Site x(z.dim - 1);
  for (int i = 0; i + 1 < z.dim; ++i) x[i] = z[i];
  return x;
}

Site with_height(const Site& x, int height) {
  Site z(x.dim + 1);
  for (int i = 0; i < x.dim; ++i) z[i] = x[i];
  z[x.dim] = height;
  return z;
}

Site unit_vector(int d, int axis) {
  Site e(d);
  e[axis] = 1;
  return e;
}

int linf_norm(const Site& z) {
  int m = 0;
  for (int i = 0; i < z.dim; ++i) m = std::max(m, std::abs(z[i]));
  return m;
}

int linf_distance(const Site& a, const Site& b) { return linf_norm(a - b); }

std::string to_string(const Site& z) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < z.dim; ++i) {
    if (i) os << ',';
    os << z[i];
  }
  os << ')';
  return os.str();
}

std::size_t SiteHash::operator()(const Site& z) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(z.dim);
  for (int i = 0; i < z.dim; ++i) {
    h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(z[i])));
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// LatticeWindow

LatticeWindow::LatticeWindow(std::vector<Range> ranges, int padding)
    : ranges_(std::move(ranges)), padding_(padding) {
  if (ranges_.empty() || static_cast<int>(ranges_.size()) > kMaxDim) {
    throw std::invalid_argument("LatticeWindow: dimension out of range");
  }
  if (padding_ < 0) throw std::invalid_argument("LatticeWindow: negative padding");
  strides_.assign(ranges_.size(), 1);
  volume_ = 1;
  for (std::size_t i = ranges_.size(); i-- > 0;) {
    const Range& r = ranges_[i];
    if (r.empty()) throw std::invalid_argument("LatticeWindow: empty range");
    if (r.size() <= 2 * padding_) {
      throw std::invalid_argument(
          "LatticeWindow: padding leaves an empty certified interior");
    }
    strides_[i] = volume_;
    volume_ *= static_cast<std::size_t>(r.size());
  }
}

LatticeWindow make_box(std::vector<Range> ranges) {
  return LatticeWindow(std::move(ranges), 0);
}

bool LatticeWindow::contains(const Site& z) const {
  if (z.dim != dim()) return false;
  for (int i = 0; i < z.dim; ++i) {
    if (!range(i).contains(z[i])) return false;
  }
  return true;
}

bool LatticeWindow::in_interior(const Site& z) const {
  if (z.dim != dim()) return false;
  for (int i = 0; i < z.dim; ++i) {
    const Range& r = range(i);
    if (z[i] < r.lo + padding_ || z[i] >= r.hi - padding_) return false;
  }
  return true;
}

bool LatticeWindow::on_boundary(const Site& z) const {
  if (!contains(z)) return false;
  for (int i = 0; i < z.dim; ++i) {
    if (z[i] == range(i).lo || z[i] == range(i).hi - 1) return true;
  }
  return false;
}

std::size_t LatticeWindow::index(const Site& z) const {
  std::size_t idx = 0;
  for (int i = 0; i < z.dim; ++i) {
    idx += static_cast<std::size_t>(z[i] - range(i).lo) * stride(i);
  }
  return idx;
}

Site LatticeWindow::site(std::size_t index) const {
  Site z(dim());
  for (int i = 0; i < dim(); ++i) {
    const std::size_t s = stride(i);
    z[i] = range(i).lo + static_cast<int>(index / s);
    index %= s;
  }
  return z;
}

LatticeWindow LatticeWindow::expanded(int margin) const {
  std::vector<Range> r = ranges_;
  for (Range& x : r) {
    x.lo -= margin;
    x.hi += margin;
  }
  return LatticeWindow(std::move(r), padding_ + margin);
}

LatticeWindow LatticeWindow::shrunk(int margin) const {
  if (margin > padding_) {
    throw std::invalid_argument("LatticeWindow::shrunk: margin exceeds padding");
  }
  return expanded(-margin);
}

LatticeWindow LatticeWindow::interior() const { return shrunk(padding_); }

LatticeWindow LatticeWindow::horizontal() const {
  if (dim() < 2) throw std::logic_error("horizontal(): window has no horizontal axes");
  std::vector<Range> r(ranges_.begin(), ranges_.end() - 1);
  return LatticeWindow(std::move(r), padding_);
}

// ---------------------------------------------------------------------------
// Percolation fields

double site_uniform(std::uint64_t seed, const Site& z) {
  std::uint64_t h = hash_combine(splitmix64(seed), static_cast<std::uint64_t>(z.dim));
  for (int i = 0; i < z.dim; ++i) {
    h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(z[i])));
  }
  return to_unit_interval(h);
}

PercolationField::PercolationField(LatticeWindow window,
                                   std::vector<std::uint8_t> open, double p,
                                   std::uint64_t seed)
    : window_(std::move(window)), open_(std::move(open)), p_(p), seed_(seed) {
  if (window_.dim() < 2) {
    throw std::invalid_argument("PercolationField: dimension must be at least 2");
  }
  if (open_.size() != window_.volume()) {
    throw std::invalid_argument("PercolationField: state count does not match window");
  }
  for (auto& s : open_) s = s ? 1 : 0;
}

bool PercolationField::is_open(const Site& z) const {
  if (!window_.contains(z)) {
    throw std::out_of_range("PercolationField: site " + to_string(z) +
                            " outside window");
  }
  return open_[window_.index(z)] != 0;
}

void PercolationField::set_open(const Site& z, bool open) {
  if (!window_.contains(z)) {
    throw std::out_of_range("PercolationField: site " + to_string(z) +
                            " outside window");
  }
  open_[window_.index(z)] = open ? 1 : 0;
}

std::size_t PercolationField::open_count() const {
  return static_cast<std::size_t>(std::count(open_.begin(), open_.end(), 1));
}

PercolationField sample_field(double p, const LatticeWindow& window,
                              std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("sample_field: p must lie in [0,1]");
  }
  std::vector<std::uint8_t> open(window.volume());
  for (std::size_t i = 0; i < open.size(); ++i) {
    open[i] = site_uniform(seed, window.site(i)) < p ? 1 : 0;
  }
  return PercolationField(window, std::move(open), p, seed);
}

PercolationField uniform_field(const LatticeWindow& window, bool open) {
  return PercolationField(window, std::vector<std::uint8_t>(window.volume(), open ? 1 : 0),
                          open ? 1.0 : 0.0, 0);
}

bool spread_out_adjacent(const Site& x, const Site& y, int M) {
  if (M < 1) throw std::invalid_argument("spread_out_adjacent: M must be >= 1");
  const int dist = linf_distance(x, y);
  return dist > 0 && dist <= M;
}

namespace {

int floor_div(int a, int k) { return a >= 0 ? a / k : -((-a + k - 1) / k); }
bool divisible(int a, int k) { return ((a % k) + k) % k == 0; }

}  // namespace

PercolationField coarse_grain(const PercolationField& field, int k) {
  if (k < 1) throw std::invalid_argument("coarse_grain: k must be >= 1");
  const LatticeWindow& w = field.window();
  std::vector<Range> coarse;
  for (const Range& r : w.ranges()) {
    if (!divisible(r.lo, k) || !divisible(r.hi, k)) {
      throw std::invalid_argument("coarse_grain: window bounds not divisible by k");
    }
    coarse.push_back({floor_div(r.lo, k), floor_div(r.hi, k)});
  }
  LatticeWindow cw(std::move(coarse), w.padding() / k);
  std::vector<std::uint8_t> occupied(cw.volume(), 0);
  for (std::size_t i = 0; i < w.volume(); ++i) {
    if (!field.open_at(i)) continue;
    Site z = w.site(i);
    for (int a = 0; a < z.dim; ++a) z[a] = floor_div(z[a], k);
    occupied[cw.index(z)] = 1;
  }
  const double p_cell =
      1.0 - std::pow(1.0 - field.p(), std::pow(static_cast<double>(k), w.dim()));
  return PercolationField(std::move(cw), std::move(occupied), p_cell, field.seed());
}

std::vector<Site> lambda_steps(int d) {
  if (d < 2 || d > kMaxDim) throw std::invalid_argument("lambda_steps: need 2 <= d <= 6");
  std::vector<Site> steps;
  steps.push_back(unit_vector(d, d - 1));
  int count = 1;
  for (int i = 0; i < d - 1; ++i) count *= 3;
  for (int code = 0; code < count; ++code) {
    Site v(d);
    int c = code;
    for (int i = d - 2; i >= 0; --i) {
      v[i] = c % 3 - 1;
      c /= 3;
    }
    v[d - 1] = -1;
    steps.push_back(v);
  }
  return steps;
}

int path_branching_constant(int d) {
  int k = 1;
  for (int i = 0; i < d - 1; ++i) k *= 3;
  return k + 2;
}

}  // namespace combperc
