#include "combperc/embedding.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <ostream>

namespace combperc {

namespace {

// Every offset in {-1, 0, 1}^k except zero.
std::vector<Site> neighbour_offsets(int k) {
  std::vector<Site> out;
  int total = 1;
  for (int i = 0; i < k; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    Site s(k);
    int rest = code;
    bool zero = true;
    for (int i = k - 1; i >= 0; --i) {
      s[i] = rest % 3 - 1;
      rest /= 3;
      zero = zero && s[i] == 0;
    }
    if (!zero) out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<Site> stick_members(const Site& x, int r) {
  std::vector<Site> out;
  for (int a = -(r - 1); a <= r - 1; ++a) {
    Site z = x;
    z.last() += a;
    out.push_back(z);
  }
  return out;
}

bool in_ball(const Site& z, const Site& y, int r) { return linf_distance(z, y) < r; }

LipschitzFunction::LipschitzFunction(LatticeWindow domain, std::vector<int> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_.volume()) {
    throw std::invalid_argument("LipschitzFunction: value count does not match the domain");
  }
  const std::vector<Site> offsets = neighbour_offsets(domain_.dim());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Site x = domain_.site(i);
    for (const Site& o : offsets) {
      const Site y = x + o;
      if (domain_.contains(y) && std::abs(values_[domain_.index(y)] - values_[i]) > 1) {
        throw NotLipschitzError("function is not 1-Lipschitz between " + to_string(x) + " and " +
                                to_string(y));
      }
    }
  }
}

StickBallResult stick_ball_check(const LipschitzFunction& h, const Site& y, int r) {
  const LatticeWindow& dom = h.domain();
  if (y.dim != dom.dim() + 1) throw std::invalid_argument("stick_ball_check: dimension mismatch");
  const Site yh = horizontal_part(y);
  if (!dom.contains(yh)) throw std::invalid_argument("stick_ball_check: y must lie above the domain");
  StickBallResult res;
  res.stick_radius = 2 * r - 1;
  if (r <= 0) return res;
  res.stick_avoided = std::abs(h(yh) - y.last()) >= res.stick_radius;
  // The ball meets the graph iff some x within r - 1 of y-hat has |h(x) - y_d| < r.
  std::vector<Range> box;
  for (int a = 0; a < dom.dim(); ++a) {
    box.push_back({std::max(dom.range(a).lo, yh[a] - r + 1), std::min(dom.range(a).hi, yh[a] + r)});
  }
  const LatticeWindow near = make_box(std::move(box));
  for (std::size_t i = 0; i < near.volume() && res.ball_avoided; ++i) {
    if (std::abs(h(near.site(i)) - y.last()) < r) res.ball_avoided = false;
  }
  return res;
}

Site transform_coords(const Site& z) {
  const int d = z.dim;
  if (d < 2) throw std::invalid_argument("transform_coords: dimension must be at least 2");
  if (z.last() % 2 == 0) throw std::invalid_argument("transform_coords: last coordinate must be odd");
  Site w(d);
  for (int i = 1; i + 1 < d; ++i) w[i - 1] = z[i];
  w[d - 2] = (z.last() - 1) / 2;
  w[d - 1] = z[0];
  return w;
}

Site inverse_transform_coords(const Site& w) {
  const int d = w.dim;
  if (d < 2) throw std::invalid_argument("inverse_transform_coords: dimension must be at least 2");
  Site z(d);
  z[0] = w[d - 1];
  for (int i = 1; i + 1 < d; ++i) z[i] = w[i - 1];
  z[d - 1] = 2 * w[d - 2] + 1;
  return z;
}

// ---------------------------------------------------------------------------
// Perpendicular surface

PerpSurface::PerpSurface(LatticeWindow domain, std::vector<int> values,
                         std::vector<std::uint8_t> certified)
    : domain_(std::move(domain)), values_(std::move(values)), certified_(std::move(certified)) {
  if (values_.size() != domain_.volume() || certified_.size() != domain_.volume()) {
    throw std::invalid_argument("PerpSurface: table size mismatch");
  }
}

Site PerpSurface::transformed_point(const Site& u) {
  if (u.last() % 2 == 0) throw std::invalid_argument("PerpSurface: u must have odd last coordinate");
  Site vn = u;
  vn.last() = (u.last() - 1) / 2;
  return vn;
}

Site PerpSurface::original_point(const Site& vn) {
  Site u = vn;
  u.last() = 2 * vn.last() + 1;
  return u;
}

bool PerpSurface::covers(const Site& u) const {
  return u.dim == domain_.dim() && u.last() % 2 != 0 && domain_.contains(transformed_point(u));
}

int PerpSurface::value(const Site& u) const {
  if (!covers(u)) throw std::out_of_range("PerpSurface: u outside the domain");
  return values_[domain_.index(transformed_point(u))];
}

bool PerpSurface::certified(const Site& u) const {
  return covers(u) && certified_[domain_.index(transformed_point(u))] != 0;
}

void PerpSurface::set_value(const Site& u, int h) {
  if (!covers(u)) throw std::out_of_range("PerpSurface: u outside the domain");
  values_[domain_.index(transformed_point(u))] = h;
}

std::size_t PerpSurface::certified_count() const {
  return static_cast<std::size_t>(std::count(certified_.begin(), certified_.end(), 1));
}

PerpSurface build_perpendicular_surface(const GoodBadField& classes, const PerpRegion& region,
                                        int padding) {
  const int d = classes.window().dim();
  if (static_cast<int>(region.horizontal.size()) != d - 1) {
    throw std::invalid_argument("perpendicular surface: region dimension mismatch");
  }
  if (padding < 1) throw std::invalid_argument("perpendicular surface: padding must be positive");
  if (!region.horizontal[0].contains(0) && region.horizontal[0].lo > 0) {
    throw EmbeddingError("perpendicular surface: first-coordinate range must reach down to 0");
  }
  std::vector<Range> ranges;
  for (int i = 1; i + 1 < d; ++i) ranges.push_back(region.horizontal[static_cast<std::size_t>(i)]);
  ranges.push_back(region.layers);
  ranges.push_back(region.horizontal[0]);

  LatticeWindow big, small;
  try {
    big = LatticeWindow(ranges, 2 * padding);
    small = big.shrunk(padding);
  } catch (const std::invalid_argument&) {
    throw EmbeddingError("perpendicular surface: transformed window too small");
  }

  auto transformed_field = [&](const LatticeWindow& w) {
    std::vector<std::uint8_t> open(w.volume(), 0);
    for (std::size_t i = 0; i < w.volume(); ++i) {
      const Site z = inverse_transform_coords(w.site(i));
      open[i] = classes.window().contains(z) && classes.at(z) == SiteClass::kGood &&
                classes.certified(z);
    }
    return PercolationField(w, std::move(open), std::numeric_limits<double>::quiet_NaN(), 0);
  };

  const SurfaceStack outer = surface_stack_from_T(occupation_time_field(transformed_field(big)), {0, 1});
  SurfaceStack inner = surface_stack_from_T(occupation_time_field(transformed_field(small)), {0, 1});
  inner.restrict_to_agreement(outer);

  const LatticeWindow& dom = inner.horizontal();
  std::vector<int> values(dom.volume());
  std::vector<std::uint8_t> certified(dom.volume());
  for (std::size_t i = 0; i < dom.volume(); ++i) {
    const Site vn = dom.site(i);
    values[i] = inner.height(0, vn);
    certified[i] = inner.certified(0, vn) ? 1 : 0;
  }
  return PerpSurface(dom, std::move(values), std::move(certified));
}

PerpInvariantReport check_perp_invariants(const PerpSurface& H, const GoodBadField& classes) {
  PerpInvariantReport r;
  const LatticeWindow& dom = H.domain();
  const std::vector<Site> offsets = neighbour_offsets(dom.dim());
  auto note = [&](std::size_t& counter, const std::string& what) {
    ++counter;
    if (r.examples.size() < 8) r.examples.push_back(what);
  };
  for (std::size_t i = 0; i < dom.volume(); ++i) {
    const Site vn = dom.site(i);
    const Site u = PerpSurface::original_point(vn);
    if (!H.certified(u)) continue;
    ++r.checked;
    const int h = H.value(u);
    Site z(u.dim + 1);
    z[0] = h;
    for (int a = 0; a < u.dim; ++a) z[a + 1] = u[a];
    if (!classes.window().contains(z) || classes.at(z) != SiteClass::kGood) {
      note(r.h1, "H1 at u=" + to_string(u) + " H=" + std::to_string(h));
    }
    for (const Site& o : offsets) {
      const Site u2 = PerpSurface::original_point(vn + o);
      if (H.certified(u2) && std::abs(H.value(u2) - h) > 1) {
        note(r.h2, "H2 between u=" + to_string(u) + " and u'=" + to_string(u2));
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Comb map

CombWindow make_comb_window(std::vector<Range> ranges) {
  CombWindow comb{make_box(std::move(ranges))};
  if (comb.dim() < 2) throw std::invalid_argument("comb window: dimension must be at least 2");
  if (!comb.contains_backbone()) {
    throw std::invalid_argument("comb window: first-coordinate range must contain the backbone");
  }
  return comb;
}

CombEmbedding embed_comb(const SurfaceStack& stack, const PerpSurface& H, const CombWindow& comb,
                         bool strict) {
  const int d = comb.dim();
  if (stack.window().dim() != d) throw std::invalid_argument("embed_comb: dimension mismatch");
  CombEmbedding f;
  f.comb = comb;
  f.x.resize(comb.box.volume());
  f.image.resize(comb.box.volume());
  for (std::size_t i = 0; i < comb.box.volume(); ++i) {
    const Site z = comb.box.site(i);
    const int n = z.last();
    Site u(d - 1);
    for (int a = 1; a + 1 < d; ++a) u[a - 1] = z[a];
    u.last() = 2 * n + 1;
    if (!H.certified(u)) {
      throw EmbeddingError("embed_comb: perpendicular surface not available at u=" + to_string(u));
    }
    Site x(d - 1);
    x[0] = z[0] + H.value(u);
    for (int a = 1; a + 1 < d; ++a) x[a] = z[a];
    if (!stack.certified(n, x)) {
      throw EmbeddingError("embed_comb: image escapes the certified stack at z=" + to_string(z));
    }
    const int L = stack.height(n, x);
    f.x[i] = x;
    f.image[i] = with_height(x, L);
    if (z[0] == 0 && L != 2 * n + 1) {
      if (strict) {
        throw EmbeddingError("embed_comb: backbone identity fails at z=" + to_string(z) +
                             " (L=" + std::to_string(L) + ")");
      }
      f.backbone_failures.push_back(z);
    }
  }
  return f;
}

EmbeddingReport verify_embedding(const CombEmbedding& f, const PercolationField& field, int M) {
  EmbeddingReport r;
  const LatticeWindow& box = f.comb.box;
  r.vertices = box.volume();
  std::map<Site, Site> owner;
  for (std::size_t i = 0; i < box.volume(); ++i) {
    const Site z = box.site(i);
    const Site& img = f.image[i];
    if (!field.window().contains(img)) {
      r.violations.push_back({"outside", z, img, "image outside the field window"});
    } else if (!field.is_open(img)) {
      r.violations.push_back({"closed", z, img, "image site is closed"});
    }
    const auto [it, fresh] = owner.emplace(img, z);
    if (!fresh) r.violations.push_back({"collision", z, it->second, "shares image " + to_string(img)});
  }
  f.comb.for_each_edge([&](const Site& a, const Site& b, bool backbone) {
    ++r.edges;
    const int dist = linf_distance(f.at(a), f.at(b));
    int& worst = backbone ? r.backbone_max_distance : r.fin_max_distance;
    worst = std::max(worst, dist);
    if (!spread_out_adjacent(f.at(a), f.at(b), M)) {
      r.violations.push_back({"adjacency", a, b, "image distance " + std::to_string(dist)});
    }
  });
  for (const Site& z : f.backbone_failures) {
    r.violations.push_back({"backbone", z, f.at(z), "L_{z_d}(x(z)) != 2 z_d + 1"});
  }
  return r;
}

void write_embedding_csv(std::ostream& os, const CombEmbedding& f) {
  const int d = f.comb.dim();
  for (int a = 0; a < d; ++a) os << "z" << a + 1 << ',';
  for (int a = 0; a < d; ++a) os << "f" << a + 1 << (a + 1 < d ? ',' : '\n');
  for (std::size_t i = 0; i < f.comb.box.volume(); ++i) {
    const Site z = f.comb.box.site(i);
    for (int a = 0; a < d; ++a) os << z[a] << ',';
    for (int a = 0; a < d; ++a) os << f.image[i][a] << (a + 1 < d ? ',' : '\n');
  }
}

}  // namespace combperc
