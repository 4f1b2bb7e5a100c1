#include "combperc/surfaces.hpp"

#include <algorithm>
#include <cmath>

namespace combperc {

// ---------------------------------------------------------------------------
// Lambda graph and the occupation-time table

LambdaGraph::LambdaGraph(const LatticeWindow& window) : window_(window) {
  const int d = window_.dim();
  if (d < 2) throw std::invalid_argument("LambdaGraph: dimension must be at least 2");
  for (const Site& step : lambda_steps(d)) {
    if (step[d - 1] != -1) continue;
    DownStep s;
    std::ptrdiff_t offset = -1;
    for (int a = 0; a + 1 < d; ++a) {
      s.shift[static_cast<std::size_t>(a)] = step[a];
      offset += static_cast<std::ptrdiff_t>(step[a]) *
                static_cast<std::ptrdiff_t>(window_.stride(a));
    }
    s.offset = offset;
    down_.push_back(s);
  }
}

double lambda_source_time(int height) {
  return height % 2 == 0 ? static_cast<double>(height / 2) : kInfinity;
}

OccupationField occupation_time_field(const PercolationField& field) {
  const LatticeWindow& w = field.window();
  const Range v = w.vertical();
  const int interior_bottom = v.lo + w.padding();
  if (v.lo % 2 != 0 && v.lo + 1 > interior_bottom) {
    throw std::invalid_argument(
        "occupation_time_field: window too small, no even-height source below the certified interior");
  }
  std::vector<double> sources(w.volume());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    // The vertical coordinate is the fastest index.
    const int height = v.lo + static_cast<int>(i % static_cast<std::size_t>(v.size()));
    sources[i] = lambda_source_time(height);
  }
  const LambdaGraph graph(w);
  auto open = [&](std::size_t u) { return field.open_at(u); };
  auto out = [&](std::size_t x, auto&& visit) { graph.for_each_out(x, open, visit); };
  return {w, zero_one_times(w.volume(), sources, out)};
}

// ---------------------------------------------------------------------------
// Stacks

SurfaceStack::SurfaceStack(OccupationField occupation, Range n_range,
                           std::vector<int> heights, std::vector<std::uint8_t> certified)
    : occupation_(std::move(occupation)),
      horizontal_(occupation_.window.horizontal()),
      n_range_(n_range),
      heights_(std::move(heights)),
      certified_(std::move(certified)) {
  const std::size_t expected =
      static_cast<std::size_t>(std::max(0, n_range_.size())) * horizontal_.volume();
  if (heights_.size() != expected || certified_.size() != expected) {
    throw std::invalid_argument("SurfaceStack: table size mismatch");
  }
}

std::size_t SurfaceStack::slot(int n, const Site& x) const {
  if (!n_range_.contains(n) || !horizontal_.contains(x)) {
    throw std::out_of_range("SurfaceStack: (n, x) outside the stack");
  }
  return static_cast<std::size_t>(n - n_range_.lo) * horizontal_.volume() + horizontal_.index(x);
}

int SurfaceStack::height(int n, const Site& x) const { return heights_[slot(n, x)]; }

bool SurfaceStack::certified(int n, const Site& x) const {
  return n_range_.contains(n) && horizontal_.contains(x) && certified_[slot(n, x)] != 0;
}

std::size_t SurfaceStack::certified_count() const {
  return static_cast<std::size_t>(std::count(certified_.begin(), certified_.end(), 1));
}

void SurfaceStack::restrict_to_agreement(const SurfaceStack& reference) {
  for (int n = n_range_.lo; n < n_range_.hi; ++n) {
    for (std::size_t h = 0; h < horizontal_.volume(); ++h) {
      const Site x = horizontal_.site(h);
      const std::size_t s = slot(n, x);
      if (!certified_[s]) continue;
      const bool comparable = reference.n_range().contains(n) && reference.horizontal().contains(x);
      if (!comparable || reference.height(n, x) != heights_[s]) certified_[s] = 0;
    }
  }
}

SurfaceStack surface_stack_from_T(const OccupationField& T, Range n_range) {
  const LatticeWindow& w = T.window;
  const Range v = w.vertical();
  if (n_range.empty()) throw std::invalid_argument("surface_stack_from_T: empty n range");
  if (v.lo > 2 * n_range.lo) {
    throw std::invalid_argument("surface_stack_from_T: window bottom must be <= 2 * n_min");
  }
  const LatticeWindow hw = w.horizontal();
  const std::size_t count = static_cast<std::size_t>(n_range.size()) * hw.volume();
  std::vector<int> heights(count, kAboveWindow);
  std::vector<std::uint8_t> certified(count, 0);
  const int top_interior = v.hi - w.padding();
  const int bottom_interior = v.lo + w.padding();
  for (std::size_t h = 0; h < hw.volume(); ++h) {
    const Site x = hw.site(h);
    const std::size_t column = w.index(with_height(x, v.lo));
    const bool inside = hw.in_interior(x);
    for (int n = n_range.lo; n < n_range.hi; ++n) {
      int value = kAboveWindow;
      for (int l = v.lo; l < v.hi; ++l) {
        if (T.T[column + static_cast<std::size_t>(l - v.lo)] > n) {
          value = l;
          break;
        }
      }
      const std::size_t s = static_cast<std::size_t>(n - n_range.lo) * hw.volume() + h;
      heights[s] = value;
      certified[s] = inside && value != kAboveWindow && value >= bottom_interior &&
                     value < top_interior;
    }
  }
  return SurfaceStack(T, n_range, std::move(heights), std::move(certified));
}

SurfaceStack certified_stack(const PercolationField& field, const PercolationField& reference,
                             Range n_range) {
  SurfaceStack stack = surface_stack_from_T(occupation_time_field(field), n_range);
  const SurfaceStack ref = surface_stack_from_T(occupation_time_field(reference), n_range);
  stack.restrict_to_agreement(ref);
  return stack;
}

SurfaceStack sample_certified_stack(double p, std::uint64_t seed, const LatticeWindow& window,
                                    Range n_range) {
  const PercolationField field = sample_field(p, window, seed);
  const PercolationField reference = sample_field(p, window.expanded(window.padding()), seed);
  return certified_stack(field, reference, n_range);
}

// ---------------------------------------------------------------------------
// Brute-force reachability

namespace {

using Bits = std::vector<std::uint64_t>;

bool subset_of(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] & ~b[i]) != 0) return false;
  }
  return true;
}

struct PathState {
  std::size_t site;
  int count;
  Bits used;
};

}  // namespace

std::vector<Site> reach_set_bruteforce(const PercolationField& field, int n,
                                       const LatticeWindow& window, bool enforce_distinct,
                                       std::size_t budget) {
  const int d = window.dim();
  if (d != field.window().dim()) throw std::invalid_argument("reach_set_bruteforce: dimension mismatch");
  for (int a = 0; a < d; ++a) {
    const Range& inner = window.range(a);
    const Range& outer = field.window().range(a);
    if (inner.lo < outer.lo || inner.hi > outer.hi) {
      throw std::invalid_argument("reach_set_bruteforce: window not inside the field");
    }
  }
  const std::vector<Site> steps = lambda_steps(d);
  const std::size_t volume = window.volume();
  std::vector<std::uint8_t> open(volume);
  for (std::size_t i = 0; i < volume; ++i) open[i] = field.is_open(window.site(i)) ? 1 : 0;

  std::vector<PathState> stack;
  for (std::size_t i = 0; i < volume; ++i) {
    const int height = window.site(i).last();
    if (height % 2 != 0 || height / 2 > n) continue;
    // Path of length zero from y with r = n - y_d/2; count tracks y_d/2 + opens.
    stack.push_back({i, height / 2, Bits(enforce_distinct ? (volume + 63) / 64 : 0, 0)});
  }

  std::vector<std::uint8_t> reached(volume, 0);
  std::size_t states = 0;
  // Per-site antichain of (count, used) pairs already expanded. Without the
  // distinct constraint `used` is empty and this reduces to the least count.
  std::vector<std::vector<std::pair<int, Bits>>> seen(volume);

  while (!stack.empty()) {
    PathState s = std::move(stack.back());
    stack.pop_back();
    auto& frontier = seen[s.site];
    const bool dominated = std::any_of(frontier.begin(), frontier.end(), [&](const auto& e) {
      return e.first <= s.count && subset_of(e.second, s.used);
    });
    if (dominated) continue;
    std::erase_if(frontier, [&](const auto& e) {
      return s.count <= e.first && subset_of(s.used, e.second);
    });
    frontier.emplace_back(s.count, s.used);
    if (++states > budget) {
      throw BudgetExceededError("reach_set_bruteforce: search budget exceeded");
    }
    reached[s.site] = 1;

    const Site z = window.site(s.site);
    for (const Site& step : steps) {
      const Site next = z + step;
      if (!window.contains(next)) continue;
      const std::size_t j = window.index(next);
      if (step.last() == 1) {
        const int count = s.count + open[j];
        if (count > n) continue;
        if (enforce_distinct) {
          const std::uint64_t bit = std::uint64_t{1} << (j % 64);
          if (s.used[j / 64] & bit) continue;
          Bits used = s.used;
          used[j / 64] |= bit;
          stack.push_back({j, count, std::move(used)});
        } else {
          stack.push_back({j, count, {}});
        }
      } else {
        stack.push_back({j, s.count, s.used});
      }
    }
  }

  std::vector<Site> out;
  for (std::size_t i = 0; i < volume; ++i) {
    if (reached[i]) out.push_back(window.site(i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Good and bad sites

GoodBadField::GoodBadField(LatticeWindow window, std::vector<SiteClass> classes,
                           std::vector<std::uint8_t> certified)
    : window_(std::move(window)), classes_(std::move(classes)), certified_(std::move(certified)) {
  if (classes_.size() != window_.volume() || certified_.size() != window_.volume()) {
    throw std::invalid_argument("GoodBadField: table size mismatch");
  }
}

std::vector<Site> GoodBadField::bad_sites(bool certified_only) const {
  std::vector<Site> out;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i] == SiteClass::kBad && (!certified_only || certified_[i])) {
      out.push_back(window_.site(i));
    }
  }
  return out;
}

GoodBadField classify_good_bad(const SurfaceStack& stack) {
  const LatticeWindow& w = stack.window();
  const Range nr = stack.n_range();
  std::vector<SiteClass> classes(w.volume(), SiteClass::kUnclassified);
  std::vector<std::uint8_t> certified(w.volume(), 0);
  for (std::size_t i = 0; i < w.volume(); ++i) {
    const Site z = w.site(i);
    const int height = z.last();
    if (height % 2 == 0) continue;
    const int n = (height - 1) / 2 - (height < 0 ? 1 : 0);
    if (!nr.contains(n)) continue;
    classes[i] = stack.occupation().T[i] <= n ? SiteClass::kBad : SiteClass::kGood;
    certified[i] = stack.certified(n, horizontal_part(z)) ? 1 : 0;
  }
  return GoodBadField(w, std::move(classes), std::move(certified));
}

StackInvariantReport check_stack_invariants(const SurfaceStack& stack, const PercolationField& field) {
  StackInvariantReport r;
  const LatticeWindow& hw = stack.horizontal();
  const Range nr = stack.n_range();
  const std::vector<Site> steps = lambda_steps(hw.dim() + 1);
  auto note = [&](std::size_t& counter, const std::string& what) {
    ++counter;
    if (r.examples.size() < 8) r.examples.push_back(what);
  };
  for (int n = nr.lo; n < nr.hi; ++n) {
    for (std::size_t h = 0; h < hw.volume(); ++h) {
      const Site x = hw.site(h);
      if (!stack.certified(n, x)) continue;
      ++r.checked;
      const int L = stack.height(n, x);
      const std::string at = "n=" + std::to_string(n) + " x=" + to_string(x);
      if (!field.is_open(with_height(x, L))) note(r.l1, "L1 closed site at " + at);
      if (L <= 2 * n) note(r.l3, "L3 at " + at);
      if (stack.certified(n - 1, x) && stack.height(n - 1, x) >= L) note(r.l4, "L4 at " + at);
      for (const Site& step : steps) {
        // Horizontal parts of the down-steps enumerate every neighbour offset.
        const Site shift = horizontal_part(step);
        if (step.last() != -1 || linf_norm(shift) == 0) continue;
        const Site y = x + shift;
        if (stack.certified(n, y) && std::abs(stack.height(n, y) - L) > 1) {
          note(r.l2, "L2 between " + to_string(x) + " and " + to_string(y) + " at n=" + std::to_string(n));
        }
      }
    }
  }
  return r;
}

double tail_bound_L(int h, double q, int d) {
  if (h < 0) throw std::invalid_argument("tail_bound_L: h must be non-negative");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("tail_bound_L: q outside [0,1]");
  const double K = path_branching_constant(d);
  if (q >= 1.0 / (K * K)) {
    throw BoundDivergenceError("tail_bound_L: bound diverges, q >= K^{-2}");
  }
  const double tail = 1.0 - K * K * q;
  return std::pow(K * q, h) / ((1.0 - q) * tail * tail);
}

}  // namespace combperc
