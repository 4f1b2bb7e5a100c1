#include "combperc/obstacles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "combperc/rng.hpp"
#include "combperc/stats.hpp"

namespace combperc {

std::vector<double> single_source_times(const PercolationField& field, const Site& y) {
  const LatticeWindow& w = field.window();
  if (!w.contains(y)) throw std::invalid_argument("obstacle anchor outside the window");
  if (y.last() % 2 != 0) throw std::invalid_argument("obstacle anchor must have even height");
  std::vector<double> sources(w.volume(), kInfinity);
  sources[w.index(y)] = lambda_source_time(y.last());
  const LambdaGraph graph(w);
  auto open = [&](std::size_t u) { return field.open_at(u); };
  auto out = [&](std::size_t x, auto&& visit) { graph.for_each_out(x, open, visit); };
  return zero_one_times(w.volume(), sources, out);
}

int obstacle_radius(const std::vector<Site>& members, const Site& y) {
  int r = 0;
  for (const Site& z : members) r = std::max(r, linf_distance(z, y) + 1);
  return r;
}

Obstacle obstacle_at(const PercolationField& field, const Site& y) {
  const LatticeWindow& w = field.window();
  const std::vector<double> T = single_source_times(field, y);
  Obstacle ob;
  ob.anchor = y;
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (T[i] == kInfinity) continue;
    const Site z = w.site(i);
    const int h = z.last();
    if (h % 2 == 0 || h <= y.last()) continue;
    if (T[i] <= (h - 1) / 2) {
      ob.members.push_back(z);
      if (w.on_boundary(z)) ob.certified = false;
    }
  }
  ob.radius = obstacle_radius(ob.members, y);
  return ob;
}

LatticeWindow obstacle_window(const Site& y, int half_width) {
  std::vector<Range> ranges;
  for (int a = 0; a < y.dim; ++a) ranges.push_back({y[a] - half_width, y[a] + half_width + 1});
  return LatticeWindow(std::move(ranges), 0);
}

Obstacle sample_obstacle(double p, std::uint64_t seed, const Site& y, int half_width,
                         int max_half_width) {
  int hw = std::max(1, half_width);
  while (true) {
    Obstacle ob = obstacle_at(sample_field(p, obstacle_window(y, hw), seed), y);
    if (ob.certified || hw >= max_half_width) return ob;
    hw = std::min(2 * hw, max_half_width);
  }
}

std::vector<Site> window_anchors(const LatticeWindow& window) {
  std::vector<Site> out;
  const int top = window.vertical().hi - 1;
  for (std::size_t i = 0; i < window.volume(); ++i) {
    const Site y = window.site(i);
    if (y.last() % 2 == 0 && y.last() < top) out.push_back(y);
  }
  return out;
}

std::vector<Obstacle> obstacles_in_window(const PercolationField& field) {
  std::vector<Obstacle> out;
  for (const Site& y : window_anchors(field.window())) out.push_back(obstacle_at(field, y));
  return out;
}

BadSetReport bad_set_identity_check(const GoodBadField& classes,
                                    const std::vector<Obstacle>& obstacles) {
  const LatticeWindow& w = classes.window();
  std::vector<std::uint8_t> covered(w.volume(), 0);
  for (const Obstacle& ob : obstacles) {
    for (const Site& z : ob.members) {
      if (w.contains(z)) covered[w.index(z)] = 1;
    }
  }
  BadSetReport report;
  for (std::size_t i = 0; i < w.volume(); ++i) {
    const Site z = w.site(i);
    if (classes.at(z) == SiteClass::kUnclassified || !classes.certified(z)) continue;
    ++report.compared;
    const bool bad = classes.is_bad(z);
    if (bad && !covered[i]) report.bad_not_covered.push_back(z);
    if (!bad && covered[i]) report.covered_not_bad.push_back(z);
  }
  report.identical = report.bad_not_covered.empty() && report.covered_not_bad.empty();
  return report;
}

BadSetReport bad_set_identity_check(const PercolationField& field) {
  const Range v = field.window().vertical();
  const int n_lo = v.lo >= 0 ? (v.lo + 1) / 2 : -((-v.lo) / 2);
  const int n_hi = v.hi / 2 + 1;
  const SurfaceStack stack = surface_stack_from_T(occupation_time_field(field), {n_lo, n_hi});
  return bad_set_identity_check(classify_good_bad(stack), obstacles_in_window(field));
}

std::uint64_t IndependentObstacleSampler::anchor_seed(const Site& y) const {
  std::uint64_t h = hash_words(base_seed, {0x0b57ac1eULL, static_cast<std::uint64_t>(y.dim)});
  for (int a = 0; a < y.dim; ++a) {
    h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(y[a])));
  }
  return h;
}

std::vector<Obstacle> sample_independent_obstacles(const IndependentObstacleSampler& sampler,
                                                   const std::vector<Site>& anchors) {
  std::unordered_set<std::uint64_t> seeds;
  std::vector<Obstacle> out;
  out.reserve(anchors.size());
  for (const Site& y : anchors) {
    const std::uint64_t s = sampler.anchor_seed(y);
    if (!seeds.insert(s).second) {
      throw SeedCollisionError("independent obstacles: seed collision at anchor " + to_string(y));
    }
    out.push_back(obstacle_at(sample_field(sampler.p, sampler.window, s), y));
  }
  return out;
}

RadiusBoundConstants radius_bound_constants(double q, int d) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("radius bound: q outside [0,1]");
  const double K = path_branching_constant(d);
  const double s = std::sqrt(q);
  RadiusBoundConstants k;
  k.a = K * s;
  if (k.a >= 1.0) throw BoundDivergenceError("radius bound diverges: K sqrt(q) >= 1");
  k.A = s / ((1.0 - s) * (1.0 - k.a) * (1.0 - k.a));
  k.c = std::max(k.A, k.a);
  return k;
}

double radius_tail_bound(int r, double q, int d) {
  if (r < 0) throw std::invalid_argument("radius bound: r must be non-negative");
  return std::pow(radius_bound_constants(q, d).c, r + 1);
}

SetFunctional count_in_window(const LatticeWindow& region) {
  return {"bad_count",
          [region](const std::vector<Site>& set) {
            return static_cast<double>(
                std::count_if(set.begin(), set.end(), [&](const Site& z) { return region.contains(z); }));
          }};
}

SetFunctional indicator_of(const Site& z) {
  return {"bad_at_" + to_string(z), [z](const std::vector<Site>& set) {
            return std::find(set.begin(), set.end(), z) != set.end() ? 1.0 : 0.0;
          }};
}

bool DominationReport::any_flagged() const {
  return std::any_of(functionals.begin(), functionals.end(),
                     [](const FunctionalEstimate& f) { return f.flagged; });
}

DominationSettings default_domination_settings(double p, std::uint64_t seed, std::size_t trials) {
  DominationSettings s;
  s.p = p;
  s.seed = seed;
  s.trials = trials;
  s.region = make_box({{-4, 5}, {0, 9}});
  s.computation = LatticeWindow({{-8, 9}, {-4, 13}}, 0);
  return s;
}

namespace {

// Odd-height sites of `region` with T <= (z_d - 1) / 2 under the given sources.
std::vector<Site> reached_odd_sites(const LatticeWindow& w, const std::vector<double>& T,
                                    const LatticeWindow& region) {
  std::vector<Site> out;
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (T[i] == kInfinity) continue;
    const Site z = w.site(i);
    const int h = z.last();
    if (h % 2 == 0 || !region.contains(z)) continue;
    if (T[i] <= (h - 1) / 2) out.push_back(z);
  }
  return out;
}

}  // namespace

DominationReport domination_evidence(const DominationSettings& settings,
                                     const std::vector<SetFunctional>& functionals) {
  const LatticeWindow& w = settings.computation;
  std::vector<Site> anchors;
  for (const Site& y : window_anchors(w)) {
    if (y.last() < settings.region.vertical().hi) anchors.push_back(y);
  }
  const LambdaGraph graph(w);
  std::vector<RunningStats> dep(functionals.size()), ind(functionals.size());

  for (std::size_t t = 0; t < settings.trials; ++t) {
    const std::uint64_t trial_seed = hash_words(settings.seed, {0xd0d0ULL, t});

    // Dependent: one environment, every anchor a source.
    const PercolationField field = sample_field(settings.p, w, hash_words(trial_seed, {1}));
    std::vector<double> sources(w.volume(), kInfinity);
    for (const Site& y : anchors) sources[w.index(y)] = lambda_source_time(y.last());
    auto open = [&](std::size_t u) { return field.open_at(u); };
    auto out = [&](std::size_t x, auto&& visit) { graph.for_each_out(x, open, visit); };
    const std::vector<Site> dependent =
        reached_odd_sites(w, zero_one_times(w.volume(), sources, out), settings.region);

    // Independent: a fresh environment per anchor.
    IndependentObstacleSampler sampler{settings.p, hash_words(trial_seed, {2}), w};
    std::set<Site> merged;
    for (const Obstacle& ob : sample_independent_obstacles(sampler, anchors)) {
      for (const Site& z : ob.members) {
        if (settings.region.contains(z)) merged.insert(z);
      }
    }
    const std::vector<Site> independent(merged.begin(), merged.end());

    for (std::size_t f = 0; f < functionals.size(); ++f) {
      dep[f].add(functionals[f].evaluate(dependent));
      ind[f].add(functionals[f].evaluate(independent));
    }
  }

  DominationReport report;
  report.trials = settings.trials;
  for (std::size_t f = 0; f < functionals.size(); ++f) {
    FunctionalEstimate e;
    e.name = functionals[f].name;
    e.dependent_mean = dep[f].mean();
    e.dependent_se = dep[f].standard_error();
    e.independent_mean = ind[f].mean();
    e.independent_se = ind[f].standard_error();
    const double se = std::hypot(e.dependent_se, e.independent_se);
    e.flagged = e.dependent_mean > e.independent_mean + 3.0 * se;
    report.functionals.push_back(e);
  }
  return report;
}

}  // namespace combperc
