#include "combperc/pipeline.hpp"

#include <algorithm>
#include <limits>

namespace combperc {

LatticeWindow embed_window(const EmbedConfig& c) {
  if (c.d < 2 || c.d > kMaxDim) throw std::invalid_argument("embed: d out of range");
  if (c.width < 1 || c.height < 2) throw std::invalid_argument("embed: interior too small");
  if (c.padding < 1 || c.perp_padding < 1) throw std::invalid_argument("embed: padding must be positive");
  std::vector<Range> ranges;
  for (int a = 0; a + 1 < c.d; ++a) {
    ranges.push_back({-c.width / 2 - c.padding, c.width - c.width / 2 + c.padding});
  }
  ranges.push_back({-c.padding, c.height + c.padding});
  return LatticeWindow(std::move(ranges), c.padding);
}

namespace {

// Longest run of consecutive layers n on which L_n is certified at every
// horizontal interior point.
Range fully_certified_layers(const SurfaceStack& stack) {
  const LatticeWindow inner = stack.horizontal().interior();
  Range best{0, 0}, run{0, 0};
  const Range nr = stack.n_range();
  for (int n = nr.lo; n < nr.hi; ++n) {
    bool all = true;
    for (std::size_t i = 0; i < inner.volume() && all; ++i) all = stack.certified(n, inner.site(i));
    if (all) {
      if (run.empty()) run = {n, n};
      run.hi = n + 1;
      if (run.size() > best.size()) best = run;
    } else {
      run = {0, 0};
    }
  }
  return best;
}

}  // namespace

EmbedRun run_embedding(const EmbedConfig& config) {
  EmbedRun run;
  run.config = config;
  const LatticeWindow window = embed_window(config);
  const int d = config.d;

  run.field = sample_field(config.p, window, config.seed);
  const PercolationField reference =
      sample_field(config.p, window.expanded(config.padding), config.seed);
  run.stack = certified_stack(run.field, reference, {0, config.height / 2});
  run.stack_invariants = check_stack_invariants(*run.stack, run.field);
  run.classes = classify_good_bad(*run.stack);

  const Range layers = fully_certified_layers(*run.stack);
  if (layers.size() <= 2 * config.perp_padding * 2) {
    run.reason = "too few fully certified layers for the perpendicular surface";
    return run;
  }
  const LatticeWindow interior = window.interior();
  PerpRegion region;
  for (int a = 0; a + 1 < d; ++a) region.horizontal.push_back(interior.range(a));
  region.layers = layers;
  try {
    run.H = build_perpendicular_surface(*run.classes, region, config.perp_padding);
  } catch (const EmbeddingError& e) {
    run.reason = e.what();
    return run;
  }
  run.perp_invariants = check_perp_invariants(*run.H, *run.classes);

  // Comb window: every u in the interior of H's domain, and first coordinates
  // keeping x(z) inside the certified horizontal interior.
  const LatticeWindow hdom = run.H->domain().interior();
  int hmin = std::numeric_limits<int>::max(), hmax = std::numeric_limits<int>::min();
  for (std::size_t i = 0; i < hdom.volume(); ++i) {
    const Site u = PerpSurface::original_point(hdom.site(i));
    if (!run.H->certified(u)) {
      run.reason = "perpendicular surface uncertified at u=" + to_string(u);
      return run;
    }
    hmin = std::min(hmin, run.H->value(u));
    hmax = std::max(hmax, run.H->value(u));
  }
  std::vector<Range> comb_ranges;
  comb_ranges.push_back({interior.range(0).lo - hmin, interior.range(0).hi - hmax});
  for (int a = 0; a + 1 < hdom.dim(); ++a) comb_ranges.push_back(hdom.range(a));
  comb_ranges.push_back(hdom.range(hdom.dim() - 1));
  if (!comb_ranges[0].contains(0)) {
    run.reason = "perpendicular surface leaves no room for the backbone";
    return run;
  }

  try {
    run.embedding = embed_comb(*run.stack, *run.H, make_comb_window(std::move(comb_ranges)), false);
  } catch (const EmbeddingError& e) {
    run.reason = e.what();
    return run;
  }
  run.report = verify_embedding(*run.embedding, run.field, config.M);
  run.complete = true;
  return run;
}

}  // namespace combperc
