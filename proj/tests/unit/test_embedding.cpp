#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <set>
#include <sstream>

#include "combperc/embedding.hpp"
#include "combperc/pipeline.hpp"
#include "combperc/rng.hpp"
#include "oracles.hpp"

using namespace combperc;

namespace {

// H from scratch: relabel the odd layers by hand, mark good and certified
// sites open, and read L'_0 off a relaxation table.
int oracle_H(const GoodBadField& classes, const LatticeWindow& transformed, const Site& vn) {
  PercolationField t = uniform_field(transformed, false);
  for (std::size_t i = 0; i < transformed.volume(); ++i) {
    const Site w = transformed.site(i);
    const int d = w.dim;
    Site z(d);
    z[0] = w[d - 1];
    for (int a = 1; a + 1 < d; ++a) z[a] = w[a - 1];
    z[d - 1] = 2 * w[d - 2] + 1;
    t.set_open(w, classes.window().contains(z) && classes.certified(z) && classes.at(z) == SiteClass::kGood);
  }
  return oracle::surface_height(t, oracle::lambda_times_relaxation(t), 0, vn);
}

LatticeWindow transformed_window(const PerpRegion& region, int padding) {
  std::vector<Range> ranges;
  const int d = static_cast<int>(region.horizontal.size()) + 1;
  for (int i = 1; i + 1 < d; ++i) ranges.push_back(region.horizontal[static_cast<std::size_t>(i)]);
  ranges.push_back(region.layers);
  ranges.push_back(region.horizontal[0]);
  return LatticeWindow(ranges, 2 * padding);
}

// Certified stack for a field built by `make` on the window and on its
// padded reference.
template <class Make>
SurfaceStack stack_for(const LatticeWindow& w, Make make, Range n_range) {
  return certified_stack(make(w), make(w.expanded(w.padding())), n_range);
}

// Every 1-Lipschitz function on `dom` with values in [lo, hi].
void for_each_lipschitz(const LatticeWindow& dom, int lo, int hi,
                        const std::function<void(const LipschitzFunction&)>& visit) {
  std::vector<int> v(dom.volume(), lo);
  std::function<void(std::size_t)> fill = [&](std::size_t i) {
    if (i == v.size()) {
      visit(LipschitzFunction(dom, v));
      return;
    }
    const Site x = dom.site(i);
    for (int h = lo; h <= hi; ++h) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        if (linf_distance(dom.site(j), x) == 1 && std::abs(v[j] - h) > 1) ok = false;
      }
      if (!ok) continue;
      v[i] = h;
      fill(i + 1);
    }
  };
  fill(0);
}

}  // namespace

TEST_CASE("sticks and balls") {
  CHECK(stick_members(Site{0, 5}, 3) == std::vector<Site>{Site{0, 3}, Site{0, 4}, Site{0, 5}, Site{0, 6}, Site{0, 7}});
  CHECK(stick_members(Site{0, 5}, 0).empty());
  CHECK(stick_members(Site{1, 1, 1}, 4).size() == 7);
  CHECK(in_ball(Site{2, 3}, Site{0, 5}, 3));
  CHECK_FALSE(in_ball(Site{3, 3}, Site{0, 5}, 3));
}

TEST_CASE("Lipschitz functions are validated") {
  const LatticeWindow dom = make_box({{0, 3}});
  CHECK_NOTHROW(LipschitzFunction(dom, {0, 1, 0}));
  CHECK_THROWS_AS(LipschitzFunction(dom, {0, 2, 1}), NotLipschitzError);
  CHECK_THROWS_AS(LipschitzFunction(make_box({{0, 2}, {0, 2}}), {0, 1, 1, 2}), NotLipschitzError);
  CHECK_THROWS(LipschitzFunction(dom, {0, 1}));
}

TEST_CASE("stick check") {
  const LatticeWindow dom = make_box({{-6, 7}});
  SUBCASE("radius one: stick and ball coincide") {
    for (int h0 = -2; h0 <= 2; ++h0) {
      const StickBallResult r = stick_ball_check(LipschitzFunction(dom, std::vector<int>(13, h0)), Site{0, 0}, 1);
      CHECK(r.stick_radius == 1);
      CHECK(r.stick_avoided == r.ball_avoided);
      CHECK(r.stick_avoided == (h0 != 0));
    }
  }
  SUBCASE("a stick of length r does not protect the ball") {
    std::vector<int> v;
    for (int x = -6; x <= 6; ++x) v.push_back(std::abs(x));
    const LipschitzFunction h(dom, v);
    const StickBallResult r = stick_ball_check(h, Site{0, 5}, 5);
    CHECK(r.stick_radius == 9);
    // The graph misses S(y, 5) but enters B(y, 5) at (4, 4).
    CHECK(std::abs(h(Site{0}) - 5) >= 5);
    CHECK_FALSE(r.ball_avoided);
    CHECK_FALSE(r.stick_avoided);
  }
  SUBCASE("flat function at zero, y = (0, 5), r = 5") {
    const StickBallResult r = stick_ball_check(LipschitzFunction(dom, std::vector<int>(13, 0)), Site{0, 5}, 5);
    CHECK(r.ball_avoided);
    CHECK_FALSE(r.stick_avoided);
  }
  SUBCASE("flat function far below") {
    const StickBallResult r = stick_ball_check(LipschitzFunction(dom, std::vector<int>(13, -5)), Site{0, 5}, 5);
    CHECK(r.stick_avoided);
    CHECK(r.ball_avoided);
  }
  SUBCASE("y outside the domain is rejected") {
    CHECK_THROWS(stick_ball_check(LipschitzFunction(dom, std::vector<int>(13, 0)), Site{9, 0}, 2));
  }
}

TEST_CASE("stick avoidance implies ball avoidance, exhaustively on small domains") {
  auto brute_ball_avoided = [](const LipschitzFunction& h, const Site& y, int r) {
    const LatticeWindow& dom = h.domain();
    for (std::size_t i = 0; i < dom.volume(); ++i) {
      const Site x = dom.site(i);
      if (in_ball(with_height(x, h(x)), y, r)) return false;
    }
    return true;
  };
  std::size_t checks = 0, implications = 0;
  auto run = [&](const LatticeWindow& dom, int lo, int hi) {
    for_each_lipschitz(dom, lo, hi, [&](const LipschitzFunction& h) {
      for (std::size_t i = 0; i < dom.volume(); ++i) {
        for (int yd = lo - 2; yd <= hi + 2; ++yd) {
          const Site y = with_height(dom.site(i), yd);
          for (int r = 1; r <= 4; ++r) {
            const StickBallResult s = stick_ball_check(h, y, r);
            ++checks;
            CHECK(s.ball_avoided == brute_ball_avoided(h, y, r));
            if (s.stick_avoided) {
              ++implications;
              CHECK(s.ball_avoided);
            }
          }
        }
      }
    });
  };
  run(make_box({{0, 6}}), -3, 3);
  run(make_box({{0, 3}, {0, 3}}), -2, 2);
  CHECK(checks > 10000);
  CHECK(implications > 0);
}

TEST_CASE("coordinate change") {
  CHECK(transform_coords(Site{0, 1}) == Site{0, 0});
  CHECK(transform_coords(Site{3, 5}) == Site{2, 3});
  CHECK(transform_coords(Site{3, 7, 5}) == Site{7, 2, 3});
  CHECK(transform_coords(Site{0, -1}) == Site{-1, 0});
  CHECK_THROWS(transform_coords(Site{0, 2}));
  SplitMix64 rng(7);
  for (int t = 0; t < 10000; ++t) {
    Site z(3);
    for (int a = 0; a < 3; ++a) z[a] = static_cast<int>(rng() % 201) - 100;
    if (z.last() % 2 == 0) z.last() += 1;
    const Site w = transform_coords(z);
    CHECK(inverse_transform_coords(w) == z);
    CHECK(transform_coords(inverse_transform_coords(w)) == w);
    CHECK(linf_norm(w) <= linf_norm(z));
  }
}

TEST_CASE("perpendicular surface on an all-open field") {
  const LatticeWindow w({{-16, 17}, {-6, 46}}, 6);
  const SurfaceStack stack = stack_for(w, [](const LatticeWindow& x) { return uniform_field(x, true); }, {0, 20});
  const GoodBadField classes = classify_good_bad(stack);
  const PerpRegion region{{w.interior().range(0)}, {0, 18}};
  const PerpSurface H = build_perpendicular_surface(classes, region, 3);
  REQUIRE(H.certified_count() > 0);
  for (std::size_t i = 0; i < H.domain().volume(); ++i) {
    const Site u = PerpSurface::original_point(H.domain().site(i));
    if (H.certified(u)) CHECK(H.value(u) == 1);
  }
  CHECK(check_perp_invariants(H, classes).ok());
}

TEST_CASE("perpendicular surface against a hand-built relabelling") {
  const LatticeWindow w({{-16, 17}, {-6, 46}}, 6);
  const PerpRegion region{{w.interior().range(0)}, {0, 18}};
  const LatticeWindow tw = transformed_window(region, 3);

  SUBCASE("one bad site") {
    auto make = [](const LatticeWindow& x) {
      PercolationField f = uniform_field(x, true);
      f.set_open(Site{1, 13}, false);
      return f;
    };
    const GoodBadField classes = classify_good_bad(stack_for(w, make, {0, 20}));
    REQUIRE(classes.is_bad(Site{1, 13}));
    const PerpSurface H = build_perpendicular_surface(classes, region, 3);
    REQUIRE(H.certified(Site{13}));
    CHECK(H.value(Site{13}) == 2);
    for (std::size_t i = 0; i < H.domain().volume(); ++i) {
      const Site vn = H.domain().site(i);
      const Site u = PerpSurface::original_point(vn);
      if (H.certified(u)) CHECK(H.value(u) == oracle_H(classes, tw, vn));
    }
  }
  SUBCASE("sampled fields") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      auto make = [seed](const LatticeWindow& x) { return sample_field(0.97, x, seed); };
      const GoodBadField classes = classify_good_bad(stack_for(w, make, {0, 20}));
      const PerpSurface H = build_perpendicular_surface(classes, region, 3);
      std::size_t compared = 0;
      for (std::size_t i = 0; i < H.domain().volume(); ++i) {
        const Site vn = H.domain().site(i);
        const Site u = PerpSurface::original_point(vn);
        if (!H.certified(u)) continue;
        ++compared;
        CHECK(H.value(u) == oracle_H(classes, tw, vn));
      }
      CHECK(compared > 0);
      CHECK(check_perp_invariants(H, classes).ok());
    }
  }
}

TEST_CASE("invariant checker flags a broken H") {
  const LatticeWindow w({{-16, 17}, {-6, 46}}, 6);
  const SurfaceStack stack = stack_for(w, [](const LatticeWindow& x) { return uniform_field(x, true); }, {0, 20});
  const GoodBadField classes = classify_good_bad(stack);
  PerpSurface H = build_perpendicular_surface(classes, {{w.interior().range(0)}, {0, 18}}, 3);
  for (std::size_t i = 0; i < H.domain().volume(); ++i) {
    const Site u = PerpSurface::original_point(H.domain().site(i));
    if (H.certified(u)) {
      H.set_value(u, H.value(u) + 3);
      break;
    }
  }
  const PerpInvariantReport r = check_perp_invariants(H, classes);
  CHECK(r.h2 > 0);
  CHECK_FALSE(r.ok());
}

TEST_CASE("comb embedding of an all-open field") {
  const EmbedRun run = run_embedding({2, 1.0, 1, 24, 60, 6, 3, 2});
  REQUIRE(run.complete);
  const CombEmbedding& f = *run.embedding;
  const LatticeWindow& box = f.comb.box;
  REQUIRE(box.volume() > 0);
  for (std::size_t i = 0; i < box.volume(); ++i) {
    const Site z = box.site(i);
    CHECK(f.image[i] == Site{z[0] + 1, 2 * z.last() + 1});
  }
  CHECK(run.report.ok());
  CHECK(run.report.fin_max_distance == 1);
  CHECK(run.report.backbone_max_distance == 2);
  CHECK(run.exit_code() == 0);

  std::ostringstream os;
  write_embedding_csv(os, f);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "z1,z2,f1,f2");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == box.volume());
}

TEST_CASE("comb embedding of sampled fields") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const EmbedRun run = run_embedding({2, 0.99, seed, 30, 70, 8, 4, 2});
    if (!run.complete) continue;
    CHECK(run.stack_invariants.ok());
    CHECK(run.perp_invariants.ok());
    CHECK(run.report.ok());
    CHECK(run.report.fin_max_distance <= 1);
    const CombEmbedding& f = *run.embedding;
    std::set<Site> images(f.image.begin(), f.image.end());
    CHECK(images.size() == f.image.size());
    for (std::size_t i = 0; i < f.comb.box.volume(); ++i) {
      const Site z = f.comb.box.site(i);
      if (z[0] == 0) CHECK(f.image[i].last() == 2 * z.last() + 1);
    }
  }
}

TEST_CASE("the verifier catches corrupted maps") {
  const EmbedRun run = run_embedding({2, 1.0, 1, 24, 60, 6, 3, 2});
  REQUIRE(run.complete);
  const LatticeWindow& box = run.embedding->comb.box;
  const Site z = box.site(box.volume() / 2);
  const Site z2 = box.site(box.volume() / 2 + 1);

  SUBCASE("a displaced vertex breaks adjacency") {
    CombEmbedding f = *run.embedding;
    f.image[box.index(z)][0] += 3;
    const EmbeddingReport r = verify_embedding(f, run.field, 2);
    CHECK_FALSE(r.ok());
    CHECK(std::any_of(r.violations.begin(), r.violations.end(), [](const Violation& v) { return v.kind == "adjacency"; }));
  }
  SUBCASE("a shared image is a collision") {
    CombEmbedding f = *run.embedding;
    f.image[box.index(z2)] = f.image[box.index(z)];
    const EmbeddingReport r = verify_embedding(f, run.field, 2);
    CHECK(std::any_of(r.violations.begin(), r.violations.end(), [](const Violation& v) { return v.kind == "collision"; }));
  }
  SUBCASE("a closed image site") {
    PercolationField field = run.field;
    field.set_open(run.embedding->at(z), false);
    const EmbeddingReport r = verify_embedding(*run.embedding, field, 2);
    CHECK(std::any_of(r.violations.begin(), r.violations.end(), [](const Violation& v) { return v.kind == "closed"; }));
  }
}
