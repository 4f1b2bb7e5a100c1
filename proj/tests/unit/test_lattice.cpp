#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "combperc/field_io.hpp"
#include "combperc/lattice.hpp"
#include "combperc/rng.hpp"
#include "combperc/stats.hpp"

using namespace combperc;

namespace {

LatticeWindow box2(int w, int h, int padding = 0) { return LatticeWindow({{0, w}, {0, h}}, padding); }

}  // namespace

TEST_CASE("window indexing round-trips and interior respects padding") {
  const LatticeWindow w({{-3, 4}, {2, 9}}, 2);
  CHECK(w.volume() == 49);
  for (std::size_t i = 0; i < w.volume(); ++i) CHECK(w.index(w.site(i)) == i);
  CHECK(w.in_interior(Site{0, 5}));
  CHECK_FALSE(w.in_interior(Site{-2, 5}));
  CHECK(w.interior().ranges() == std::vector<Range>{{-1, 2}, {4, 7}});
  CHECK(w.expanded(3).shrunk(3) == w);
  CHECK_THROWS_AS(LatticeWindow({{0, 4}, {0, 4}}, 2), std::invalid_argument);
  CHECK_THROWS_AS(LatticeWindow({{0, 0}, {0, 4}}, 0), std::invalid_argument);
}

TEST_CASE("degenerate parameters give uniform fields") {
  const LatticeWindow w = box2(13, 11);
  CHECK(sample_field(1.0, w, 7).open_count() == w.volume());
  CHECK(sample_field(0.0, w, 7).open_count() == 0);
}

TEST_CASE("open fraction at p = 0.885 lies in the binomial band") {
  const LatticeWindow w = box2(50, 50);
  const double p = 0.885;
  const double frac = static_cast<double>(sample_field(p, w, 1).open_count()) / 2500.0;
  CHECK(std::abs(frac - p) <= 3.0 * std::sqrt(p * (1 - p) / 2500.0));
}

TEST_CASE("fields are reproducible and overlapping windows agree") {
  const LatticeWindow small({{-4, 5}, {0, 9}}, 1);
  const LatticeWindow big = small.expanded(6);
  const PercolationField a = sample_field(0.6, small, 99);
  const PercolationField b = sample_field(0.6, small, 99);
  const PercolationField c = sample_field(0.6, big, 99);
  CHECK(std::equal(a.states().begin(), a.states().end(), b.states().begin()));
  for (std::size_t i = 0; i < small.volume(); ++i) CHECK(a.open_at(i) == c.is_open(small.site(i)));
  const PercolationField other = sample_field(0.6, small, 100);
  CHECK_FALSE(std::equal(a.states().begin(), a.states().end(), other.states().begin()));
}

TEST_CASE("the open test is a strict comparison with the site uniform") {
  const LatticeWindow w = box2(20, 20);
  const double p = 0.37;
  const PercolationField f = sample_field(p, w, 5);
  for (std::size_t i = 0; i < w.volume(); ++i) CHECK(f.open_at(i) == (site_uniform(5, w.site(i)) < p));
}

TEST_CASE("site uniforms look uniform") {
  RunningStats s;
  const LatticeWindow w({{0, 200}, {0, 200}}, 0);
  for (std::size_t i = 0; i < w.volume(); ++i) s.add(site_uniform(3, w.site(i)));
  CHECK(std::abs(s.mean() - 0.5) < 4 * std::sqrt(1.0 / 12.0 / 40000.0));
  CHECK(std::abs(s.variance() - 1.0 / 12.0) < 0.003);
}

TEST_CASE("spread-out adjacency") {
  CHECK(spread_out_adjacent(Site{0, 0}, Site{1, 1}, 2));
  CHECK_FALSE(spread_out_adjacent(Site{0, 0}, Site{0, 0}, 3));
  CHECK_FALSE(spread_out_adjacent(Site{0, 0}, Site{3, 0}, 2));
  CHECK(spread_out_adjacent(Site{0, 0}, Site{-2, 2}, 2));
  CHECK_THROWS(spread_out_adjacent(Site{0, 0}, Site{0, 0, 0}, 2));
}

TEST_CASE("coarse graining") {
  const LatticeWindow w = box2(6, 4);
  SUBCASE("all open") {
    const PercolationField g = coarse_grain(uniform_field(w, true), 2);
    CHECK(g.window().ranges() == std::vector<Range>{{0, 3}, {0, 2}});
    CHECK(g.open_count() == 6);
  }
  SUBCASE("all closed") { CHECK(coarse_grain(uniform_field(w, false), 2).open_count() == 0); }
  SUBCASE("single open site") {
    PercolationField f = uniform_field(w, false);
    f.set_open(Site{1, 1}, true);
    const PercolationField g = coarse_grain(f, 2);
    CHECK(g.open_count() == 1);
    CHECK(g.is_open(Site{0, 0}));
  }
  SUBCASE("divisibility") { CHECK_THROWS_AS(coarse_grain(uniform_field(box2(5, 4), true), 2), std::invalid_argument); }
  SUBCASE("negative bounds use floor division") {
    PercolationField f = uniform_field(LatticeWindow({{-4, 4}, {-2, 2}}, 0), false);
    f.set_open(Site{-1, -1}, true);
    const PercolationField g = coarse_grain(f, 2);
    CHECK(g.is_open(Site{-1, -1}));
    CHECK(g.open_count() == 1);
  }
  SUBCASE("monotone under opening a site") {
    const PercolationField base = sample_field(0.1, box2(12, 12), 4);
    const PercolationField before = coarse_grain(base, 3);
    for (std::size_t i = 0; i < base.window().volume(); ++i) {
      PercolationField more = base;
      more.set_open(base.window().site(i), true);
      const PercolationField after = coarse_grain(more, 3);
      for (std::size_t j = 0; j < before.window().volume(); ++j) CHECK(after.open_at(j) >= before.open_at(j));
    }
  }
}

TEST_CASE("lambda steps") {
  const std::vector<Site> two = lambda_steps(2);
  CHECK(two == std::vector<Site>{Site{0, 1}, Site{-1, -1}, Site{0, -1}, Site{1, -1}});
  CHECK(lambda_steps(3).size() == 10);
  CHECK(path_branching_constant(2) == 5);
  CHECK(static_cast<int>(two.size()) - 1 == path_branching_constant(2) - 2);
  int expected = 3;
  for (int d = 2; d <= 5; ++d, expected *= 3) {
    const std::vector<Site> steps = lambda_steps(d);
    CHECK(steps.size() == static_cast<std::size_t>(expected + 1));
    CHECK(std::set<Site>(steps.begin(), steps.end()).size() == steps.size());
  }
}

TEST_CASE("field text format round-trips") {
  const PercolationField f = sample_field(0.3, LatticeWindow({{-2, 5}, {-1, 6}, {0, 4}}, 1), 12345);
  std::stringstream ss;
  write_field_text(ss, f);
  const PercolationField g = read_field_text(ss);
  CHECK(g.window() == f.window());
  CHECK(g.seed() == f.seed());
  CHECK(g.p() == f.p());
  CHECK(std::equal(f.states().begin(), f.states().end(), g.states().begin()));

  std::stringstream bad("combperc-field 2\n");
  CHECK_THROWS(read_field_text(bad));
}

TEST_CASE("field JSON round-trips and refuses large windows") {
  const PercolationField f = sample_field(0.5, box2(9, 7, 1), 3);
  const PercolationField g = field_from_json(field_to_json(f));
  CHECK(g.window() == f.window());
  CHECK(std::equal(f.states().begin(), f.states().end(), g.states().begin()));
  CHECK_THROWS_AS(field_to_json(uniform_field(box2(2048, 1024), true)), std::length_error);
}

TEST_CASE("running statistics and KS test") {
  RunningStats s;
  for (double x : {1.0, 2.0, 3.0, 4.0}) s.add(x);
  CHECK(s.mean() == doctest::Approx(2.5));
  CHECK(s.variance() == doctest::Approx(5.0 / 3.0));
  CHECK(proportion_standard_error(0.5, 100) == doctest::Approx(0.05));

  SplitMix64 rng(8);
  std::vector<double> a, b, shifted;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(rng.uniform());
    b.push_back(rng.uniform());
    shifted.push_back(rng.uniform() + 0.2);
  }
  CHECK_FALSE(ks_two_sample(a, b).reject);
  CHECK(ks_two_sample(a, shifted).reject);
}
