// One line per acceptance criterion: [PASS] or [FAIL], the measured figures and
// the wall time. Exit status 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "combperc/cli.hpp"
#include "combperc/domination1d.hpp"
#include "combperc/embedding.hpp"
#include "combperc/fpp.hpp"
#include "combperc/obstacles.hpp"
#include "combperc/pipeline.hpp"
#include "combperc/render.hpp"
#include "combperc/rng.hpp"
#include "combperc/surfaces.hpp"
#include "oracles.hpp"

using namespace combperc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double mc_se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

// ---------------------------------------------------------------------------

Outcome surfaces_match_bruteforce() {
  const LatticeWindow w({{0, 5}, {0, 9}}, 0);
  std::size_t fields = 0, comparisons = 0, mismatches = 0;
  for (double p : {0.5, 0.9}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const PercolationField f = sample_field(p, w, 10'000 + seed);
      const OccupationField T = occupation_time_field(f);
      const SurfaceStack stack = surface_stack_from_T(T, {0, 5});
      ++fields;
      for (int n = 0; n < 5; ++n) {
        std::set<Site> fpp;
        for (std::size_t i = 0; i < w.volume(); ++i) {
          if (T.T[i] <= n) fpp.insert(w.site(i));
        }
        for (bool distinct : {false, true}) {
          const std::vector<Site> bf = reach_set_bruteforce(f, n, w, distinct);
          const std::set<Site> brute(bf.begin(), bf.end());
          ++comparisons;
          if (brute != fpp) ++mismatches;
          for (int x = 0; x < 5; ++x) {
            int L = kAboveWindow;
            for (int l = 0; l < 9; ++l) {
              if (!brute.count(Site{x, l})) {
                L = l;
                break;
              }
            }
            ++comparisons;
            if (stack.height(n, Site{x}) != L) ++mismatches;
          }
        }
      }
    }
  }
  return {mismatches == 0, fmt("%zu fields, %zu set/height comparisons, %zu mismatches", fields, comparisons, mismatches)};
}

Outcome stack_invariants() {
  std::size_t checked = 0, violations = 0, runs = 0;
  for (int d : {2, 3}) {
    const LatticeWindow w = d == 2 ? LatticeWindow({{-20, 21}, {-8, 44}}, 8)
                                   : LatticeWindow({{-10, 11}, {-10, 11}, {-6, 30}}, 6);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const PercolationField f = sample_field(0.97, w, seed);
      const PercolationField ref = sample_field(0.97, w.expanded(w.padding()), seed);
      const SurfaceStack s = certified_stack(f, ref, {0, d == 2 ? 16 : 10});
      const StackInvariantReport r = check_stack_invariants(s, f);
      checked += r.checked;
      violations += r.l1 + r.l2 + r.l3 + r.l4;
      ++runs;
    }
  }
  return {violations == 0 && checked > 0,
          fmt("%zu runs, %zu certified sites checked, %zu violations", runs, checked, violations)};
}

Outcome l_tail_bound() {
  const double p = 0.97, q = 1.0 - p;
  const std::size_t samples = 100'000;
  std::vector<std::size_t> above(9, 0);
  std::size_t retried = 0, unresolved = 0;
  for (std::uint64_t seed = 0; seed < samples; ++seed) {
    int L = -1;
    for (int half = 12, attempt = 0; attempt < 4 && L < 0; half *= 2, ++attempt) {
      const int pad = half / 2;
      const LatticeWindow w({{-half, half + 1}, {-pad, 2 * half}}, pad);
      const SurfaceStack s = sample_certified_stack(p, seed, w, {0, 1});
      if (s.certified(0, Site{0})) {
        L = s.height(0, Site{0});
      } else {
        ++retried;
      }
    }
    if (L < 0) {
      ++unresolved;
      L = INT_MAX;  // counted above every h
    }
    for (int h = 0; h <= 8; ++h) above[static_cast<std::size_t>(h)] += L > h;
  }
  bool ok = true;
  std::string detail = fmt("%zu samples (%zu retries, %zu unresolved);", samples, retried, unresolved);
  for (int h = 3; h <= 8; ++h) {
    const double emp = static_cast<double>(above[static_cast<std::size_t>(h)]) / samples;
    const double bound = std::pow(0.15, h) / (0.97 * 0.25 * 0.25);
    if (std::abs(bound - tail_bound_L(h, q, 2)) > 1e-12 * bound) ok = false;
    if (emp > bound + 3 * mc_se(emp, samples)) ok = false;
    detail += fmt(" h=%d %.2e<=%.2e", h, emp, bound);
  }
  return {ok, detail};
}

Outcome bad_set_identity() {
  std::size_t windows = 0, compared = 0, failures = 0;
  for (double p : {0.9, 0.97}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const LatticeWindow w({{-14, 15}, {-6, 30}}, 6);
      const BadSetReport r = bad_set_identity_check(sample_field(p, w, 50'000 + seed));
      ++windows;
      compared += r.compared;
      if (!r.identical || r.compared == 0) ++failures;
    }
  }
  return {failures == 0, fmt("%zu certified interiors, %zu sites compared, %zu differing", windows, compared, failures)};
}

Outcome radius_tail() {
  const double p = 0.99;
  const std::size_t samples = 100'000;
  std::vector<std::size_t> above(9, 0);
  std::size_t radius_one = 0, uncertified = 0;
  for (std::uint64_t seed = 0; seed < samples; ++seed) {
    const Obstacle ob = sample_obstacle(p, seed, Site{0, 0});
    int R = ob.radius;
    if (!ob.certified) {
      ++uncertified;
      R = INT_MAX;
    }
    if (R == 1) ++radius_one;
    for (int r = 0; r <= 8; ++r) above[static_cast<std::size_t>(r)] += R > r;
  }
  bool ok = radius_one == 0;
  std::string detail = fmt("%zu samples, %zu uncertified, R=1 seen %zu times;", samples, uncertified, radius_one);
  for (int r = 0; r <= 8; ++r) {
    const double emp = static_cast<double>(above[static_cast<std::size_t>(r)]) / samples;
    const double bound = std::pow(0.5, r + 1);
    if (emp > bound + 3 * mc_se(emp, samples)) ok = false;
    if (r <= 3 || r == 8) detail += fmt(" r=%d %.2e<=%.2e", r, emp, bound);
  }
  return {ok, detail};
}

// Random FPP specs on at most 5 vertices with 1..3 models.
struct CouplingSpec {
  PassageSpec spec;
  std::vector<std::vector<double>> sources;
  bool perturb = true;
  TiePolicy ties = TiePolicy::kError;
};

CouplingSpec random_coupling_spec(SplitMix64& rng, int index) {
  const int n = 2 + static_cast<int>(rng() % 4);
  const int models = 1 + static_cast<int>(rng() % 3);
  CouplingSpec c{PassageSpec(static_cast<std::size_t>(n)), {}, index % 2 == 0,
                 index % 2 == 0 ? TiePolicy::kError : TiePolicy::kLexicographic};
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b || rng.uniform() < 0.3) continue;
      switch (rng() % 4) {
        case 0: c.spec.add_edge(a, b, PassageLaw::bernoulli(0.2 + 0.6 * rng.uniform())); break;
        case 1: c.spec.add_edge(a, b, PassageLaw::two_point(0.5, 2.0, rng.uniform())); break;
        case 2: c.spec.add_edge(a, b, PassageLaw::perturbed_constant(1.0, 0.5)); break;
        default: c.spec.add_edge(a, b, PassageLaw::constant(static_cast<double>(rng() % 3))); break;
      }
    }
  }
  for (int m = 0; m < models; ++m) {
    std::vector<double> t(static_cast<std::size_t>(n), kInfinity);
    t[rng() % static_cast<std::uint64_t>(n)] = static_cast<double>(rng() % 3);
    if (rng.uniform() < 0.5) t[rng() % static_cast<std::uint64_t>(n)] = static_cast<double>(rng() % 3);
    c.sources.push_back(std::move(t));
  }
  return c;
}

bool same_times(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    if (std::isinf(a[i]) || std::isinf(b[i]) || std::abs(a[i] - b[i]) > 1e-9) return false;
  }
  return true;
}

PassageSpec complete_graph(int n, const PassageLaw& law) {
  PassageSpec spec(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b) spec.add_edge(a, b, law);
    }
  }
  return spec;
}

Outcome fpp_coupling() {
  SplitMix64 rng(2024);
  const int specs = 24;
  const std::uint64_t trials = 10'000;
  std::size_t realizations = 0, domination_failures = 0, oracle_failures = 0, tie_errors = 0;
  for (int k = 0; k < specs; ++k) {
    const CouplingSpec c = random_coupling_spec(rng, k);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const ModelFamily fam = sample_family(c.spec, c.sources, {t * 131 + static_cast<std::uint64_t>(k), c.perturb, {}});
      CoupledRun run;
      try {
        run = couple_models(fam, c.ties);
      } catch (const CouplingTieError&) {
        ++tie_errors;
        continue;
      }
      ++realizations;
      // T~ and T recomputed by walk enumeration, independently of the kernel.
      std::vector<double> tilde(c.spec.vertex_count(), kInfinity);
      for (std::size_t m = 0; m < fam.weights.size(); ++m) {
        const std::vector<double> Ti = oracle::walk_enumeration_times(c.spec, fam.weights[m], fam.sources[m].t);
        if (!same_times(Ti, run.per_model[m].T)) ++oracle_failures;
        for (std::size_t v = 0; v < Ti.size(); ++v) tilde[v] = std::min(tilde[v], Ti[v]);
      }
      const std::vector<double> merged =
          oracle::walk_enumeration_times(c.spec, run.merged_weights, run.merged_sources);
      if (!same_times(merged, run.merged.T)) ++oracle_failures;
      bool dominated = verify_pointwise_domination(run);
      for (std::size_t v = 0; v < merged.size(); ++v) dominated = dominated && tilde[v] <= merged[v] + 1e-12;
      if (!dominated) ++domination_failures;
    }
  }

  // Exact merged law for two-point weights on <= 3 vertices.
  struct LawCase {
    PassageSpec spec;
    std::vector<std::vector<double>> sources;
    double p_high;
  };
  const double inf = kInfinity;
  PassageSpec cycle(3);
  cycle.add_edge(0, 1, PassageLaw::two_point(0, 1, 0.375));
  cycle.add_edge(1, 2, PassageLaw::two_point(0, 1, 0.375));
  cycle.add_edge(2, 0, PassageLaw::two_point(0, 1, 0.375));
  PassageSpec pair(2);
  pair.add_edge(0, 1, PassageLaw::two_point(1, 2, 0.5));
  pair.add_edge(1, 0, PassageLaw::two_point(1, 2, 0.5));
  const std::vector<LawCase> cases = {
      {complete_graph(3, PassageLaw::two_point(0, 1, 0.25)), {{0, inf, 1}, {inf, 0, inf}}, 0.25},
      {complete_graph(3, PassageLaw::two_point(0, 2, 0.75)), {{0, inf, inf}, {inf, inf, 0.5}}, 0.75},
      {cycle, {{0, inf, inf}, {inf, 1, inf}, {inf, inf, 0}}, 0.375},
      {pair, {{0, inf}, {inf, 0.5}}, 0.5},
  };
  std::size_t law_discrepancies = 0;
  for (const LawCase& lc : cases) {
    const auto law = oracle::merged_weight_law(lc.spec, lc.sources);
    for (std::size_t e = 0; e < law.size(); ++e) {
      const PassageLaw& nominal = lc.spec.edge(e).law;
      std::map<double, oracle::Rational> expected;
      expected[nominal.high] += oracle::exact(lc.p_high);
      expected[nominal.low] += oracle::Rational(1) - oracle::exact(lc.p_high);
      if (law[e] != expected) ++law_discrepancies;
    }
  }
  return {domination_failures == 0 && oracle_failures == 0 && tie_errors == 0 && law_discrepancies == 0,
          fmt("%d specs x %llu trials: %zu realizations, %zu domination failures, %zu oracle mismatches, %zu tie "
              "errors; exact law on %zu specs, %zu discrepancies",
              specs, static_cast<unsigned long long>(trials), realizations, domination_failures, oracle_failures,
              tie_errors, cases.size(), law_discrepancies)};
}

Outcome conditional_bound() {
  bool ok = true;
  std::string detail;
  std::size_t oracle_mismatch = 0;
  for (double c : {0.02, 0.05, 0.1}) {
    const BoundReport r = verify_2c_bound(c, 8, 60);
    const double limit = 2 * c + std::pow(c, 61) / (1 - c);
    if (!(r.max_conditional <= limit) || !r.holds || r.patterns + r.null_patterns != 511) ok = false;
    detail += fmt(" c=%.2f max=%.6f<=%.6f (%zu patterns);", c, r.max_conditional, limit, r.patterns);
    for (int len = 0; len <= 6; ++len) {
      for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
        std::vector<std::uint8_t> pat(static_cast<std::size_t>(len));
        for (int j = 0; j < len; ++j) pat[static_cast<std::size_t>(j)] = (bits >> j) & 1u;
        const double e = oracle::enumerated_conditional(pat, c);
        if (std::abs(exact_conditional(pat, c, 60).probability - e) > 1e-12 * std::max(e, 1e-300)) ++oracle_mismatch;
      }
    }
  }
  if (oracle_mismatch) ok = false;
  detail += fmt(" oracle mismatches (len<=6): %zu", oracle_mismatch);
  return {ok, detail};
}

Outcome two_sided_split() {
  bool ok = true;
  std::string detail;
  for (double c : {0.01, 0.04}) {
    const std::size_t realizations = 10'000;
    std::size_t inclusion = 0, covered0 = 0;
    for (std::uint64_t seed = 0; seed < realizations; ++seed) {
      const TwoSidedSplit s = two_sided_construction(c, {-100, 101}, seed);
      inclusion += s.inclusion_holds;
      covered0 += s.covered[100];
    }
    const double emp = static_cast<double>(covered0) / realizations;
    const double limit = std::min(4 * std::sqrt(c), 1.0) + 3 * mc_se(emp, realizations);
    if (inclusion != realizations || emp > limit) ok = false;
    detail += fmt(" c=%.2f inclusion %zu/%zu coverage %.4f<=%.4f;", c, inclusion, realizations, emp, limit);
  }
  // Exact rationals: P(min(L, R) = r) from the two Geom(a) laws against (1 - c) c^r,
  // and P(min > r) against c^{r+1}, with c = a^2.
  std::size_t pmf_mismatch = 0;
  using oracle::Rational;
  for (const Rational& a : {Rational(1, 10), Rational(1, 5), Rational(1, 2), Rational(3, 8)}) {
    const Rational c = a * a;
    for (int r = 0; r <= 50; ++r) {
      Rational a_r(1), c_r(1);
      for (int k = 0; k < r; ++k) {
        a_r *= a;
        c_r *= c;
      }
      const Rational at = (1 - a) * a_r, above = a_r * a, at_least = a_r;
      const Rational pmf_min = at * at_least + above * at;
      if (pmf_min != (1 - c) * c_r) ++pmf_mismatch;
      if (above * above != c_r * c) ++pmf_mismatch;
    }
  }
  ok = ok && pmf_mismatch == 0;
  detail += fmt(" min-of-two tail identity r<=50: %zu mismatches", pmf_mismatch);
  return {ok, detail};
}

// Every 1-Lipschitz function on a 4x4 base with values in [-3, 3].
template <class Visit>
void for_each_lipschitz_4x4(Visit&& visit) {
  const LatticeWindow dom = make_box({{0, 4}, {0, 4}});
  std::vector<int> v(16, 0);
  std::function<void(int)> fill = [&](int i) {
    if (i == 16) {
      visit(LipschitzFunction(dom, v));
      return;
    }
    const int x = i / 4, y = i % 4;
    for (int h = -3; h <= 3; ++h) {
      bool ok = true;
      for (int dx = -1; dx <= 0 && ok; ++dx) {
        for (int dy = -1; dy <= 1 && ok; ++dy) {
          const int px = x + dx, py = y + dy;
          if ((dx == 0 && dy >= 0) || px < 0 || py < 0 || py > 3) continue;
          if (std::abs(v[static_cast<std::size_t>(px * 4 + py)] - h) > 1) ok = false;
        }
      }
      if (!ok) continue;
      v[static_cast<std::size_t>(i)] = h;
      fill(i + 1);
    }
  };
  fill(0);
}

Outcome stick_ball() {
  std::size_t functions = 0, checks = 0, stick_avoided = 0, counterexamples = 0, disagreements = 0;
  for_each_lipschitz_4x4([&](const LipschitzFunction& h) {
    ++functions;
    const LatticeWindow& dom = h.domain();
    for (std::size_t i = 0; i < dom.volume(); ++i) {
      const Site x = dom.site(i);
      for (int r = 1; r <= 3; ++r) {
        for (int yd = -3 - 2 * r; yd <= 3 + 2 * r; ++yd) {
          const Site y = with_height(x, yd);
          const StickBallResult s = stick_ball_check(h, y, r);
          ++checks;
          if (!s.stick_avoided) continue;
          ++stick_avoided;
          // Independent ball test over the whole graph.
          bool ball_avoided = true;
          for (std::size_t j = 0; j < dom.volume() && ball_avoided; ++j) {
            const Site g = dom.site(j);
            if (linf_distance(with_height(g, h(g)), y) < r) ball_avoided = false;
          }
          if (ball_avoided != s.ball_avoided) ++disagreements;
          if (!ball_avoided) ++counterexamples;
        }
      }
    }
  });
  return {counterexamples == 0 && disagreements == 0 && stick_avoided > 0,
          fmt("%zu functions, %zu (y, r) checks, %zu with the stick avoided, %zu counterexamples", functions, checks,
              stick_avoided, counterexamples)};
}

Outcome stretched_geometric() {
  std::size_t grid = 0, failures = 0, oracle_failures = 0;
  for (int i = 1; i <= 99; ++i) {
    const double c = i / 100.0;
    ++grid;
    if (!geom_stick_domination(c, 1e-12).holds) ++failures;
    // Direct evaluation of both tails in long double.
    const long double root = std::sqrt(static_cast<long double>(c));
    for (int k = 0; k < 100000; ++k) {
      const long double stretched = std::pow(static_cast<long double>(c), (k + 1) / 2 + 1);
      const long double target = std::pow(root, k + 1);
      if (stretched < 1e-12L && target < 1e-12L) break;
      if (stretched > target * (1 + 1e-15L)) {
        ++oracle_failures;
        break;
      }
    }
  }
  return {failures == 0 && oracle_failures == 0,
          fmt("%zu values of c, %zu library failures, %zu direct-evaluation failures", grid, failures, oracle_failures)};
}

Outcome end_to_end_embedding() {
  std::size_t completed = 0, clean = 0;
  std::string reasons;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    EmbedConfig config;
    config.d = 2;
    config.p = 0.99;
    config.seed = seed;
    config.width = 200;
    config.height = 200;
    const EmbedRun run = run_embedding(config);
    if (!run.complete) {
      if (reasons.size() < 200) reasons += " seed " + std::to_string(seed) + ": " + run.reason + ";";
      continue;
    }
    ++completed;
    if (run.report.ok() && run.stack_invariants.ok() && run.perp_invariants.ok()) ++clean;
  }
  return {completed > 0 && clean == completed,
          fmt("completed %zu/20, zero violations in %zu/%zu completed runs", completed, clean, completed) + reasons};
}

Outcome obstacle_domination() {
  const DominationSettings s = default_domination_settings(0.97, 7, 10'000);
  const DominationReport r = domination_evidence(s, {count_in_window(s.region), indicator_of(Site{0, 1})});
  bool ok = r.trials == 10'000;
  std::string detail = fmt("%zu trials;", r.trials);
  for (const FunctionalEstimate& f : r.functionals) {
    const double se = std::sqrt(f.dependent_se * f.dependent_se + f.independent_se * f.independent_se);
    if (f.dependent_mean > f.independent_mean + 3 * se) ok = false;
    detail += fmt(" %s dependent %.5f vs independent %.5f (+3se %.5f);", f.name.c_str(), f.dependent_mean,
                  f.independent_mean, 3 * se);
  }
  return {ok, detail};
}

Outcome render_figure() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "combperc_acceptance_render";
  fs::remove_all(dir);
  std::ostringstream out, err;
  const int code = run_cli({"render", "--d", "2", "--p", "0.885", "--window", "40x60", "--out", dir.string()}, out, err);
  std::ifstream in(dir / "figure.svg");
  std::stringstream svg;
  svg << in.rdbuf();
  const std::string s = svg.str();
  std::size_t layers = 0;
  for (const char* id : kLayerIds) layers += s.find(std::string("id=\"") + id + "\"") != std::string::npos;
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t at = s.find(needle); at != std::string::npos; at = s.find(needle, at + 1)) ++n;
    return n;
  };
  const bool well_formed = s.find("<svg") != std::string::npos && s.find("</svg>") != std::string::npos &&
                           count("<g") == count("</g>");
  return {code == 0 && well_formed && layers == 6,
          fmt("exit %d, %zu bytes, %zu/6 layers, %s", code, s.size(), layers, well_formed ? "well formed" : "malformed")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"01 surfaces equal brute-force reach sets", surfaces_match_bruteforce},
      {"02 stack invariants on certified interiors", stack_invariants},
      {"03 L-tail bound", l_tail_bound},
      {"04 bad set equals union of obstacles", bad_set_identity},
      {"05 obstacle radius tail", radius_tail},
      {"06 FPP coupling domination and merged law", fpp_coupling},
      {"07 one-sided conditional coverage <= 2c", conditional_bound},
      {"08 two-sided split", two_sided_split},
      {"09 stick avoidance implies ball avoidance", stick_ball},
      {"10 (2G-1)+ below Geom(sqrt c)", stretched_geometric},
      {"11 end-to-end comb embedding", end_to_end_embedding},
      {"12 obstacle domination evidence", obstacle_domination},
      {"13 layered figure", render_figure},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
