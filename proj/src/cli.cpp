#include "combperc/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "combperc/domination1d.hpp"
#include "combperc/embedding.hpp"
#include "combperc/field_io.hpp"
#include "combperc/fpp_io.hpp"
#include "combperc/obstacles.hpp"
#include "combperc/pipeline.hpp"
#include "combperc/render.hpp"
#include "combperc/rng.hpp"
#include "combperc/stats.hpp"
#include "combperc/surfaces.hpp"

namespace combperc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An invariant failed; the artifacts are still written.
struct Outcome {
  json summary = json::object();
  std::vector<std::string> artifacts;
  std::vector<std::string> failures;
};

const std::vector<std::string> kSubcommands = {"sample",     "surfaces",   "obstacles", "embed",
                                               "dominate-1d", "fpp-couple", "render",    "bounds"};

std::string default_format(const std::string& sub) {
  if (sub == "sample" || sub == "surfaces" || sub == "fpp-couple") return "csv";
  if (sub == "render") return "svg";
  return "json";
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const RunConfig& c) {
  require(std::find(kSubcommands.begin(), kSubcommands.end(), c.subcommand) != kSubcommands.end(),
          "unknown subcommand '" + c.subcommand + "'");
  require(c.d >= 2 && c.d <= kMaxDim, "d must lie in [2, " + std::to_string(kMaxDim) + "]");
  require(c.p >= 0.0 && c.p <= 1.0, "p must lie in [0, 1]");
  require(c.q < 0.0 || c.q <= 1.0, "q must lie in [0, 1]");
  require(c.width >= 1 && c.height >= 2, "window must be at least 1x2");
  require(c.padding >= 1 && c.perp_padding >= 1, "padding must be positive");
  require(c.trials >= 1, "trials must be positive");
  require(c.c > 0.0 && c.c < 1.0, "c must lie in (0, 1)");
  require(c.max_length >= 0 && c.max_length <= 20, "max-length must lie in [0, 20]");
  require(c.w_max >= 1, "w-max must be positive");
  require(c.M >= 1, "M must be positive");
  require(c.h_max >= 0, "h-max must be non-negative");
  require(c.n_lo >= 0 && (c.n_hi < 0 || c.n_hi > c.n_lo), "n-range must be a non-empty a:b with a >= 0");
  const std::vector<std::string> allowed =
      c.subcommand == "render" ? std::vector<std::string>{"svg", "ppm"} : std::vector<std::string>{"csv", "json"};
  require(std::find(allowed.begin(), allowed.end(), c.format) != allowed.end(),
          "format '" + c.format + "' not supported by " + c.subcommand);
  if (c.subcommand == "render") require(c.d == 2, "render draws d = 2 slices only");
}

LatticeWindow config_window(const RunConfig& c) {
  EmbedConfig e;
  e.d = c.d;
  e.width = c.width;
  e.height = c.height;
  e.padding = c.padding;
  e.perp_padding = c.perp_padding;
  return embed_window(e);
}

std::string csv_config_line(const RunConfig& c) { return "# config: " + config_to_json(c).dump() + "\n"; }

std::string write_artifact(const RunConfig& c, const std::string& name, const std::string& content) {
  const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  return path.string();
}

std::string height_text(int h) { return h == kAboveWindow ? std::string("above") : std::to_string(h); }

json site_json(const Site& z) {
  json a = json::array();
  for (int i = 0; i < z.dim; ++i) a.push_back(z[i]);
  return a;
}

void coords_header(std::ostream& os, int dims, const char* prefix) {
  for (int a = 0; a < dims; ++a) os << prefix << a + 1 << ',';
}

void coords_row(std::ostream& os, const Site& z) {
  for (int a = 0; a < z.dim; ++a) os << z[a] << ',';
}

json stack_report(const StackInvariantReport& r) {
  return {{"checked", r.checked}, {"L1", r.l1}, {"L2", r.l2}, {"L3", r.l3}, {"L4", r.l4}, {"examples", r.examples}};
}

// ---------------------------------------------------------------------------

Outcome cmd_sample(const RunConfig& c) {
  const LatticeWindow w = config_window(c);
  const PercolationField field = sample_field(c.p, w, c.seed);
  Outcome o;
  const double frac = static_cast<double>(field.open_count()) / static_cast<double>(w.volume());
  o.summary["open_fraction"] = frac;
  o.summary["sites"] = w.volume();
  if (c.format == "json") {
    json doc = {{"config", config_to_json(c)}, {"field", field_to_json(field)}};
    o.artifacts.push_back(write_artifact(c, "field.json", doc.dump(2) + "\n"));
  } else {
    std::ostringstream os;
    os << csv_config_line(c);
    coords_header(os, c.d, "z");
    os << "open\n";
    for (std::size_t i = 0; i < w.volume(); ++i) {
      coords_row(os, w.site(i));
      os << (field.open_at(i) ? 1 : 0) << '\n';
    }
    o.artifacts.push_back(write_artifact(c, "field.csv", os.str()));
  }
  return o;
}

Outcome cmd_surfaces(const RunConfig& c) {
  const LatticeWindow w = config_window(c);
  const PercolationField field = sample_field(c.p, w, c.seed);
  const PercolationField reference = sample_field(c.p, w.expanded(c.padding), c.seed);
  const SurfaceStack stack = certified_stack(field, reference, {c.n_lo, c.effective_n_hi()});
  const GoodBadField classes = classify_good_bad(stack);
  const StackInvariantReport inv = check_stack_invariants(stack, field);

  Outcome o;
  o.summary["certified"] = stack.certified_count();
  o.summary["invariants"] = stack_report(inv);
  if (!inv.ok()) o.failures.push_back("stack invariants (L1)-(L4) violated");
  const LatticeWindow& hw = stack.horizontal();
  std::size_t bad = 0, good = 0;
  for (const Site& z : classes.bad_sites(true)) (void)z, ++bad;
  for (std::size_t i = 0; i < w.volume(); ++i) {
    const Site z = w.site(i);
    if (classes.at(z) == SiteClass::kGood && classes.certified(z)) {
      ++good;
      if (!field.is_open(z)) o.failures.push_back("good site " + to_string(z) + " is closed");
    }
  }
  o.summary["good_certified"] = good;
  o.summary["bad_certified"] = bad;

  if (c.format == "csv") {
    std::ostringstream s;
    s << csv_config_line(c);
    coords_header(s, c.d - 1, "x");
    s << "n,L,certified\n";
    for (int n = stack.n_range().lo; n < stack.n_range().hi; ++n) {
      for (std::size_t i = 0; i < hw.volume(); ++i) {
        const Site x = hw.site(i);
        coords_row(s, x);
        s << n << ',' << height_text(stack.height(n, x)) << ',' << (stack.certified(n, x) ? 1 : 0) << '\n';
      }
    }
    o.artifacts.push_back(write_artifact(c, "surfaces.csv", s.str()));
    std::ostringstream g;
    g << csv_config_line(c);
    coords_header(g, c.d, "z");
    g << "class,certified\n";
    for (std::size_t i = 0; i < w.volume(); ++i) {
      const Site z = w.site(i);
      if (classes.at(z) == SiteClass::kUnclassified) continue;
      coords_row(g, z);
      g << (classes.is_bad(z) ? "bad" : "good") << ',' << (classes.certified(z) ? 1 : 0) << '\n';
    }
    o.artifacts.push_back(write_artifact(c, "goodbad.csv", g.str()));
  } else {
    json rows = json::array();
    for (int n = stack.n_range().lo; n < stack.n_range().hi; ++n) {
      for (std::size_t i = 0; i < hw.volume(); ++i) {
        const Site x = hw.site(i);
        rows.push_back({{"n", n}, {"x", site_json(x)}, {"L", height_text(stack.height(n, x))},
                        {"certified", stack.certified(n, x)}});
      }
    }
    json doc = {{"config", config_to_json(c)}, {"stack", rows}, {"invariants", stack_report(inv)}};
    o.artifacts.push_back(write_artifact(c, "surfaces.json", doc.dump(2) + "\n"));
  }
  return o;
}

Outcome cmd_obstacles(const RunConfig& c) {
  const LatticeWindow w = config_window(c);
  const PercolationField field = sample_field(c.p, w, c.seed);
  const PercolationField reference = sample_field(c.p, w.expanded(c.padding), c.seed);
  const Range v = w.vertical();
  const SurfaceStack stack = certified_stack(field, reference, {0, v.hi / 2 + 1});
  const std::vector<Obstacle> all = obstacles_in_window(field);
  const BadSetReport identity = bad_set_identity_check(classify_good_bad(stack), all);

  Outcome o;
  o.summary["bad_set_identity"] = {{"identical", identity.identical}, {"compared", identity.compared}};
  if (!identity.identical) o.failures.push_back("bad set differs from the union of obstacles");

  // Radius tail at the origin over independent environments.
  const double q = 1.0 - c.p;
  std::vector<int> radii;
  std::size_t uncertified = 0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    const Obstacle ob = sample_obstacle(c.p, hash_words(c.seed, {0x7a11ULL, t}), Site(c.d));
    if (!ob.certified) {
      ++uncertified;
      continue;
    }
    radii.push_back(ob.radius);
    if (ob.radius == 1) o.failures.push_back("obstacle radius 1 observed");
  }
  json tail = json::array();
  const double n = static_cast<double>(std::max<std::size_t>(radii.size(), 1));
  for (int r = 0; r <= 8; ++r) {
    const double emp = static_cast<double>(std::count_if(radii.begin(), radii.end(), [&](int R) { return R > r; })) / n;
    const double se = proportion_standard_error(emp, radii.size());
    json row = {{"r", r}, {"empirical", emp}, {"se", se}};
    try {
      const double b = radius_tail_bound(r, q, c.d);
      row["bound"] = b;
      row["within"] = emp <= b + 3.0 * se;
      if (emp > b + 3.0 * se) o.failures.push_back("radius tail above bound at r=" + std::to_string(r));
    } catch (const BoundDivergenceError&) {
      row["bound"] = nullptr;
    }
    tail.push_back(row);
  }
  o.summary["radius_samples"] = radii.size();
  o.summary["radius_uncertified"] = uncertified;

  json list = json::array();
  for (const Obstacle& ob : all) {
    if (ob.members.empty() || !w.in_interior(ob.anchor)) continue;
    json members = json::array();
    for (const Site& z : ob.members) members.push_back(site_json(z));
    list.push_back({{"anchor", site_json(ob.anchor)}, {"members", members}, {"radius", ob.radius},
                    {"certified", ob.certified}});
  }
  if (c.format == "csv") {
    std::ostringstream s;
    s << csv_config_line(c) << "anchor,members,radius,certified\n";
    for (const Obstacle& ob : all) {
      if (ob.members.empty() || !w.in_interior(ob.anchor)) continue;
      s << '"' << to_string(ob.anchor) << "\",\"";
      for (std::size_t i = 0; i < ob.members.size(); ++i) s << (i ? ";" : "") << to_string(ob.members[i]);
      s << "\"," << ob.radius << ',' << (ob.certified ? 1 : 0) << '\n';
    }
    o.artifacts.push_back(write_artifact(c, "obstacles.csv", s.str()));
  }
  json doc = {{"config", config_to_json(c)},
              {"obstacles", list},
              {"radius_tail", tail},
              {"bad_set_identity", o.summary["bad_set_identity"]}};
  o.artifacts.push_back(write_artifact(c, "obstacles.json", doc.dump(2) + "\n"));
  return o;
}

Outcome cmd_embed(const RunConfig& c) {
  EmbedConfig e;
  e.d = c.d;
  e.p = c.p;
  e.seed = c.seed;
  e.width = c.width;
  e.height = c.height;
  e.padding = c.padding;
  e.perp_padding = c.perp_padding;
  e.M = c.M;
  const EmbedRun run = run_embedding(e);

  Outcome o;
  json violations = json::array();
  for (const Violation& v : run.report.violations) {
    violations.push_back({{"kind", v.kind}, {"z", site_json(v.z)}, {"other", site_json(v.other)}, {"detail", v.detail}});
  }
  json region = nullptr;
  if (run.embedding) {
    region = json::array();
    for (const Range& r : run.embedding->comb.box.ranges()) region.push_back({r.lo, r.hi});
  }
  json perp = {{"checked", run.perp_invariants.checked}, {"H1", run.perp_invariants.h1},
               {"H2", run.perp_invariants.h2}, {"examples", run.perp_invariants.examples}};
  json report = {{"status", run.complete ? "complete" : "incomplete"},
                 {"reason", run.reason},
                 {"comb_window", region},
                 {"vertices", run.report.vertices},
                 {"edges", run.report.edges},
                 {"fin_max_distance", run.report.fin_max_distance},
                 {"backbone_max_distance", run.report.backbone_max_distance},
                 {"violations", violations},
                 {"stack_invariants", stack_report(run.stack_invariants)},
                 {"perp_invariants", perp}};
  o.summary = report;
  o.summary.erase("violations");
  o.summary["violation_count"] = violations.size();
  if (!run.complete) o.failures.push_back("embedding incomplete: " + run.reason);
  if (!run.report.ok()) o.failures.push_back("embedding has violations");

  json doc = {{"config", config_to_json(c)}, {"report", report}};
  o.artifacts.push_back(write_artifact(c, "embed_report.json", doc.dump(2) + "\n"));
  if (c.format == "csv" && run.embedding) {
    std::ostringstream s;
    s << csv_config_line(c);
    write_embedding_csv(s, *run.embedding);
    o.artifacts.push_back(write_artifact(c, "embedding.csv", s.str()));
  }
  return o;
}

Outcome cmd_dominate(const RunConfig& c) {
  Outcome o;
  const BoundReport b = verify_2c_bound(c.c, c.max_length, c.w_max);
  const StickDominationReport s = geom_stick_domination(c.c);
  bool inclusion = true;
  std::size_t covered = 0;
  double parameter = 0.0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    const TwoSidedSplit split = two_sided_construction(c.c, {-100, 101}, hash_words(c.seed, {0x25ULL, t}));
    inclusion = inclusion && split.inclusion_holds;
    covered += split.covered[100];
    parameter = split.parameter;
  }
  const double freq = static_cast<double>(covered) / static_cast<double>(c.trials);
  const double se = proportion_standard_error(freq, c.trials);
  json report = {
      {"conditional_bound",
       {{"c", b.c}, {"bound", b.bound}, {"tail_error", b.tail_error}, {"max_conditional", b.max_conditional},
        {"argmax_pattern", b.argmax_pattern}, {"patterns", b.patterns}, {"null_patterns", b.null_patterns},
        {"holds", b.holds}}},
      {"stick_domination", {{"checked_up_to", s.checked_up_to}, {"first_violation", s.first_violation}, {"holds", s.holds}}},
      {"two_sided",
       {{"parameter", parameter}, {"inclusion_all", inclusion}, {"coverage", freq}, {"se", se},
        {"within", freq <= parameter + 3.0 * se}}}};
  o.summary = report;
  if (!b.holds) o.failures.push_back("conditional coverage exceeds min(2c, 1)");
  if (!s.holds) o.failures.push_back("(2G-1)_+ not dominated by Geom(sqrt c)");
  if (!inclusion) o.failures.push_back("two-sided inclusion failed");
  if (freq > parameter + 3.0 * se) o.failures.push_back("two-sided coverage above min(4 sqrt c, 1)");
  json doc = {{"config", config_to_json(c)}, {"report", report}};
  o.artifacts.push_back(write_artifact(c, "dominate_1d.json", doc.dump(2) + "\n"));
  if (c.format == "csv") {
    const Range range{0, 200};
    const auto one = sample_covered(c.c, range, c.seed, false, c.w_max);
    const auto two = sample_covered(c.c, range, c.seed, true, c.w_max);
    std::ostringstream t;
    t << csv_config_line(c) << "i,one_sided,two_sided\n";
    for (int i = range.lo; i < range.hi; ++i) {
      t << i << ',' << int(one[static_cast<std::size_t>(i)]) << ',' << int(two[static_cast<std::size_t>(i)]) << '\n';
    }
    o.artifacts.push_back(write_artifact(c, "trajectory.csv", t.str()));
  }
  return o;
}

json builtin_graph() {
  return json::parse(R"({
    "vertices": ["a", "b"],
    "edges": [
      {"from": "a", "to": "b", "law": {"kind": "bernoulli", "p": 0.5}},
      {"from": "b", "to": "a", "law": {"kind": "bernoulli", "p": 0.5}}
    ],
    "models": [ {"sources": {"a": 0}}, {"sources": {"b": 0.5}} ]
  })");
}

Outcome cmd_fpp(const RunConfig& c) {
  json doc;
  if (c.graph.empty()) {
    doc = builtin_graph();
  } else {
    std::ifstream f(c.graph);
    require(static_cast<bool>(f), "cannot read graph document " + c.graph);
    try {
      doc = json::parse(f);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("graph document: ") + e.what());
    }
  }
  FppDocument g;
  try {
    g = parse_fpp_document(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("graph document: ") + e.what());
  }

  Outcome o;
  std::size_t violations = 0;
  std::optional<CoupledRun> first;
  for (std::size_t t = 0; t < c.trials; ++t) {
    FamilySampling sampling{hash_words(c.seed, {0xf99ULL, t}), g.perturb, g.amplitude};
    const ModelFamily family = sample_family(g.spec, g.sources, sampling);
    CoupledRun run = couple_models(family, g.ties);
    if (!verify_pointwise_domination(run)) ++violations;
    if (!first) first = std::move(run);
  }
  o.summary = {{"trials", c.trials}, {"domination_violations", violations}};
  if (violations) o.failures.push_back("coupled occupation times not dominated");
  if (c.format == "csv") {
    std::ostringstream s;
    s << csv_config_line(c);
    write_occupation_csv(s, g.spec, *first);
    o.artifacts.push_back(write_artifact(c, "occupation.csv", s.str()));
  }
  json out = {{"config", config_to_json(c)}, {"graph", doc}, {"summary", o.summary}};
  o.artifacts.push_back(write_artifact(c, "fpp_couple.json", out.dump(2) + "\n"));
  return o;
}

Outcome cmd_render(const RunConfig& c) {
  const Scene scene = build_scene(c.p, c.seed, c.width, c.height, c.padding, c.perp_padding);
  Outcome o;
  const std::string meta = config_to_json(c).dump();
  std::ostringstream s;
  if (c.format == "svg") {
    render_svg(s, scene, meta);
    o.artifacts.push_back(write_artifact(c, "figure.svg", s.str()));
  } else {
    render_ppm(s, scene, 6, "config: " + meta);
    o.artifacts.push_back(write_artifact(c, "figure.ppm", s.str()));
  }
  o.summary = {{"selected", scene.selected.size()}, {"perpendicular_surface", scene.H.has_value()}};
  return o;
}

Outcome cmd_bounds(const RunConfig& c) {
  const double q = c.effective_q();
  Outcome o;
  json L = json::array(), R = json::array();
  std::string l_error, r_error;
  for (int h = 0; h <= c.h_max; ++h) {
    try {
      L.push_back({{"h", h}, {"bound", tail_bound_L(h, q, c.d)}});
    } catch (const BoundDivergenceError&) {
      l_error = "L-tail bound diverges: q \u2265 K^-2 (K = " + std::to_string(path_branching_constant(c.d)) + ")";
    }
    try {
      R.push_back({{"r", h}, {"bound", radius_tail_bound(h, q, c.d)}});
    } catch (const BoundDivergenceError&) {
      r_error = "radius bound diverges: K sqrt(q) \u2265 1";
    }
  }
  if (!l_error.empty()) o.failures.push_back(l_error);
  if (!r_error.empty()) o.failures.push_back(r_error);
  const int K = path_branching_constant(c.d);
  o.summary = {{"q", q}, {"K", K}, {"L_tail_defined", l_error.empty()}, {"radius_defined", r_error.empty()}};
  if (c.format == "csv") {
    std::ostringstream s;
    s << csv_config_line(c) << "h,L_tail_bound,radius_tail_bound\n";
    for (int h = 0; h <= c.h_max; ++h) {
      s << h << ',';
      if (l_error.empty()) s << L[static_cast<std::size_t>(h)]["bound"].get<double>();
      s << ',';
      if (r_error.empty()) s << R[static_cast<std::size_t>(h)]["bound"].get<double>();
      s << '\n';
    }
    o.artifacts.push_back(write_artifact(c, "bounds.csv", s.str()));
  } else {
    json doc = {{"config", config_to_json(c)}, {"K", K}, {"q", q}, {"L_tail", L}, {"radius_tail", R}};
    if (!l_error.empty()) doc["L_tail_error"] = l_error;
    if (!r_error.empty()) doc["radius_tail_error"] = r_error;
    o.artifacts.push_back(write_artifact(c, "bounds.json", doc.dump(2) + "\n"));
  }
  return o;
}

Outcome dispatch(const RunConfig& c) {
  if (c.subcommand == "sample") return cmd_sample(c);
  if (c.subcommand == "surfaces") return cmd_surfaces(c);
  if (c.subcommand == "obstacles") return cmd_obstacles(c);
  if (c.subcommand == "embed") return cmd_embed(c);
  if (c.subcommand == "dominate-1d") return cmd_dominate(c);
  if (c.subcommand == "fpp-couple") return cmd_fpp(c);
  if (c.subcommand == "render") return cmd_render(c);
  return cmd_bounds(c);
}

void error_json(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

json config_to_json(const RunConfig& c) {
  return {{"subcommand", c.subcommand},
          {"d", c.d},
          {"p", c.p},
          {"seed", c.seed},
          {"window", {c.width, c.height}},
          {"padding", c.padding},
          {"perp_padding", c.perp_padding},
          {"n_range", {c.n_lo, c.effective_n_hi()}},
          {"trials", c.trials},
          {"format", c.format},
          {"q", c.effective_q()},
          {"c", c.c},
          {"max_length", c.max_length},
          {"w_max", c.w_max},
          {"M", c.M},
          {"h_max", c.h_max},
          {"graph", c.graph}};
}

void apply_config_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config document must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "subcommand") c.subcommand = value.get<std::string>();
      else if (key == "d") c.d = value.get<int>();
      else if (key == "p") c.p = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "window") {
        c.width = value.at(0).get<int>();
        c.height = value.at(1).get<int>();
      } else if (key == "padding") c.padding = value.get<int>();
      else if (key == "perp_padding") c.perp_padding = value.get<int>();
      else if (key == "n_range") {
        c.n_lo = value.at(0).get<int>();
        c.n_hi = value.at(1).get<int>();
      } else if (key == "trials") c.trials = value.get<std::size_t>();
      else if (key == "format") c.format = value.get<std::string>();
      else if (key == "q") c.q = value.get<double>();
      else if (key == "c") c.c = value.get<double>();
      else if (key == "max_length") c.max_length = value.get<int>();
      else if (key == "w_max") c.w_max = value.get<int>();
      else if (key == "M") c.M = value.get<int>();
      else if (key == "h_max") c.h_max = value.get<int>();
      else if (key == "graph") c.graph = value.get<std::string>();
      else if (key == "out") c.out = value.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lipschitz comb embeddings in site percolation: sampling, surfaces, obstacles, couplings"};
  app.require_subcommand(1);
  RunConfig flags;
  std::string window, n_range, config_path;

  auto* o_config = app.add_option("--config", config_path, "JSON RunConfig document");
  auto* o_d = app.add_option("--d", flags.d, "dimension");
  auto* o_p = app.add_option("--p", flags.p, "open probability");
  auto* o_seed = app.add_option("--seed", flags.seed, "64-bit seed");
  auto* o_window = app.add_option("--window", window, "certified interior WIDTHxHEIGHT");
  auto* o_padding = app.add_option("--padding", flags.padding, "padding P (certified against 2P)");
  auto* o_perp = app.add_option("--perp-padding", flags.perp_padding, "padding of the perpendicular construction");
  auto* o_nrange = app.add_option("--n-range", n_range, "layers a:b");
  auto* o_trials = app.add_option("--trials", flags.trials, "Monte Carlo trials");
  auto* o_out = app.add_option("--out", flags.out, "output directory (default $COMBPERC_OUT or .)");
  auto* o_format = app.add_option("--format", flags.format, "csv, json, svg or ppm");
  auto* o_q = app.add_option("--q", flags.q, "closed probability for bounds (default 1 - p)");
  auto* o_c = app.add_option("--c", flags.c, "geometric parameter for dominate-1d");
  auto* o_len = app.add_option("--max-length", flags.max_length, "longest history for dominate-1d");
  auto* o_wmax = app.add_option("--w-max", flags.w_max, "chain truncation for dominate-1d");
  auto* o_M = app.add_option("--M", flags.M, "spread-out range for embed");
  auto* o_hmax = app.add_option("--h-max", flags.h_max, "largest h in bound tables");
  auto* o_graph = app.add_option("--graph", flags.graph, "fpp-couple graph document");
  for (const std::string& name : kSubcommands) app.add_subcommand(name)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    error_json(err, "invalid_config", e.what());
    return 2;
  }

  RunConfig c;
  try {
    if (const char* env = std::getenv("COMBPERC_OUT")) c.out = env;
    if (o_config->count()) {
      std::ifstream f(config_path);
      require(static_cast<bool>(f), "cannot read config " + config_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config document: ") + e.what());
      }
      apply_config_json(c, j);
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    if (o_d->count()) c.d = flags.d;
    if (o_p->count()) c.p = flags.p;
    if (o_seed->count()) c.seed = flags.seed;
    if (o_window->count()) {
      const auto x = window.find('x');
      require(x != std::string::npos, "window must look like WIDTHxHEIGHT");
      try {
        c.width = std::stoi(window.substr(0, x));
        c.height = std::stoi(window.substr(x + 1));
      } catch (const std::exception&) {
        throw ConfigError("window must look like WIDTHxHEIGHT");
      }
    }
    if (o_padding->count()) c.padding = flags.padding;
    if (o_perp->count()) c.perp_padding = flags.perp_padding;
    if (o_nrange->count()) {
      const auto colon = n_range.find(':');
      require(colon != std::string::npos, "n-range must look like a:b");
      try {
        c.n_lo = std::stoi(n_range.substr(0, colon));
        c.n_hi = std::stoi(n_range.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError("n-range must look like a:b");
      }
    }
    if (o_trials->count()) c.trials = flags.trials;
    if (o_out->count()) c.out = flags.out;
    if (o_format->count()) c.format = flags.format;
    if (c.format.empty()) {
      c.format = default_format(c.subcommand);
    }
    if (o_q->count()) c.q = flags.q;
    if (o_c->count()) c.c = flags.c;
    if (o_len->count()) c.max_length = flags.max_length;
    if (o_wmax->count()) c.w_max = flags.w_max;
    if (o_M->count()) c.M = flags.M;
    if (o_hmax->count()) c.h_max = flags.h_max;
    if (o_graph->count()) c.graph = flags.graph;
    validate(c);
  } catch (const ConfigError& e) {
    error_json(err, "invalid_config", e.what());
    return 2;
  }

  try {
    const Outcome o = dispatch(c);
    json summary = {{"subcommand", c.subcommand},
                    {"status", o.failures.empty() ? "ok" : "violation"},
                    {"artifacts", o.artifacts},
                    {"result", o.summary}};
    out << summary.dump(2) << '\n';
    if (!o.failures.empty()) {
      std::string all;
      for (const std::string& f : o.failures) all += (all.empty() ? "" : "; ") + f;
      error_json(err, "violation", all);
      return 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    error_json(err, "invalid_config", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    error_json(err, "invalid_config", e.what());
    return 2;
  } catch (const std::exception& e) {
    error_json(err, "failure", e.what());
    return 1;
  }
}

}  // namespace combperc
