#include "combperc/render.hpp"

#include <algorithm>
#include <array>
#include <ostream>

#include "combperc/pipeline.hpp"

namespace combperc {

namespace {

constexpr int kCell = 12;
constexpr int kMargin = 6;

Range longest_certified_run(const SurfaceStack& stack) {
  const LatticeWindow inner = stack.horizontal().interior();
  Range best{0, 0}, run{0, 0};
  for (int n = stack.n_range().lo; n < stack.n_range().hi; ++n) {
    bool all = true;
    for (std::size_t i = 0; i < inner.volume() && all; ++i) all = stack.certified(n, inner.site(i));
    if (!all) {
      run = {0, 0};
      continue;
    }
    if (run.empty()) run = {n, n};
    run.hi = n + 1;
    if (run.size() > best.size()) best = run;
  }
  return best;
}

struct Frame {
  Range xs, hs;
  double px(int x) const { return kMargin + (x - xs.lo) * kCell + kCell / 2.0; }
  double py(int h) const { return kMargin + (hs.hi - 1 - h) * kCell + kCell / 2.0; }
  bool contains(int x, int h) const { return xs.contains(x) && hs.contains(h); }
};

}  // namespace

Scene build_scene(double p, std::uint64_t seed, int width, int height, int padding, int perp_padding,
                  int selected) {
  EmbedConfig cfg;
  cfg.d = 2;
  cfg.p = p;
  cfg.seed = seed;
  cfg.width = width;
  cfg.height = height;
  cfg.padding = padding;
  cfg.perp_padding = perp_padding;
  const LatticeWindow window = embed_window(cfg);

  Scene s;
  s.view = window.interior();
  s.field = sample_field(p, window, seed);
  const PercolationField reference = sample_field(p, window.expanded(padding), seed);
  s.stack = certified_stack(s.field, reference, {0, std::max(1, height / 2)});
  s.classes = classify_good_bad(*s.stack);

  const Range layers = longest_certified_run(*s.stack);
  if (!layers.empty()) {
    PerpRegion region{{s.view.range(0)}, layers};
    try {
      s.H = build_perpendicular_surface(*s.classes, region, perp_padding);
    } catch (const EmbeddingError&) {
      s.H.reset();
    }
  }

  std::vector<Obstacle> candidates;
  for (const Site& y : window_anchors(s.view)) {
    Obstacle ob = obstacle_at(s.field, y);
    if (ob.certified && !ob.members.empty()) candidates.push_back(std::move(ob));
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Obstacle& a, const Obstacle& b) {
    return a.members.size() > b.members.size();
  });
  for (Obstacle& ob : candidates) {
    if (static_cast<int>(s.selected.size()) >= selected) break;
    s.selected.push_back(std::move(ob));
  }
  return s;
}

void render_svg(std::ostream& os, const Scene& scene, const std::string& metadata) {
  if (scene.view.dim() != 2) throw std::invalid_argument("render_svg: two-dimensional scenes only");
  const Frame fr{scene.view.range(0), scene.view.range(1)};
  const int w = 2 * kMargin + fr.xs.size() * kCell;
  const int h = 2 * kMargin + fr.hs.size() * kCell;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
     << "<metadata><![CDATA[" << metadata << "]]></metadata>\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  os << "<g id=\"closed-sites\" fill=\"#222222\">\n";
  for (std::size_t i = 0; i < scene.view.volume(); ++i) {
    const Site z = scene.view.site(i);
    if (scene.field.is_open(z)) continue;
    os << "<rect x=\"" << fr.px(z[0]) - kCell * 0.35 << "\" y=\"" << fr.py(z[1]) - kCell * 0.35
       << "\" width=\"" << kCell * 0.7 << "\" height=\"" << kCell * 0.7 << "\"/>\n";
  }
  os << "</g>\n";

  os << "<g id=\"stacked-surfaces\" fill=\"none\" stroke=\"#3a6fb0\" stroke-width=\"1.5\">\n";
  if (scene.stack) {
    const SurfaceStack& st = *scene.stack;
    for (int n = st.n_range().lo; n < st.n_range().hi; ++n) {
      std::vector<std::pair<int, int>> pts;
      auto flush = [&] {
        if (pts.size() >= 2) {
          os << "<polyline points=\"";
          for (const auto& [x, l] : pts) os << fr.px(x) << ',' << fr.py(l) << ' ';
          os << "\"/>\n";
        }
        pts.clear();
      };
      for (int x = fr.xs.lo; x < fr.xs.hi; ++x) {
        const Site xs{x};
        if (st.certified(n, xs) && fr.contains(x, st.height(n, xs))) {
          pts.emplace_back(x, st.height(n, xs));
        } else {
          flush();
        }
      }
      flush();
    }
  }
  os << "</g>\n";

  os << "<g id=\"good-sites\" fill=\"#4caf50\">\n";
  if (scene.classes) {
    for (std::size_t i = 0; i < scene.view.volume(); ++i) {
      const Site z = scene.view.site(i);
      if (scene.classes->at(z) == SiteClass::kGood && scene.classes->certified(z)) {
        os << "<circle cx=\"" << fr.px(z[0]) << "\" cy=\"" << fr.py(z[1]) << "\" r=\"" << kCell * 0.22
           << "\"/>\n";
      }
    }
  }
  os << "</g>\n";

  os << "<g id=\"perpendicular-surface\" fill=\"none\" stroke=\"#d81b60\" stroke-width=\"2\">\n";
  if (scene.H) {
    const LatticeWindow& dom = scene.H->domain();
    std::vector<std::pair<int, int>> pts;
    auto flush = [&] {
      if (!pts.empty()) {
        os << "<polyline points=\"";
        for (const auto& [x, l] : pts) os << fr.px(x) << ',' << fr.py(l) << ' ';
        os << "\"/>\n";
      }
      pts.clear();
    };
    for (std::size_t i = 0; i < dom.volume(); ++i) {
      const Site u = PerpSurface::original_point(dom.site(i));
      if (scene.H->certified(u) && fr.contains(scene.H->value(u), u[0])) {
        pts.emplace_back(scene.H->value(u), u[0]);
      } else {
        flush();
      }
    }
    flush();
  }
  os << "</g>\n";

  static constexpr std::array<const char*, 3> kColours = {"#ff9800", "#9c27b0", "#009688"};
  os << "<g id=\"selected-sites\" stroke=\"black\">\n";
  for (std::size_t k = 0; k < scene.selected.size(); ++k) {
    const Site& y = scene.selected[k].anchor;
    os << "<circle cx=\"" << fr.px(y[0]) << "\" cy=\"" << fr.py(y[1]) << "\" r=\"" << kCell * 0.4
       << "\" fill=\"" << kColours[k % kColours.size()] << "\"/>\n";
  }
  os << "</g>\n";

  os << "<g id=\"obstacles\" fill-opacity=\"0.45\">\n";
  for (std::size_t k = 0; k < scene.selected.size(); ++k) {
    for (const Site& z : scene.selected[k].members) {
      if (!fr.contains(z[0], z[1])) continue;
      os << "<rect x=\"" << fr.px(z[0]) - kCell / 2.0 << "\" y=\"" << fr.py(z[1]) - kCell / 2.0
         << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\""
         << kColours[k % kColours.size()] << "\"/>\n";
    }
  }
  os << "</g>\n</svg>\n";
}

void render_ppm(std::ostream& os, const Scene& scene, int scale, const std::string& comment) {
  if (scene.view.dim() != 2) throw std::invalid_argument("render_ppm: two-dimensional scenes only");
  if (scale < 1) throw std::invalid_argument("render_ppm: scale must be positive");
  const Range xs = scene.view.range(0), hs = scene.view.range(1);
  using Rgb = std::array<std::uint8_t, 3>;
  std::vector<Rgb> cells(static_cast<std::size_t>(xs.size()) * static_cast<std::size_t>(hs.size()),
                         Rgb{255, 255, 255});
  auto cell = [&](int x, int h) -> Rgb& {
    return cells[static_cast<std::size_t>(hs.hi - 1 - h) * static_cast<std::size_t>(xs.size()) +
                 static_cast<std::size_t>(x - xs.lo)];
  };
  auto inside = [&](int x, int h) { return xs.contains(x) && hs.contains(h); };
  for (std::size_t i = 0; i < scene.view.volume(); ++i) {
    const Site z = scene.view.site(i);
    if (!scene.field.is_open(z)) {
      cell(z[0], z[1]) = {34, 34, 34};
    } else if (scene.classes && scene.classes->at(z) == SiteClass::kGood && scene.classes->certified(z)) {
      cell(z[0], z[1]) = {190, 230, 190};
    }
  }
  if (scene.stack) {
    const SurfaceStack& st = *scene.stack;
    for (int n = st.n_range().lo; n < st.n_range().hi; ++n) {
      for (int x = xs.lo; x < xs.hi; ++x) {
        const Site xv{x};
        if (st.certified(n, xv) && inside(x, st.height(n, xv))) cell(x, st.height(n, xv)) = {58, 111, 176};
      }
    }
  }
  static constexpr std::array<Rgb, 3> kColours = {Rgb{255, 152, 0}, Rgb{156, 39, 176}, Rgb{0, 150, 136}};
  for (std::size_t k = 0; k < scene.selected.size(); ++k) {
    for (const Site& z : scene.selected[k].members) {
      if (inside(z[0], z[1])) cell(z[0], z[1]) = kColours[k % 3];
    }
  }
  if (scene.H) {
    const LatticeWindow& dom = scene.H->domain();
    for (std::size_t i = 0; i < dom.volume(); ++i) {
      const Site u = PerpSurface::original_point(dom.site(i));
      if (scene.H->certified(u) && inside(scene.H->value(u), u[0])) cell(scene.H->value(u), u[0]) = {216, 27, 96};
    }
  }
  for (std::size_t k = 0; k < scene.selected.size(); ++k) {
    const Site& y = scene.selected[k].anchor;
    if (inside(y[0], y[1])) cell(y[0], y[1]) = {0, 0, 0};
  }

  os << "P6\n# " << comment << "\n" << xs.size() * scale << ' ' << hs.size() * scale << "\n255\n";
  for (int row = 0; row < hs.size(); ++row) {
    for (int r = 0; r < scale; ++r) {
      for (int col = 0; col < xs.size(); ++col) {
        const Rgb& c = cells[static_cast<std::size_t>(row) * static_cast<std::size_t>(xs.size()) +
                             static_cast<std::size_t>(col)];
        for (int s = 0; s < scale; ++s) os.write(reinterpret_cast<const char*>(c.data()), 3);
      }
    }
  }
}

}  // namespace combperc
