#pragma once

// Two-dimensional pictures of the construction: closed sites, the stacked
// surfaces, good sites, the perpendicular surface H, three selected anchors and
// their obstacles. SVG groups carry one id per layer; PPM is a flat raster.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "combperc/embedding.hpp"
#include "combperc/obstacles.hpp"
#include "combperc/surfaces.hpp"

namespace combperc {

inline constexpr const char* kLayerIds[] = {"closed-sites",          "stacked-surfaces",
                                            "good-sites",            "perpendicular-surface",
                                            "selected-sites",        "obstacles"};

struct Scene {
  LatticeWindow view;  // the certified interior that gets drawn
  PercolationField field;
  std::optional<SurfaceStack> stack;
  std::optional<GoodBadField> classes;
  std::optional<PerpSurface> H;
  std::vector<Obstacle> selected;  // the anchors with the largest certified obstacles
};

// d = 2 only. `width` x `height` interior with heights [0, height).
Scene build_scene(double p, std::uint64_t seed, int width, int height, int padding,
                  int perp_padding, int selected = 3);

// `metadata` is embedded verbatim (inside CDATA) in the SVG <metadata> element.
void render_svg(std::ostream& os, const Scene& scene, const std::string& metadata);

// Binary P6; `comment` goes into a header comment line.
void render_ppm(std::ostream& os, const Scene& scene, int scale, const std::string& comment);

}  // namespace combperc
