#pragma once

// Deterministic SVG figures: tessellations are drawn as run-length-merged
// axis-aligned rasters of the grid nodes (one fill color per site), planar
// domains get the polygon outline and optional level-curve / chord overlays,
// sphere tessellations are drawn in equirectangular projection. All numbers
// are emitted with fixed precision so identical inputs give identical bytes.

#include <array>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "ottess/geometry.hpp"
#include "ottess/topology.hpp"

namespace ottess {

struct RenderExtras {
  std::vector<std::vector<Vec2>> polylines;          // e.g. level curves
  std::vector<std::array<Vec2, 2>> dashed_segments;  // e.g. the witness chord
  std::vector<Vec2> cross_markers;                   // e.g. chord crossings
};

namespace detail {

inline const char* site_color(int index) {
  static constexpr std::array<const char*, 12> palette = {
      "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
      "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295"};
  return palette[static_cast<std::size_t>(index) % palette.size()];
}

struct SvgWriter {
  std::string out;

  void raw(const std::string& s) { out += s; }

  void tag(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    out += buf;
  }
};

}  // namespace detail

inline std::string render_svg(const Tessellation& tess, const RenderExtras& extras = {}) {
  const Grid& grid = *tess.grid;
  detail::SvgWriter svg;

  if (grid.kind == DomainKind::EuclideanPolygon) {
    const auto [lo, hi] = tess.domain.bounding_box();
    const double h = grid.spacing;
    const double margin = 12.0;
    const double span = std::max(hi.x - lo.x, hi.y - lo.y);
    const double scale = 800.0 / span;
    const double width = (hi.x - lo.x) * scale + 2 * margin;
    const double height = (hi.y - lo.y) * scale + 2 * margin;
    auto sx = [&](double x) { return margin + (x - lo.x) * scale; };
    auto sy = [&](double y) { return margin + (hi.y - y) * scale; };

    svg.tag("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.1f\" height=\"%.1f\" "
            "viewBox=\"0 0 %.1f %.1f\">\n",
            width, height, width, height);
    svg.raw("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // node raster, horizontal runs merged per lattice row
    for (int iy = 0; iy < grid.ny; ++iy) {
      int run_start = -1;
      int run_value = -2;
      auto flush = [&](int ix_end) {
        if (run_start < 0) return;
        const double x0 = grid.origin.x + run_start * h - 0.5 * h;
        const double x1 = grid.origin.x + (ix_end - 1) * h + 0.5 * h;
        const double yc = grid.origin.y + iy * h;
        svg.tag("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                sx(x0), sy(yc + 0.5 * h), (x1 - x0) * scale, h * scale,
                detail::site_color(run_value));
        run_start = -1;
      };
      for (int ix = 0; ix < grid.nx; ++ix) {
        const int id = grid.node_at(ix, iy);
        const int value = id < 0 ? -2 : tess.assignments[id].value;
        if (id < 0) {
          flush(ix);
          continue;
        }
        if (run_start < 0) {
          run_start = ix;
          run_value = value;
        } else if (value != run_value) {
          flush(ix);
          run_start = ix;
          run_value = value;
        }
      }
      flush(grid.nx);
    }

    const std::vector<Vec2>& vs = tess.domain.vertices();
    svg.raw("<polygon points=\"");
    for (const Vec2& v : vs) svg.tag("%.2f,%.2f ", sx(v.x), sy(v.y));
    svg.raw("\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n");

    for (const auto& line : extras.polylines) {
      svg.raw("<polyline points=\"");
      for (const Vec2& v : line) svg.tag("%.2f,%.2f ", sx(v.x), sy(v.y));
      svg.raw("\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>\n");
    }
    for (const auto& seg : extras.dashed_segments)
      svg.tag("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\" "
              "stroke-width=\"1.0\" stroke-dasharray=\"6 4\"/>\n",
              sx(seg[0].x), sy(seg[0].y), sx(seg[1].x), sy(seg[1].y));
    for (const Vec2& c : extras.cross_markers)
      svg.tag("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3.5\" fill=\"none\" stroke=\"black\" "
              "stroke-width=\"1.2\"/>\n",
              sx(c.x), sy(c.y));
    for (std::size_t i = 0; i < tess.sites.size(); ++i) {
      const Vec2 q = tess.sites[i].position.xy();
      svg.tag("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4.0\" fill=\"%s\" stroke=\"black\" "
              "stroke-width=\"1.2\"/>\n",
              sx(q.x), sy(q.y), detail::site_color(static_cast<int>(i)));
    }
    svg.raw("</svg>\n");
    return svg.out;
  }

  // sphere: equirectangular projection, longitude 0..2pi left to right,
  // north pole on top; cells tile the rectangle so the left and right edges
  // meet consistently across the wraparound.
  const double width = 800.0;
  const double height = 400.0;
  const double dlon = 2.0 * kPi / grid.n_lon;
  const double dlat = kPi / grid.n_lat;
  auto sx = [&](double lon) { return lon / (2.0 * kPi) * width; };
  auto sy = [&](double lat) { return (kPi / 2.0 - lat) / kPi * height; };

  svg.tag("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.1f\" height=\"%.1f\" "
          "viewBox=\"0 0 %.1f %.1f\">\n",
          width, height, width, height);
  for (int k = 0; k < grid.n_lat; ++k) {
    const double lat_top = -kPi / 2.0 + (k + 1) * dlat;
    int run_start = 0;
    int run_value = tess.assignments[grid.sphere_node(k, 0)].value;
    auto flush = [&](int l_end) {
      svg.tag("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
              sx(run_start * dlon), sy(lat_top), (l_end - run_start) * dlon / (2.0 * kPi) * width,
              dlat / kPi * height, detail::site_color(run_value));
    };
    for (int l = 1; l < grid.n_lon; ++l) {
      const int value = tess.assignments[grid.sphere_node(k, l)].value;
      if (value != run_value) {
        flush(l);
        run_start = l;
        run_value = value;
      }
    }
    flush(grid.n_lon);
  }
  for (std::size_t i = 0; i < tess.sites.size(); ++i) {
    const Vec3 q = tess.sites[i].position.xyz();
    double lon = std::atan2(q.y, q.x);
    if (lon < 0) lon += 2.0 * kPi;
    const double lat = std::asin(std::clamp(q.z, -1.0, 1.0));
    svg.tag("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4.0\" fill=\"%s\" stroke=\"black\" "
            "stroke-width=\"1.2\"/>\n",
            sx(lon), sy(lat), detail::site_color(static_cast<int>(i)));
  }
  svg.raw("</svg>\n");
  return svg.out;
}

}  // namespace ottess
