#pragma once

// Minimal SVG writer for tessellation snapshots: window frame, Voronoi cell
// outlines, Delaunay edges, generator dots.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "delaunay.hpp"
#include "voronoi.hpp"

namespace vorpoly {

class SvgCanvas {
 public:
  SvgCanvas(const Box2& world, double pixels = 800)
      : world_(world), px_(pixels),
        scale_(pixels / std::max(world.hi[0] - world.lo[0], world.hi[1] - world.lo[1])) {}

  void polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width,
                bool close = false) {
    if (pts.size() < 2) return;
    body_ << "<path d=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      body_ << (i ? "L" : "M") << sx(pts[i][0]) << ' ' << sy(pts[i][1]);
    }
    if (close) body_ << "Z";
    body_ << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width
          << "\"/>\n";
  }

  void dot(const Vec2& p, const std::string& fill, double radius) {
    body_ << "<circle cx=\"" << sx(p[0]) << "\" cy=\"" << sy(p[1]) << "\" r=\"" << radius
          << "\" fill=\"" << fill << "\"/>\n";
  }

  void segment(const Vec2& a, const Vec2& b, const std::string& stroke, double width) {
    polyline({a, b}, stroke, width);
  }

  bool write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) return false;
    double w = (world_.hi[0] - world_.lo[0]) * scale_;
    double h = (world_.hi[1] - world_.lo[1]) * scale_;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return (bool)out;
  }

 private:
  Box2 world_;
  double px_, scale_;
  std::ostringstream body_;

  double sx(double x) const { return (x - world_.lo[0]) * scale_; }
  double sy(double y) const { return (world_.hi[1] - y) * scale_; }  // y up
};

inline bool write_tessellation_svg(const Triangulation& tr, const std::string& path) {
  SvgCanvas canvas(tr.window());
  // Voronoi cells
  std::vector<int> scratch;
  for (std::size_t v = 0; v < tr.n_real(); ++v) {
    VoronoiCell cell = voronoi_cell(tr, (int)v, scratch);
    canvas.polyline(cell.poly, "#888888", 0.7, true);
  }
  // Delaunay edges
  for (auto [u, v] : tr.real_edges())
    canvas.segment(tr.point(u), tr.point(v), "#1f77b4", 0.5);
  for (std::size_t v = 0; v < tr.n_real(); ++v) canvas.dot(tr.point((int)v), "#d62728", 1.6);
  return canvas.write(path);
}

}  // namespace vorpoly
