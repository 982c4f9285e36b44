#pragma once

#include <string>
#include <vector>

#include "polybill/dynamics.hpp"

namespace polybill::cli {

/// 600x600 canvas mapping a world box with equal scales on both axes.
class SvgCanvas {
 public:
  static constexpr int kSize = 600;
  static constexpr double kMargin = 40.0;

  SvgCanvas(double xmin, double xmax, double ymin, double ymax);

  void polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width);
  void segment(const Vec2& a, const Vec2& b, const std::string& stroke, double width);
  void dot(const Vec2& p, double radius_px, const std::string& fill);
  void label(const Vec2& p, const std::string& text);
  std::string str() const;

 private:
  Vec2 map(const Vec2& p) const;

  double xmin_, ymin_, scale_, xoff_, yoff_;
  std::string body_;
};

/// Generating curves of the lens in the (R, z) half-plane.
std::string figure_lens_profile(const PiecewiseSurfaceTable& lens);
/// The four conic arcs of the tetragon in the (R, z) half-plane.
std::string figure_tetragon_profile(const PiecewiseSurfaceTable& torus);
/// Table outline with the orbit's chords.
std::string figure_orbit2d(const PlanarTable& table, const Orbit& orbit);
/// Chords projected on the (x1, x3) plane for surfaces, (x1, x2) for wires.
std::string figure_orbit3d_projection(const Table& table, const Orbit& orbit);

}  // namespace polybill::cli
