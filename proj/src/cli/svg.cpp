#include "polybill/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace polybill::cli {

namespace {

constexpr int kSamples = 240;
const char* kOutline = "#222222";
const char* kOrbit = "#c0392b";
const char* kAxis = "#999999";

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

struct Box {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity(), ymax = -std::numeric_limits<double>::infinity();

  void add(const Vec2& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) return;
    xmin = std::min(xmin, p[0]), xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]), ymax = std::max(ymax, p[1]);
  }
  void add(const std::vector<Vec2>& ps) {
    for (const auto& p : ps) add(p);
  }
  SvgCanvas canvas() const {
    if (!(xmin <= xmax)) return SvgCanvas(-1, 1, -1, 1);
    return SvgCanvas(xmin, xmax, ymin, ymax);
  }
};

std::vector<Vec2> sample(double lo, double hi, const std::function<Vec2(double)>& f) {
  std::vector<Vec2> out;
  for (int i = 0; i <= kSamples; ++i) out.push_back(f(lo + (hi - lo) * i / kSamples));
  return out;
}

std::vector<Vec2> mirrored(const std::vector<Vec2>& pts) {
  std::vector<Vec2> out;
  for (const auto& p : pts) out.emplace_back(-p[0], p[1]);
  return out;
}

// Profile arcs (R, z), R >= 0, of a lens or tetragon.
std::vector<std::vector<Vec2>> profile_arcs(const PiecewiseSurfaceTable& t) {
  std::vector<std::vector<Vec2>> arcs;
  if (const auto* lens = std::get_if<ParabolicLens>(&t.kind())) {
    const double redge = t.edges().front().radius;
    for (double s : {lens->s1, lens->s2}) {
      const double k = (4.0 * s * lens->c - lens->b) / (4.0 * s * lens->b);
      arcs.push_back(sample(0.0, redge, [&](double r) { return Vec2(r, s * r * r + k); }));
    }
    return arcs;
  }
  const auto& tt = std::get<TetragonTorus>(t.kind());
  const double d = tt.focal_shift, z0 = tt.b / (2.0 * tt.a);
  auto point = [&](double se, double sh) {
    return Vec2(std::sqrt((se + d) * (sh + d) / d), z0 + std::sqrt(-se * sh / d));
  };
  for (double se : {tt.s_e1, tt.s_e2})
    arcs.push_back(sample(tt.s_h1, tt.s_h2, [&](double sh) { return point(se, sh); }));
  for (double sh : {tt.s_h1, tt.s_h2})
    arcs.push_back(sample(tt.s_e1, tt.s_e2, [&](double se) { return point(se, sh); }));
  return arcs;
}

std::string profile_figure(const PiecewiseSurfaceTable& t) {
  const auto arcs = profile_arcs(t);
  Box box;
  box.add(Vec2(0.0, arcs.front().front()[1]));
  for (const auto& a : arcs) box.add(a);
  SvgCanvas svg = box.canvas();
  svg.segment(Vec2(0.0, box.ymin), Vec2(0.0, box.ymax), kAxis, 1.0);
  for (const auto& a : arcs) svg.polyline(a, kOutline, 2.0);
  for (const auto& e : t.edges()) svg.dot(Vec2(e.radius, e.height), 4.0, kOrbit);
  svg.label(Vec2(box.xmax, box.ymin), "R");
  svg.label(Vec2(0.0, box.ymax), "z");
  return svg.str();
}

void draw_chords(SvgCanvas& svg, const std::vector<Vec2>& pts) {
  for (std::size_t k = 1; k < pts.size(); ++k) svg.segment(pts[k - 1], pts[k], kOrbit, 1.0);
}

}  // namespace

SvgCanvas::SvgCanvas(double xmin, double xmax, double ymin, double ymax) : xmin_(xmin), ymin_(ymin) {
  const double w = std::max(xmax - xmin, 1e-12), h = std::max(ymax - ymin, 1e-12);
  const double avail = kSize - 2.0 * kMargin;
  scale_ = avail / std::max(w, h);
  xoff_ = kMargin + 0.5 * (avail - w * scale_);
  yoff_ = kMargin + 0.5 * (avail - h * scale_);
}

Vec2 SvgCanvas::map(const Vec2& p) const {
  // y grows downwards on the canvas
  return Vec2(xoff_ + (p[0] - xmin_) * scale_, kSize - yoff_ - (p[1] - ymin_) * scale_);
}

void SvgCanvas::polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width) {
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) + "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 q = map(pts[i]);
    if (i) body_ += ' ';
    body_ += fmt(q[0]) + "," + fmt(q[1]);
  }
  body_ += "\"/>\n";
}

void SvgCanvas::segment(const Vec2& a, const Vec2& b, const std::string& stroke, double width) {
  const Vec2 p = map(a), q = map(b);
  body_ += "<line x1=\"" + fmt(p[0]) + "\" y1=\"" + fmt(p[1]) + "\" x2=\"" + fmt(q[0]) + "\" y2=\"" + fmt(q[1]) +
           "\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) + "\"/>\n";
}

void SvgCanvas::dot(const Vec2& p, double radius_px, const std::string& fill) {
  const Vec2 q = map(p);
  body_ += "<circle cx=\"" + fmt(q[0]) + "\" cy=\"" + fmt(q[1]) + "\" r=\"" + fmt(radius_px) + "\" fill=\"" + fill +
           "\"/>\n";
}

void SvgCanvas::label(const Vec2& p, const std::string& text) {
  const Vec2 q = map(p);
  body_ += "<text x=\"" + fmt(q[0] + 6.0) + "\" y=\"" + fmt(q[1] - 6.0) +
           "\" font-family=\"sans-serif\" font-size=\"14\">" + text + "</text>\n";
}

std::string SvgCanvas::str() const {
  const std::string n = std::to_string(kSize);
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + n + "\" height=\"" + n + "\" viewBox=\"0 0 " + n +
         " " + n + "\">\n<rect width=\"" + n + "\" height=\"" + n + "\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

std::string figure_lens_profile(const PiecewiseSurfaceTable& lens) {
  if (!std::holds_alternative<ParabolicLens>(lens.kind()))
    throw Error(ErrorKind::InvalidArgument, "parabolic_lens_profile needs a parabolic_lens table");
  return profile_figure(lens);
}

std::string figure_tetragon_profile(const PiecewiseSurfaceTable& torus) {
  if (!std::holds_alternative<TetragonTorus>(torus.kind()))
    throw Error(ErrorKind::InvalidArgument, "tetragon_profile needs a tetragon_torus table");
  return profile_figure(torus);
}

std::string figure_orbit2d(const PlanarTable& table, const Orbit& orbit) {
  std::vector<Vec2> pts;
  for (const auto& s : orbit.states) {
    if (s.x.size() != 2) throw Error(ErrorKind::DimensionMismatch, "orbit2d needs a planar trajectory");
    pts.emplace_back(s.x[0], s.x[1]);
  }
  std::vector<Vec2> outline;
  if (table.is_bounded()) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double lo = std::isfinite(table.curve().domain().lo) ? table.curve().domain().lo : 0.0;
    const double hi = table.curve().period() ? lo + *table.curve().period() : lo + two_pi;
    outline = sample(lo, hi, [&](double t) { return Vec2(table.curve().eval(t)); });
  } else {
    // unbounded: the arc between the extreme impact parameters, padded
    double lo = -1.0, hi = 1.0;
    for (const auto& p : orbit.params)
      if (std::isfinite(p.p1)) lo = std::min(lo, p.p1), hi = std::max(hi, p.p1);
    const double pad = 0.1 * (hi - lo);
    outline = sample(lo - pad, hi + pad, [&](double t) { return Vec2(table.curve().eval(t)); });
  }
  Box box;
  box.add(outline);
  box.add(pts);
  SvgCanvas svg = box.canvas();
  svg.polyline(outline, kOutline, 2.0);
  draw_chords(svg, pts);
  if (!pts.empty()) svg.dot(pts.front(), 3.0, kOrbit);
  return svg.str();
}

std::string figure_orbit3d_projection(const Table& table, const Orbit& orbit) {
  const bool wire = std::holds_alternative<WireTable>(table);
  const int j = wire ? 1 : 2;
  std::vector<Vec2> pts;
  for (const auto& s : orbit.states) {
    if (s.x.size() <= j) throw Error(ErrorKind::DimensionMismatch, "trajectory dimension too small to project");
    pts.emplace_back(s.x[0], s.x[j]);
  }
  std::vector<std::vector<Vec2>> outline;
  if (const auto* w = std::get_if<WireTable>(&table)) {
    double lo = 0.0, hi = w->curve().period().value_or(4.0 * std::numbers::pi);
    if (!w->curve().period())
      for (const auto& p : orbit.params)
        if (std::isfinite(p.p1)) lo = std::min(lo, p.p1), hi = std::max(hi, p.p1);
    outline.push_back(sample(lo, hi, [&](double t) {
      const Vec x = w->curve().eval(t);
      return Vec2(x[0], x[1]);
    }));
  } else if (const auto* pw = std::get_if<PiecewiseSurfaceTable>(&table)) {
    for (const auto& arc : profile_arcs(*pw)) {
      outline.push_back(arc);
      outline.push_back(mirrored(arc));
    }
  }
  Box box;
  for (const auto& o : outline) box.add(o);
  box.add(pts);
  SvgCanvas svg = box.canvas();
  for (const auto& o : outline) svg.polyline(o, kOutline, 2.0);
  draw_chords(svg, pts);
  if (!pts.empty()) svg.dot(pts.front(), 3.0, kOrbit);
  return svg.str();
}

}  // namespace polybill::cli
