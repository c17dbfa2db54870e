#include "pdefense/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pdefense {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SegmentFoot {
  Point2 point;
  double t = 0.0;  // fraction along the segment
  double dist = 0.0;
};

SegmentFoot foot_on_segment(Point2 p, Point2 a, Point2 b) {
  const Point2 e = b - a;
  const double len2 = dot(e, e);
  double t = len2 > 0.0 ? dot(p - a, e) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Point2 q = a + t * e;
  return {q, t, distance(p, q)};
}

}  // namespace

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_pi(double a) {
  return wrap_angle(a + std::numbers::pi) - std::numbers::pi;
}

double signed_area(std::span<const Point2> ring) {
  double s = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * s;
}

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("territory: need at least 3 vertices");
  for (const auto& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw std::invalid_argument("territory: non-finite vertex coordinate");
  }
  if (signed_area(vertices_) < 0.0) std::reverse(vertices_.begin(), vertices_.end());
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e0 = vertices_[(i + 1) % n] - vertices_[i];
    const Point2 e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (!(cross(e0, e1) > 0.0))
      throw std::invalid_argument("territory: vertices are not strictly convex (at vertex " +
                                  std::to_string((i + 1) % n) + ")");
  }

  cumulative_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    cumulative_[i + 1] = cumulative_[i] + distance(vertices_[i], vertices_[(i + 1) % n]);
  perimeter_ = cumulative_[n];
  area_ = signed_area(vertices_);

  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices_[i], b = vertices_[(i + 1) % n];
    const double c = cross(a, b);
    cx += (a.x + b.x) * c;
    cy += (a.y + b.y) * c;
  }
  centroid_ = {cx / (6.0 * area_), cy / (6.0 * area_)};

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      diameter_ = std::max(diameter_, distance(vertices_[i], vertices_[j]));
}

double ConvexPolygon::wrap_arclen(double arclen) const {
  double s = std::fmod(arclen, perimeter_);
  if (s < 0.0) s += perimeter_;
  if (s >= perimeter_) s = 0.0;
  return s;
}

std::size_t ConvexPolygon::edge_at(double arclen) const {
  const double s = wrap_arclen(arclen);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
  return std::min(i, vertices_.size() - 1);
}

Point2 ConvexPolygon::point_at(double arclen) const {
  const double s = wrap_arclen(arclen);
  const std::size_t i = edge_at(s);
  const double len = edge_length(i);
  const double t = len > 0.0 ? (s - cumulative_[i]) / len : 0.0;
  return vertex(i) + t * (vertex(i + 1) - vertex(i));
}

double ConvexPolygon::signed_distance(Point2 p) const {
  double outward = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point2 e = vertex(i + 1) - vertex(i);
    outward = std::max(outward, -cross(e, p - vertex(i)) / norm(e));
  }
  if (outward <= 0.0) return outward;  // inside: distance to nearest edge line
  return distance(p, nearest_boundary_point(p).point);
}

PerimeterPoint ConvexPolygon::nearest_boundary_point(Point2 p) const {
  PerimeterPoint best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const SegmentFoot f = foot_on_segment(p, vertex(i), vertex(i + 1));
    if (f.dist < best_d) {
      best_d = f.dist;
      best.point = f.point;
      best.arclen = wrap_arclen(cumulative_[i] + f.t * edge_length(i));
    }
  }
  return best;
}

bool contains(const ConvexPolygon& poly, Point2 p) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly.vertex(i);
    const Point2 e = poly.vertex(i + 1) - a;
    if (-cross(e, p - a) / norm(e) > kBoundaryTol) return false;
  }
  return true;
}

Point2 clamp_into(const ConvexPolygon& poly, Point2 p) {
  if (contains(poly, p)) return p;
  return poly.nearest_boundary_point(p).point;
}

PerimeterPoint project_to_perimeter(const ConvexPolygon& poly, Point2 p) {
  const PerimeterPoint q = poly.nearest_boundary_point(p);
  if (contains(poly, p) && distance(p, q.point) > kBoundaryTol)
    throw std::invalid_argument("project_to_perimeter: point lies inside the territory");
  return q;
}

std::optional<PerimeterPoint> ray_perimeter_intersection(const ConvexPolygon& poly,
                                                         Point2 origin, double heading) {
  const Point2 u = unit_vector(heading);
  std::optional<PerimeterPoint> hit;
  double best_t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly.vertex(i);
    const Point2 e = poly.vertex(i + 1) - a;
    const double denom = cross(u, e);
    if (std::abs(denom) < 1e-14 * norm(e)) continue;  // parallel
    const Point2 ao = a - origin;
    const double t = cross(ao, e) / denom;
    const double s = cross(ao, u) / denom;
    if (t < -kBoundaryTol || s < -1e-12 || s > 1.0 + 1e-12) continue;
    if (t < best_t) {
      best_t = t;
      const double sc = std::clamp(s, 0.0, 1.0);
      hit = PerimeterPoint{a + sc * e, poly.wrap_arclen(poly.edge_start(i) + sc * poly.edge_length(i))};
    }
  }
  return hit;
}

double shorter_arc_offset(const ConvexPolygon& poly, double from_arclen, double to_arclen) {
  const double len = poly.perimeter_length();
  const double fwd = poly.wrap_arclen(to_arclen - from_arclen);
  return fwd <= 0.5 * len ? fwd : fwd - len;
}

double arc_distance(const ConvexPolygon& poly, const PerimeterPoint& a, const PerimeterPoint& b) {
  return std::abs(shorter_arc_offset(poly, a.arclen, b.arclen));
}

Arrival arrival_point(const ConvexPolygon& poly, Point2 pos, Point2 velocity,
                      const ArrivalOptions& opts) {
  const PerimeterPoint p2 = project_to_perimeter(poly, pos);
  const double speed = norm(velocity);
  if (speed == 0.0 && !opts.allow_fallback)
    throw std::invalid_argument("arrival_point: stationary intruder with fallback disabled");

  Arrival out;
  out.projection = p2;
  out.heading_crossing = p2;
  if (speed > 0.0) {
    if (auto p1 = ray_perimeter_intersection(poly, pos, std::atan2(velocity.y, velocity.x))) {
      out.heading_crossing = *p1;
      out.ray_hit = true;
    }
  }

  if (!out.ray_hit) {
    out.point = p2;
  } else if (opts.predictor == Predictor::velocity) {
    out.point = out.heading_crossing;
  } else {
    const PerimeterPoint& p1 = out.heading_crossing;
    const double offset = shorter_arc_offset(poly, p1.arclen, p2.arclen);
    const double d1 = distance(p1.point, pos);
    const double d2 = distance(p2.point, pos);
    const double frac = (d1 + d2) > 0.0 ? d1 / (d1 + d2) : 0.0;
    const double s = poly.wrap_arclen(p1.arclen + frac * offset);
    out.point = {poly.point_at(s), s};
  }

  double v = speed;
  if (v < 0.1 * opts.v_max) v = opts.v_max;
  if (!(v > 0.0)) throw std::invalid_argument("arrival_point: no usable speed for arrival time");
  out.time = distance(out.point.point, pos) / v;
  return out;
}

}  // namespace pdefense
