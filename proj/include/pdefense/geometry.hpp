#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace pdefense {

// Points closer than this to the boundary count as lying on it.
inline constexpr double kBoundaryTol = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 unit_vector(double heading) { return {std::cos(heading), std::sin(heading)}; }

// Wraps an angle into [0, 2*pi).
double wrap_angle(double a);
// Wraps an angle difference into [-pi, pi).
double wrap_pi(double a);

struct PerimeterPoint {
  Point2 point;
  double arclen = 0.0;  // [0, perimeter_length)
};

// Strictly convex polygon with counter-clockwise vertices. Arc length is
// measured counter-clockwise from vertices()[0].
class ConvexPolygon {
 public:
  // Validates and reorients to counter-clockwise. Throws std::invalid_argument
  // for fewer than three vertices, non-finite coordinates, or a polygon that
  // is not strictly convex.
  explicit ConvexPolygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double perimeter_length() const { return perimeter_; }
  double area() const { return area_; }
  Point2 centroid() const { return centroid_; }
  double diameter() const { return diameter_; }

  Point2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  // Arc length at which edge i (vertex i -> vertex i+1) starts.
  double edge_start(std::size_t i) const { return cumulative_[i]; }
  double edge_length(std::size_t i) const { return cumulative_[i + 1] - cumulative_[i]; }

  // Point at the given arc length; any real value is wrapped onto the perimeter.
  Point2 point_at(double arclen) const;
  double wrap_arclen(double arclen) const;
  // Edge index containing the given (wrapped) arc length.
  std::size_t edge_at(double arclen) const;

  // Signed distance to the boundary: negative inside, positive outside.
  double signed_distance(Point2 p) const;
  // Nearest point of the boundary, with no inside/outside precondition.
  PerimeterPoint nearest_boundary_point(Point2 p) const;

 private:
  std::vector<Point2> vertices_;
  std::vector<double> cumulative_;  // size n + 1
  double perimeter_ = 0.0;
  double area_ = 0.0;
  double diameter_ = 0.0;
  Point2 centroid_;
};

// Shoelace area of a closed polyline; positive for counter-clockwise order.
double signed_area(std::span<const Point2> ring);

// Inside or on the boundary.
bool contains(const ConvexPolygon& poly, Point2 p);

// Moves p onto the polygon if it lies outside; leaves interior points alone.
Point2 clamp_into(const ConvexPolygon& poly, Point2 p);

// Closest boundary point. Throws std::invalid_argument if p is strictly inside.
PerimeterPoint project_to_perimeter(const ConvexPolygon& poly, Point2 p);

// First boundary crossing of the ray origin + t * (cos heading, sin heading),
// t >= 0. Empty when the ray misses the polygon.
std::optional<PerimeterPoint> ray_perimeter_intersection(const ConvexPolygon& poly,
                                                         Point2 origin, double heading);

// Length of the shorter perimeter arc between a and b.
double arc_distance(const ConvexPolygon& poly, const PerimeterPoint& a,
                    const PerimeterPoint& b);

// Signed counter-clockwise displacement from a to b along the shorter arc,
// in (-L/2, L/2]; exact half-perimeter ties resolve to +L/2.
double shorter_arc_offset(const ConvexPolygon& poly, double from_arclen, double to_arclen);

enum class Predictor { eq2, velocity };

struct ArrivalOptions {
  double v_max = 0.0;            // intruder speed cap used for slow intruders
  bool allow_fallback = true;    // zero speed falls back to v_max
  Predictor predictor = Predictor::eq2;
};

struct Arrival {
  PerimeterPoint point;
  double time = 0.0;
  PerimeterPoint heading_crossing;   // p1 (equals projection when the ray misses)
  PerimeterPoint projection;         // p2
  bool ray_hit = false;
};

// Predicted perimeter arrival point and time of an exterior intruder.
//
// p1 is where the velocity ray crosses the boundary and p2 is the projection.
// The arrival point sits on the shorter arc between them and splits it so that
// l(p1, pT) / l(p2, pT) = |p1 - pos| / |p2 - pos|. When the ray misses, the
// projection is used. Time is |pT - pos| divided by the current speed, or by
// v_max when the current speed is below 0.1 * v_max.
//
// Throws std::invalid_argument if pos is strictly inside, or if the intruder
// is stationary and fallback is disabled.
Arrival arrival_point(const ConvexPolygon& poly, Point2 pos, Point2 velocity,
                      const ArrivalOptions& opts);

}  // namespace pdefense
