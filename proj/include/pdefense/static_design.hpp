#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdefense/geometry.hpp"

namespace pdefense {

// Raised when the offline design loop cannot meet its targets.
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReserveLayout {
  std::vector<Point2> stations;
  std::size_t n() const { return stations.size(); }
};

// Which reserve station races the intruder to a perimeter point s.
enum class StationRule {
  nearest_to_intruder,        // the station closest to the intruder's position
  nearest_to_perimeter_point  // the station closest to s
};

// Time-margin field whose zero level set bounds the priority and monitoring
// regions:
//
//   factor(p, ratio) = max over s on the perimeter of  d_R(s) - ratio * |p - s|
//
// where d_R(s) is the distance from the racing reserve station to s. A
// non-negative value means some perimeter point is reached by the intruder
// no later than by the reserve defender.
//
// The max over s is a dense scan of the perimeter followed by golden-section
// refinement around the best sample.
class FactorField {
 public:
  FactorField(ConvexPolygon poly, ReserveLayout layout,
              StationRule rule = StationRule::nearest_to_intruder, std::size_t samples = 2000);

  double operator()(Point2 p, double ratio) const;

  const ConvexPolygon& territory() const { return poly_; }
  const ReserveLayout& layout() const { return layout_; }
  StationRule rule() const { return rule_; }

 private:
  std::size_t racing_station(Point2 p) const;
  double station_distance(std::size_t station, Point2 s) const;

  ConvexPolygon poly_;
  ReserveLayout layout_;
  StationRule rule_;
  double spacing_ = 0.0;
  std::vector<Point2> samples_;
  // samples x stations, row-major; the last column holds the nearest distance.
  std::vector<double> dist_;
};

double priority_factor(const FactorField& field, double gamma, Point2 p);
double monitoring_factor(const FactorField& field, double gamma, double beta, Point2 p);

// Convenience overloads that build a one-off field.
double priority_factor(const ConvexPolygon& poly, const ReserveLayout& layout, double gamma,
                       Point2 p);
double monitoring_factor(const ConvexPolygon& poly, const ReserveLayout& layout, double gamma,
                         double beta, Point2 p);

enum class RegionKind { priority, monitoring };

struct RegionApprox {
  std::vector<Point2> boundary;  // closed, counter-clockwise
  double resolution = 0.0;       // angular spacing of the rays (rad)
  RegionKind kind = RegionKind::priority;
  double ratio = 0.0;
};

// Outer boundary of {factor(., ratio) >= 0} traced by bisection along
// ray_count equally spaced rays from the territory centroid. Throws
// DesignError when a ray finds no sign change within ten diameters.
RegionApprox region_boundary(const FactorField& field, double ratio, std::size_t ray_count,
                             RegionKind kind = RegionKind::priority);

// Area of the region outside the territory.
double region_area(const RegionApprox& region, const ConvexPolygon& poly);

// Largest distance from the region boundary to the territory; no monitor team
// confined to the territory can need a smaller sensing range.
double region_reach(const RegionApprox& region, const ConvexPolygon& poly);

// Boundary vertices turning by more than kink_threshold, plus evenly spaced
// fill-ins so consecutive points are at most max_spacing apart along the
// boundary.
std::vector<Point2> critical_points(const RegionApprox& region, double kink_threshold,
                                    double max_spacing);

struct StationPlacement {
  ReserveLayout layout;
  double objective = 0.0;  // worst distance from the perimeter to its nearest station
};

StationPlacement place_reserve_stations(const ConvexPolygon& poly, std::size_t n,
                                        std::size_t restarts, std::uint64_t seed);

struct MonitorPlacement {
  std::vector<Point2> positions;
  double rs_min = 0.0;
};

MonitorPlacement place_monitors(const ConvexPolygon& poly, const RegionApprox& region,
                                std::size_t n, std::size_t restarts, std::uint64_t seed);

struct MonitorTeam {
  std::size_t n_min = 0;
  std::vector<Point2> positions;
  double rs_min = 0.0;
};

// Smallest team whose mini-max placement fits within sensor_range. Empty when
// no team up to `cap` members can (or provably never can) meet it.
std::optional<MonitorTeam> min_monitor_team(const ConvexPolygon& poly, const RegionApprox& region,
                                            double sensor_range, std::size_t restarts,
                                            std::uint64_t seed, std::size_t cap = 32);

struct DesignConfig {
  std::size_t initial_n_stations = 3;
  std::size_t max_stations = 6;
  double gamma = 1.0;
  double beta = 1.33;
  double sensor_range = 50.0;
  // Use these stations instead of optimising (first loop iteration only).
  std::optional<std::vector<Point2>> fixed_stations;
  StationRule station_rule = StationRule::nearest_to_intruder;
  std::size_t station_restarts = 1000;
  std::size_t monitor_restarts = 64;
  std::uint64_t seed = 1;
  std::size_t ray_count = 720;
  std::size_t perimeter_samples = 2000;
  double kink_threshold = 10.0 * 3.14159265358979323846 / 180.0;
  std::optional<double> max_spacing;  // defaults to sensor_range / 2
  std::size_t monitor_cap = 32;
  // Extra monitor layouts (n_min + 1 .. n_min + k) kept for replanning.
  std::size_t extra_layouts = 3;
};

struct StaticDesign {
  ConvexPolygon territory;
  ReserveLayout layout;
  double station_objective = 0.0;
  double gamma = 1.0;
  double beta = 1.33;
  double sensor_range = 0.0;
  StationRule station_rule = StationRule::nearest_to_intruder;
  std::size_t perimeter_samples = 2000;
  RegionApprox priority_region;
  RegionApprox monitoring_region;
  std::vector<Point2> critical_points;
  std::size_t n_monitors = 0;
  std::vector<Point2> monitor_positions;
  double rs_min = 0.0;
  // Optimal monitor positions for 1 .. n_min + extra_layouts members.
  std::map<std::size_t, std::vector<Point2>> monitor_layouts;

  FactorField factor_field() const {
    return FactorField(territory, layout, station_rule, perimeter_samples);
  }
};

// The full offline loop: stations, regions, critical points, and the minimum
// monitor team. Adds a station and retries while the team is unreachable.
StaticDesign design_layout(const ConvexPolygon& poly, const DesignConfig& cfg);

}  // namespace pdefense
