#include "pdefense/static_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pdefense/optimize.hpp"

namespace pdefense {

namespace {

constexpr std::size_t kNoStation = std::numeric_limits<std::size_t>::max();

template <class F>
double golden_max(F&& f, double lo, double hi, int iters) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

}  // namespace

FactorField::FactorField(ConvexPolygon poly, ReserveLayout layout, StationRule rule,
                         std::size_t samples)
    : poly_(std::move(poly)), layout_(std::move(layout)), rule_(rule) {
  if (layout_.stations.empty()) throw std::invalid_argument("factor field: no reserve stations");
  if (samples < 8) throw std::invalid_argument("factor field: too few perimeter samples");
  const std::size_t m = layout_.n();
  spacing_ = poly_.perimeter_length() / static_cast<double>(samples);
  samples_.reserve(samples);
  dist_.resize(samples * (m + 1));
  for (std::size_t i = 0; i < samples; ++i) {
    const Point2 s = poly_.point_at(static_cast<double>(i) * spacing_);
    samples_.push_back(s);
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const double d = distance(layout_.stations[k], s);
      dist_[i * (m + 1) + k] = d;
      nearest = std::min(nearest, d);
    }
    dist_[i * (m + 1) + m] = nearest;
  }
}

std::size_t FactorField::racing_station(Point2 p) const {
  if (rule_ == StationRule::nearest_to_perimeter_point) return kNoStation;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < layout_.n(); ++k) {
    const double d = distance(layout_.stations[k], p);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

double FactorField::station_distance(std::size_t station, Point2 s) const {
  if (station != kNoStation) return distance(layout_.stations[station], s);
  double nearest = std::numeric_limits<double>::infinity();
  for (const Point2& r : layout_.stations) nearest = std::min(nearest, distance(r, s));
  return nearest;
}

double FactorField::operator()(Point2 p, double ratio) const {
  const std::size_t m = layout_.n();
  const std::size_t station = racing_station(p);
  const std::size_t col = station == kNoStation ? m : station;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double v = dist_[i * (m + 1) + col] - ratio * distance(p, samples_[i]);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  const double s0 = static_cast<double>(best_i) * spacing_;
  auto along = [&](double s) {
    const Point2 q = poly_.point_at(s);
    return station_distance(station, q) - ratio * distance(p, q);
  };
  return std::max(best, golden_max(along, s0 - spacing_, s0 + spacing_, 40));
}

double priority_factor(const FactorField& field, double gamma, Point2 p) {
  return field(p, gamma);
}

double monitoring_factor(const FactorField& field, double gamma, double beta, Point2 p) {
  return field(p, gamma / beta);
}

double priority_factor(const ConvexPolygon& poly, const ReserveLayout& layout, double gamma,
                       Point2 p) {
  return priority_factor(FactorField(poly, layout), gamma, p);
}

double monitoring_factor(const ConvexPolygon& poly, const ReserveLayout& layout, double gamma,
                         double beta, Point2 p) {
  return monitoring_factor(FactorField(poly, layout), gamma, beta, p);
}

RegionApprox region_boundary(const FactorField& field, double ratio, std::size_t ray_count,
                             RegionKind kind) {
  if (!(ratio > 0.0)) throw std::invalid_argument("region_boundary: ratio must be positive");
  if (ray_count < 64) throw std::invalid_argument("region_boundary: need at least 64 rays");
  const ConvexPolygon& poly = field.territory();
  const Point2 c = poly.centroid();
  const double diam = poly.diameter();
  const double step = diam / 64.0;

  RegionApprox region;
  region.kind = kind;
  region.ratio = ratio;
  region.resolution = 2.0 * std::numbers::pi / static_cast<double>(ray_count);
  region.boundary.reserve(ray_count);
  for (std::size_t k = 0; k < ray_count; ++k) {
    const double theta = static_cast<double>(k) * region.resolution;
    const Point2 u = unit_vector(theta);
    const auto exit = ray_perimeter_intersection(poly, c, theta);
    const double r_edge = exit ? distance(exit->point, c) : 0.0;
    if (field(c + r_edge * u, ratio) < -1e-9)
      throw DesignError("region_boundary: factor negative on the territory boundary");

    double inside = r_edge;
    double outside = r_edge + step;
    while (field(c + outside * u, ratio) >= 0.0) {
      inside = outside;
      outside += step;
      if (outside > r_edge + 10.0 * diam)
        throw DesignError("region_boundary: no sign change within ten diameters");
    }
    for (int it = 0; it < 50 && outside - inside > 1e-9; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (field(c + mid * u, ratio) >= 0.0)
        inside = mid;
      else
        outside = mid;
    }
    region.boundary.push_back(c + inside * u);
  }
  return region;
}

double region_area(const RegionApprox& region, const ConvexPolygon& poly) {
  return signed_area(region.boundary) - poly.area();
}

double region_reach(const RegionApprox& region, const ConvexPolygon& poly) {
  double reach = 0.0;
  for (const Point2& b : region.boundary) reach = std::max(reach, poly.signed_distance(b));
  return reach;
}

std::vector<Point2> critical_points(const RegionApprox& region, double kink_threshold,
                                    double max_spacing) {
  const auto& ring = region.boundary;
  const std::size_t n = ring.size();
  if (n < 3) throw std::invalid_argument("critical_points: region boundary too short");
  if (!(max_spacing > 0.0)) throw std::invalid_argument("critical_points: spacing must be positive");

  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + distance(ring[i], ring[(i + 1) % n]);
  const double total = cum[n];
  auto at = [&](double s) {
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
    auto it = std::upper_bound(cum.begin(), cum.end(), s);
    const std::size_t i = std::min<std::size_t>(std::distance(cum.begin(), it) - 1, n - 1);
    const double len = cum[i + 1] - cum[i];
    const double t = len > 0.0 ? (s - cum[i]) / len : 0.0;
    return ring[i] + t * (ring[(i + 1) % n] - ring[i]);
  };

  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 in = ring[i] - ring[(i + n - 1) % n];
    const Point2 out = ring[(i + 1) % n] - ring[i];
    if (std::abs(std::atan2(cross(in, out), dot(in, out))) > kink_threshold) anchors.push_back(i);
  }
  if (anchors.empty()) anchors.push_back(0);

  std::vector<Point2> points;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const double start = cum[anchors[a]];
    double end = anchors.size() == 1 ? start + total : cum[anchors[(a + 1) % anchors.size()]];
    if (end <= start) end += total;
    const double gap = end - start;
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(gap / max_spacing - 1e-9)));
    points.push_back(ring[anchors[a]]);
    for (std::size_t k = 1; k < pieces; ++k)
      points.push_back(at(start + gap * static_cast<double>(k) / static_cast<double>(pieces)));
  }
  return points;
}

StationPlacement place_reserve_stations(const ConvexPolygon& poly, std::size_t n,
                                        std::size_t restarts, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("place_reserve_stations: need at least one station");
  auto objective = [&](std::span<const Point2> centers) {
    return perimeter_coverage_radius(poly, centers);
  };
  PlacementResult r = minimax_placement(poly, n, restarts, seed, objective);
  return {ReserveLayout{std::move(r.centers)}, r.objective};
}

MonitorPlacement place_monitors(const ConvexPolygon& poly, const RegionApprox& region,
                                std::size_t n, std::size_t restarts, std::uint64_t seed) {
  if (region.boundary.empty()) throw std::invalid_argument("place_monitors: empty region");
  auto objective = [&](std::span<const Point2> centers) {
    return ring_coverage_radius(region.boundary, centers);
  };
  PlacementResult r = minimax_placement(poly, n, restarts, seed, objective);
  return {std::move(r.centers), r.objective};
}

std::optional<MonitorTeam> min_monitor_team(const ConvexPolygon& poly, const RegionApprox& region,
                                            double sensor_range, std::size_t restarts,
                                            std::uint64_t seed, std::size_t cap) {
  if (!(sensor_range > 0.0)) throw std::invalid_argument("min_monitor_team: sensor_range must be positive");
  if (sensor_range < region_reach(region, poly)) return std::nullopt;
  for (std::size_t n = 1; n <= cap; ++n) {
    MonitorPlacement mp = place_monitors(poly, region, n, restarts, seed);
    if (mp.rs_min <= sensor_range) return MonitorTeam{n, std::move(mp.positions), mp.rs_min};
  }
  return std::nullopt;
}

StaticDesign design_layout(const ConvexPolygon& poly, const DesignConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("design: gamma must be positive");
  if (!(cfg.beta >= 1.0)) throw std::invalid_argument("design: beta must be at least 1");
  if (!(cfg.sensor_range > 0.0)) throw std::invalid_argument("design: sensor_range must be positive");
  const double spacing = cfg.max_spacing.value_or(cfg.sensor_range / 2.0);

  std::size_t n_st = cfg.fixed_stations ? cfg.fixed_stations->size() : cfg.initial_n_stations;
  for (bool first = true; first || n_st <= cfg.max_stations; first = false, ++n_st) {
    StationPlacement placement;
    if (first && cfg.fixed_stations) {
      placement.layout.stations = *cfg.fixed_stations;
      for (const Point2& s : placement.layout.stations)
        if (!contains(poly, s)) throw std::invalid_argument("design: fixed station outside territory");
      placement.objective = perimeter_coverage_radius(poly, placement.layout.stations);
    } else {
      placement = place_reserve_stations(poly, n_st, cfg.station_restarts, cfg.seed);
    }

    const FactorField field(poly, placement.layout, cfg.station_rule, cfg.perimeter_samples);
    RegionApprox pr = region_boundary(field, cfg.gamma, cfg.ray_count, RegionKind::priority);
    RegionApprox mr =
        region_boundary(field, cfg.gamma / cfg.beta, cfg.ray_count, RegionKind::monitoring);
    auto team = min_monitor_team(poly, mr, cfg.sensor_range, cfg.monitor_restarts, cfg.seed,
                                 cfg.monitor_cap);
    if (!team) continue;

    StaticDesign d{.territory = poly,
                   .layout = placement.layout,
                   .station_objective = placement.objective,
                   .gamma = cfg.gamma,
                   .beta = cfg.beta,
                   .sensor_range = cfg.sensor_range,
                   .station_rule = cfg.station_rule,
                   .perimeter_samples = cfg.perimeter_samples,
                   .priority_region = std::move(pr),
                   .monitoring_region = std::move(mr),
                   .critical_points = {},
                   .n_monitors = team->n_min,
                   .monitor_positions = team->positions,
                   .rs_min = team->rs_min,
                   .monitor_layouts = {}};
    d.critical_points = critical_points(d.monitoring_region, cfg.kink_threshold, spacing);
    for (std::size_t n = 1; n <= team->n_min + cfg.extra_layouts; ++n) {
      d.monitor_layouts[n] =
          n == team->n_min
              ? team->positions
              : place_monitors(poly, d.monitoring_region, n, cfg.monitor_restarts, cfg.seed).positions;
    }
    return d;
  }
  throw DesignError("design: no feasible monitor team up to " + std::to_string(cfg.max_stations) +
                    " reserve stations");
}

}  // namespace pdefense
