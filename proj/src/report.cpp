#include "pdefense/report.hpp"

#include <ostream>
#include <stdexcept>

namespace pdefense {

namespace {

using nlohmann::json;

json points_json(const std::vector<Point2>& pts) {
  json a = json::array();
  for (const Point2& p : pts) a.push_back({p.x, p.y});
  return a;
}

std::vector<Point2> points_from(const json& a) {
  std::vector<Point2> pts;
  for (const auto& p : a) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return pts;
}

json region_json(const RegionApprox& r, const ConvexPolygon& poly) {
  return {{"ratio", r.ratio},
          {"resolution", r.resolution},
          {"area", region_area(r, poly)},
          {"reach", region_reach(r, poly)},
          {"boundary", points_json(r.boundary)}};
}

RegionApprox region_from(const json& j, RegionKind kind) {
  RegionApprox r;
  r.kind = kind;
  r.ratio = j.at("ratio").get<double>();
  r.resolution = j.at("resolution").get<double>();
  r.boundary = points_from(j.at("boundary"));
  return r;
}

StationRule station_rule_from(const std::string& s) {
  if (s == "nearest_to_intruder") return StationRule::nearest_to_intruder;
  if (s == "nearest_to_perimeter_point") return StationRule::nearest_to_perimeter_point;
  throw std::runtime_error("design.json: unknown station_rule '" + s + "'");
}

}  // namespace

std::string to_string(StationRule r) {
  return r == StationRule::nearest_to_intruder ? "nearest_to_intruder" : "nearest_to_perimeter_point";
}

json design_to_json(const StaticDesign& d, const std::string& config_hash) {
  json layouts = json::object();
  for (const auto& [n, pos] : d.monitor_layouts) layouts[std::to_string(n)] = points_json(pos);
  return {{"config_hash", config_hash},
          {"territory", points_json(d.territory.vertices())},
          {"gamma", d.gamma},
          {"beta", d.beta},
          {"sensor_range", d.sensor_range},
          {"station_rule", to_string(d.station_rule)},
          {"perimeter_samples", d.perimeter_samples},
          {"stations", points_json(d.layout.stations)},
          {"station_objective", d.station_objective},
          {"priority_region", region_json(d.priority_region, d.territory)},
          {"monitoring_region", region_json(d.monitoring_region, d.territory)},
          {"critical_points", points_json(d.critical_points)},
          {"n_min", d.n_monitors},
          {"rs_min", d.rs_min},
          {"monitor_positions", points_json(d.monitor_positions)},
          {"monitor_layouts", layouts}};
}

StaticDesign design_from_json(const json& j) {
  try {
    StaticDesign d{ConvexPolygon(points_from(j.at("territory"))),
                   ReserveLayout{points_from(j.at("stations"))},
                   j.at("station_objective").get<double>(),
                   j.at("gamma").get<double>(),
                   j.at("beta").get<double>(),
                   j.at("sensor_range").get<double>(),
                   station_rule_from(j.at("station_rule").get<std::string>()),
                   j.at("perimeter_samples").get<std::size_t>(),
                   region_from(j.at("priority_region"), RegionKind::priority),
                   region_from(j.at("monitoring_region"), RegionKind::monitoring),
                   points_from(j.at("critical_points")),
                   j.at("n_min").get<std::size_t>(),
                   points_from(j.at("monitor_positions")),
                   j.at("rs_min").get<double>(),
                   {}};
    for (const auto& [key, pos] : j.at("monitor_layouts").items())
      d.monitor_layouts[std::stoul(key)] = points_from(pos);
    return d;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("design.json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("design.json: ") + e.what());
  }
}

void write_regions_csv(std::ostream& out, const StaticDesign& d) {
  out << "region,index,x,y\n";
  auto rows = [&](const char* name, const std::vector<Point2>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i) out << name << ',' << i << ',' << pts[i].x << ',' << pts[i].y << '\n';
  };
  out.precision(10);
  rows("territory", d.territory.vertices());
  rows("priority", d.priority_region.boundary);
  rows("monitoring", d.monitoring_region.boundary);
  rows("critical", d.critical_points);
  rows("station", d.layout.stations);
  rows("monitor", d.monitor_positions);
}

json summary_to_json(const SimResult& r, const SimConfig& cfg, const std::string& config_hash) {
  return {{"config_hash", config_hash},
          {"seed", cfg.seed},
          {"baseline", to_string(cfg.baseline)},
          {"predictor", to_string(effective_predictor(cfg))},
          {"policy", to_string(cfg.policy)},
          {"omega_max_deg", cfg.omega_max_deg},
          {"concurrent_intruders", cfg.concurrent_intruders},
          {"episode_intruder_total", cfg.episode_intruder_total},
          {"success", r.success},
          {"captures", r.captures},
          {"intrusions", r.intrusions},
          {"peak_team_size", r.peak_team_size},
          {"spawn_count", r.spawn_count},
          {"guarantee_violations", r.guarantee_violations},
          {"priority_violations", r.priority_violations},
          {"steps", r.steps},
          {"sim_time", r.sim_time}};
}

}  // namespace pdefense
