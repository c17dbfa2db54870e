#include "pdefense/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace pdefense {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t dim = x0.size();
  const double nd = static_cast<double>(dim);
  // Gao & Han adaptive parameters.
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / nd;
  const double gamma = 0.75 - 1.0 / (2.0 * nd);
  const double delta = 1.0 - 1.0 / nd;

  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += opts.initial_step;
  std::vector<double> values(dim + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto point_along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t k = 0; k < dim; ++k) out[k] = centroid[k] + t * (centroid[k] - worst[k]);
  };

  while (evals < opts.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    const std::size_t best = order.front(), worst = order.back(), second = order[dim - 1];

    double spread = 0.0;
    for (std::size_t i = 0; i <= dim; ++i)
      for (std::size_t k = 0; k < dim; ++k)
        spread = std::max(spread, std::abs(simplex[i][k] - simplex[best][k]));
    if (spread < opts.x_tol && values[worst] - values[best] < opts.f_tol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / nd;
    }

    point_along(alpha, trial, simplex[worst]);
    const double fr = eval(trial);
    if (fr < values[best]) {
      point_along(beta, trial2, simplex[worst]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    point_along(outside ? gamma : -gamma, trial2, simplex[worst]);
    const double fc = eval(trial2);
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < dim; ++k)
        simplex[i][k] = simplex[best][k] + delta * (simplex[i][k] - simplex[best][k]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  const std::size_t b = static_cast<std::size_t>(std::distance(values.begin(), it));
  return {simplex[b], values[b], evals};
}

double ring_coverage_radius(std::span<const Point2> ring, std::span<const Point2> centers) {
  double worst = 0.0;
  for (const Point2& p : ring) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Point2& c : centers) {
      const Point2 d = p - c;
      nearest = std::min(nearest, d.x * d.x + d.y * d.y);
    }
    worst = std::max(worst, nearest);
  }
  return std::sqrt(worst);
}

double perimeter_coverage_radius(const ConvexPolygon& poly, std::span<const Point2> centers) {
  auto nearest = [&](Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point2& c : centers) best = std::min(best, distance(p, c));
    return best;
  };
  double worst = 0.0;
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const Point2 a = poly.vertex(e);
    const Point2 dir = poly.vertex(e + 1) - a;
    worst = std::max(worst, nearest(a));
    for (std::size_t i = 0; i < centers.size(); ++i) {
      for (std::size_t j = i + 1; j < centers.size(); ++j) {
        const Point2 d = centers[j] - centers[i];
        const double denom = dot(dir, d);
        if (std::abs(denom) < 1e-15) continue;
        const Point2 mid = 0.5 * (centers[i] + centers[j]);
        const double t = dot(mid - a, d) / denom;
        if (t <= 0.0 || t >= 1.0) continue;
        worst = std::max(worst, nearest(a + t * dir));
      }
    }
  }
  return worst;
}

Point2 sample_inside(const ConvexPolygon& poly, std::mt19937_64& rng) {
  double lo_x = poly.vertex(0).x, hi_x = lo_x, lo_y = poly.vertex(0).y, hi_y = lo_y;
  for (const Point2& v : poly.vertices()) {
    lo_x = std::min(lo_x, v.x);
    hi_x = std::max(hi_x, v.x);
    lo_y = std::min(lo_y, v.y);
    hi_y = std::max(hi_y, v.y);
  }
  std::uniform_real_distribution<double> ux(lo_x, hi_x), uy(lo_y, hi_y);
  for (;;) {
    const Point2 p{ux(rng), uy(rng)};
    if (contains(poly, p)) return p;
  }
}

PlacementResult minimax_placement(
    const ConvexPolygon& poly, std::size_t n, std::size_t restarts, std::uint64_t seed,
    const std::function<double(std::span<const Point2>)>& objective) {
  if (n == 0) throw std::invalid_argument("placement: need at least one center");
  if (restarts == 0) throw std::invalid_argument("placement: need at least one restart");

  std::vector<Point2> centers(n);
  auto unpack = [&](std::span<const double> x) {
    for (std::size_t i = 0; i < n; ++i) centers[i] = clamp_into(poly, {x[2 * i], x[2 * i + 1]});
  };
  auto f = [&](std::span<const double> x) {
    unpack(x);
    return objective(centers);
  };

  NelderMeadOptions opts;
  opts.max_evals = 1500 * static_cast<int>(n) + 500;
  opts.initial_step = 0.1 * poly.diameter();

  PlacementResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::vector<double> x(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = sample_inside(poly, rng);
      x[2 * i] = p.x;
      x[2 * i + 1] = p.y;
    }
    // Simplex restarts at shrinking scale escape the kinks of the max-min surface.
    NelderMeadResult res = nelder_mead(f, x, opts);
    for (double step : {0.02, 0.004}) {
      NelderMeadOptions polish = opts;
      polish.initial_step = step * poly.diameter();
      res = nelder_mead(f, res.x, polish);
    }
    if (res.value < best.objective) {
      unpack(res.x);
      best.centers = centers;
      best.objective = objective(centers);
    }
  }
  return best;
}

}  // namespace pdefense
