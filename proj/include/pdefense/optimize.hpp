#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "pdefense/geometry.hpp"

namespace pdefense {

struct NelderMeadOptions {
  int max_evals = 4000;
  double x_tol = 1e-7;
  double f_tol = 1e-10;
  double initial_step = 1.0;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
};

// Derivative-free simplex minimisation with dimension-adaptive coefficients.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

// Largest distance from any point of a closed polyline's vertices to its
// nearest center.
double ring_coverage_radius(std::span<const Point2> ring, std::span<const Point2> centers);

// Largest distance from any point of the polygon boundary (edges included,
// not just vertices) to its nearest center. Exact: on each edge the maximum
// of the lower envelope is attained at an endpoint or on a pairwise bisector.
double perimeter_coverage_radius(const ConvexPolygon& poly, std::span<const Point2> centers);

struct PlacementResult {
  std::vector<Point2> centers;
  double objective = 0.0;
};

// Uniform point inside the polygon (rejection sampling on the bounding box).
Point2 sample_inside(const ConvexPolygon& poly, std::mt19937_64& rng);

// Multi-start mini-max placement of n centers constrained to the polygon.
// Each restart draws its own generator from (seed, restart index), so the
// result depends only on (seed, restarts).
PlacementResult minimax_placement(
    const ConvexPolygon& poly, std::size_t n, std::size_t restarts, std::uint64_t seed,
    const std::function<double(std::span<const Point2>)>& objective);

}  // namespace pdefense
