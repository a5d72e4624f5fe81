#pragma once

#include "gtf/geometry.hpp"
#include "gtf/random.hpp"

namespace gtf {
namespace manifolds {

// Flat R^n on a box of half-width `extent`. Gamma = 0, identity metric.
ChartManifold flat(int dim, double extent = 4.0);

// Poincare half-plane, metric (dx^2 + dy^2)/y^2 with closed-form
// Levi-Civita symbols. Chart box x in (-4, 4), y in (y_min, y_max).
ChartManifold halfplane(double y_min = 0.15, double y_max = 8.0);

// Same geometry with Christoffels derived from the metric by finite
// differences (exercises the Levi-Civita path; slower).
ChartManifold halfplane_from_metric(double y_min = 0.15, double y_max = 8.0);

// Unit round sphere in the stereographic chart, g = 4 delta / (1+|x|^2)^2.
ChartManifold sphere_stereographic(double extent = 2.5);

// Unit round sphere in the polar chart, g = diag(1, sin^2 theta), theta in
// (theta_min, pi - theta_min). Christoffels derived from the metric.
ChartManifold sphere_polar(double theta_min = 0.15);

// Random polynomial Christoffel field: Gamma^k_ij symmetric in (i, j) with
// degree <= 2 polynomial entries, coefficients uniform in [-scale, scale].
ChartManifold random_polynomial(int dim, Rng& rng, double scale = 1.0,
                                double extent = 0.8);

} // namespace manifolds
} // namespace gtf
