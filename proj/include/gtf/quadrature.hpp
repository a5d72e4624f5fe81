#pragma once

#include <functional>
#include <vector>

#include "gtf/linalg.hpp"

namespace gtf {

// Gauss-Legendre rule on [-1, 1]. Nodes/weights are computed once per order
// via Newton iteration on the Legendre recurrence and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

// C^6 monotone step on [0,1]: S(t) = int_0^t u^6(1-u)^6 du / B(7,7), a
// degree-13 polynomial with six vanishing derivatives at both ends. Used for
// mollifier profiles and test-function windows.
double smooth_step(double t);

// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

// Axis-aligned box (the chart image and all quadrature supports are boxes).
struct Box {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Vec& x, double margin = 0.0) const;
    bool empty() const;
    Box intersect(const Box& other) const;
    Box shrink(double margin) const;
};

// Tensor-product Gauss-Legendre grid over a box: nodes_per_axis^dim points.
struct TensorGrid {
    std::vector<Vec> points;
    std::vector<double> weights;
};

TensorGrid tensor_gauss_grid(const Box& box, int nodes_per_axis);

// Integrates f over the box with the tensor-product rule.
double integrate_box(const std::function<double(const Vec&)>& f, const Box& box,
                     int nodes_per_axis);

} // namespace gtf
