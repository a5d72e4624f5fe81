#include "gtf/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace gtf {

namespace {

GaussRule compute_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& rule = gauss_legendre(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    static const double binom[7] = {1, -6, 15, -20, 15, -6, 1};
    double acc = 0.0;
    double tp = std::pow(t, 7);
    for (int k = 0; k <= 6; ++k) {
        acc += binom[k] * tp / (7 + k);
        tp *= t;
    }
    return acc * 8648640.0; // 1 / B(7,7) = 13! / (6! 6!)
}

bool Box::contains(const Vec& x, double margin) const {
    for (size_t i = 0; i < lo.size(); ++i)
        if (x[i] < lo[i] + margin || x[i] > hi[i] - margin) return false;
    return true;
}

bool Box::empty() const {
    for (size_t i = 0; i < lo.size(); ++i)
        if (hi[i] <= lo[i]) return true;
    return false;
}

Box Box::intersect(const Box& other) const {
    Box b = *this;
    for (size_t i = 0; i < lo.size(); ++i) {
        b.lo[i] = std::max(lo[i], other.lo[i]);
        b.hi[i] = std::min(hi[i], other.hi[i]);
    }
    return b;
}

Box Box::shrink(double margin) const {
    Box b = *this;
    for (size_t i = 0; i < lo.size(); ++i) {
        b.lo[i] += margin;
        b.hi[i] -= margin;
    }
    return b;
}

TensorGrid tensor_gauss_grid(const Box& box, int nodes_per_axis) {
    TensorGrid grid;
    int d = box.dim();
    if (box.empty()) return grid;
    const GaussRule& rule = gauss_legendre(nodes_per_axis);
    std::vector<int> idx(d, 0);
    size_t total = 1;
    for (int i = 0; i < d; ++i) total *= nodes_per_axis;
    grid.points.reserve(total);
    grid.weights.reserve(total);
    while (true) {
        Vec p(d);
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            double mid = 0.5 * (box.lo[i] + box.hi[i]);
            double half = 0.5 * (box.hi[i] - box.lo[i]);
            p[i] = mid + half * rule.nodes[idx[i]];
            w *= half * rule.weights[idx[i]];
        }
        grid.points.push_back(std::move(p));
        grid.weights.push_back(w);
        int axis = 0;
        while (axis < d && ++idx[axis] == nodes_per_axis) idx[axis++] = 0;
        if (axis == d) break;
    }
    return grid;
}

double integrate_box(const std::function<double(const Vec&)>& f, const Box& box,
                     int nodes_per_axis) {
    TensorGrid grid = tensor_gauss_grid(box, nodes_per_axis);
    double s = 0.0;
    for (size_t i = 0; i < grid.points.size(); ++i)
        s += grid.weights[i] * f(grid.points[i]);
    return s;
}

} // namespace gtf
