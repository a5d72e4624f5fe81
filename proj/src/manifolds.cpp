#include "gtf/manifolds.hpp"

#include <cmath>
#include <cstring>

namespace gtf {
namespace manifolds {

namespace {

Box box_nd(int dim, double lo, double hi) {
    Box b;
    b.lo.assign(dim, lo);
    b.hi.assign(dim, hi);
    return b;
}

} // namespace

ChartManifold flat(int dim, double extent) {
    ChristoffelFn gamma = [dim](const double*, double* g) {
        std::memset(g, 0, static_cast<size_t>(dim) * dim * dim * sizeof(double));
    };
    MetricFn metric = [dim](const double*, double* g) {
        std::memset(g, 0, static_cast<size_t>(dim) * dim * sizeof(double));
        for (int i = 0; i < dim; ++i) g[static_cast<size_t>(i) * dim + i] = 1.0;
    };
    return ChartManifold(dim, box_nd(dim, -extent, extent), gamma, metric);
}

namespace {

void halfplane_gamma(const double* x, double* g) {
    // Nonzero symbols: G^1_12 = G^1_21 = -1/y, G^2_11 = 1/y, G^2_22 = -1/y.
    double iy = 1.0 / x[1];
    std::memset(g, 0, 8 * sizeof(double));
    g[0 * 4 + 0 * 2 + 1] = -iy;
    g[0 * 4 + 1 * 2 + 0] = -iy;
    g[1 * 4 + 0 * 2 + 0] = iy;
    g[1 * 4 + 1 * 2 + 1] = -iy;
}

void halfplane_metric(const double* x, double* g) {
    double iy2 = 1.0 / (x[1] * x[1]);
    g[0] = iy2;
    g[1] = 0.0;
    g[2] = 0.0;
    g[3] = iy2;
}

Box halfplane_box(double y_min, double y_max) {
    Box b;
    b.lo = {-4.0, y_min};
    b.hi = {4.0, y_max};
    return b;
}

} // namespace

ChartManifold halfplane(double y_min, double y_max) {
    return ChartManifold(2, halfplane_box(y_min, y_max), halfplane_gamma,
                         halfplane_metric);
}

ChartManifold halfplane_from_metric(double y_min, double y_max) {
    return ChartManifold::from_metric(2, halfplane_box(y_min, y_max),
                                      halfplane_metric);
}

ChartManifold sphere_stereographic(double extent) {
    // Conformal factor e^{2f} with f = log(2/(1+r^2)); for conformal metrics
    // G^k_ij = d_j f delta_ki + d_i f delta_kj - d_k f delta_ij.
    ChristoffelFn gamma = [](const double* x, double* g) {
        double r2 = x[0] * x[0] + x[1] * x[1];
        double df[2] = {-2.0 * x[0] / (1.0 + r2), -2.0 * x[1] / (1.0 + r2)};
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    g[(static_cast<size_t>(k) * 2 + i) * 2 + j] =
                        df[j] * (k == i) + df[i] * (k == j) - df[k] * (i == j);
    };
    MetricFn metric = [](const double* x, double* g) {
        double r2 = x[0] * x[0] + x[1] * x[1];
        double c = 4.0 / ((1.0 + r2) * (1.0 + r2));
        g[0] = c;
        g[1] = 0.0;
        g[2] = 0.0;
        g[3] = c;
    };
    return ChartManifold(2, box_nd(2, -extent, extent), gamma, metric);
}

ChartManifold sphere_polar(double theta_min) {
    MetricFn metric = [](const double* x, double* g) {
        double s = std::sin(x[0]);
        g[0] = 1.0;
        g[1] = 0.0;
        g[2] = 0.0;
        g[3] = s * s;
    };
    Box b;
    b.lo = {theta_min, -7.0};
    b.hi = {M_PI - theta_min, 7.0};
    return ChartManifold::from_metric(2, b, metric);
}

ChartManifold random_polynomial(int dim, Rng& rng, double scale, double extent) {
    // coeff layout per (k, i<=j): [c0, c_m (m=0..n-1), c_ml (m<=l)]
    int n = dim;
    int quad = n * (n + 1) / 2;
    int per_entry = 1 + n + quad;
    std::vector<double> coeffs;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int c = 0; c < per_entry; ++c)
                    coeffs.push_back(rng.uniform(-scale, scale));

    ChristoffelFn gamma = [n, per_entry, coeffs](const double* x, double* g) {
        size_t idx = 0;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    const double* c = &coeffs[idx];
                    idx += per_entry;
                    double v = c[0];
                    int p = 1;
                    for (int m = 0; m < n; ++m) v += c[p++] * x[m];
                    for (int m = 0; m < n; ++m)
                        for (int l = m; l < n; ++l) v += c[p++] * x[m] * x[l];
                    g[(static_cast<size_t>(k) * n + i) * n + j] = v;
                    g[(static_cast<size_t>(k) * n + j) * n + i] = v;
                }
    };
    return ChartManifold(n, box_nd(n, -extent, extent), gamma);
}

} // namespace manifolds
} // namespace gtf
