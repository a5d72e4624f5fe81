#pragma once

#include "gtf/geometry.hpp"
#include "gtf/random.hpp"

namespace gtf {

// Charts here are low-dimensional by construction; hot integrator loops use
// stack buffers sized for this bound.
constexpr int kMaxDim = 4;

struct GeodesicSolution {
    Vec u;        // position at parameter t
    Vec v;        // velocity at parameter t
    double t_max; // largest integrated parameter
    long steps;
};

// Solves u' = v, v' = -Gamma(u)(v, v) from (x, w) to parameter t with
// fixed-step RK4, step <= 1e-3 / max(1, |w|). Aborts on domain exit or
// non-finite state.
GeodesicSolution geodesic_solve(const ChartManifold& m, const Vec& x, const Vec& w,
                                double t);

// exp(x, w) = u(1, x, w). Internally integrates the unit-speed
// reparametrization u(|w|, x, w/|w|), which is the same geodesic.
Vec exp_map(const ChartManifold& m, const Vec& x, const Vec& w);

struct ConvexPatch {
    Vec center;
    double radius = 0.0;

    bool contains(const Vec& p) const;
};

// Inverse of exp in the second slot: Newton iteration on
// w -> exp(x, w) - y with finite-difference Jacobian, initial guess y - x
// (or `hint`), terminating at |exp(x, w) - y| < 1e-10. Throws
// NonConvergenceError after 50 iterations, which signals a pair outside the
// convex patch.
Vec log_map(const ChartManifold& m, const Vec& x, const Vec& y, const ConvexPatch& patch,
            const Vec* hint = nullptr);

// Empirical convex patch around x0: start from half the distance to the
// chart boundary and halve the radius until `trials` random log_map calls
// converge.
ConvexPatch find_convex_patch(const ChartManifold& m, const Vec& x0, Rng& rng,
                              int trials = 20);

// Finite-difference verification of the derivative identities of (u, v)
// at w = 0:
//   u(t,x,0) = x                 v(t,x,0) = 0
//   u'(t,x,0)(xi,eta) = xi+t eta v'(t,x,0)(xi,eta) = eta
//   u''(t,x,0)(e1,e2) = -t^2/2 (Gamma(x)(eta1,eta2)+Gamma(x)(eta2,eta1))
//   v''(t,x,0)(e1,e2) = -t   (Gamma(x)(eta1,eta2)+Gamma(x)(eta2,eta1))
struct JetReport {
    double value_residual = 0.0;  // zeroth order
    double first_residual = 0.0;
    double second_residual = 0.0;
    double max_residual = 0.0;
};

JetReport jet_check_uv(const ChartManifold& m, const Vec& x, double t, Rng& rng,
                       int direction_pairs = 8, double fd_step = 1e-3);

} // namespace gtf
