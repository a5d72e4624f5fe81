#include "gtf/geodesics.hpp"

#include <cmath>
#include <cstring>

namespace gtf {

namespace {

struct GeoWorkspace {
    int n;
    const ChartManifold* m;
    double gamma[kMaxDim * kMaxDim * kMaxDim];

    // du = v, dv = -Gamma(u)(v, v)
    void rhs(const double* u, const double* v, double* du, double* dv) {
        m->christoffel_raw(u, gamma);
        const double* G = gamma;
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                double t = 0.0;
                for (int j = 0; j < n; ++j) t += G[j] * v[j];
                s += v[i] * t;
                G += n;
            }
            du[k] = v[k];
            dv[k] = -s;
        }
    }
};

} // namespace

GeodesicSolution geodesic_solve(const ChartManifold& m, const Vec& x, const Vec& w,
                                double t) {
    int n = m.dim();
    if (n > kMaxDim) throw ContractViolation("geodesic_solve: dimension too large");
    if (!m.domain().contains(x))
        throw DomainExitError("geodesic_solve: start outside domain", 0.0);

    double wnorm = norm(w);
    double h0 = 1e-3 / std::max(1.0, wnorm);
    double total = std::fabs(t);
    double dir = t >= 0 ? 1.0 : -1.0;

    GeoWorkspace ws{n, &m, {}};
    double u[kMaxDim], v[kMaxDim];
    double ku[4][kMaxDim], kv[4][kMaxDim];
    double tu[kMaxDim], tv[kMaxDim];
    for (int i = 0; i < n; ++i) {
        u[i] = x[i];
        v[i] = w[i];
    }

    long steps = 0;
    double done = 0.0;
    while (done < total) {
        double h = std::min(h0, total - done) * dir;
        ws.rhs(u, v, ku[0], kv[0]);
        for (int i = 0; i < n; ++i) {
            tu[i] = u[i] + 0.5 * h * ku[0][i];
            tv[i] = v[i] + 0.5 * h * kv[0][i];
        }
        ws.rhs(tu, tv, ku[1], kv[1]);
        for (int i = 0; i < n; ++i) {
            tu[i] = u[i] + 0.5 * h * ku[1][i];
            tv[i] = v[i] + 0.5 * h * kv[1][i];
        }
        ws.rhs(tu, tv, ku[2], kv[2]);
        for (int i = 0; i < n; ++i) {
            tu[i] = u[i] + h * ku[2][i];
            tv[i] = v[i] + h * kv[2][i];
        }
        ws.rhs(tu, tv, ku[3], kv[3]);
        for (int i = 0; i < n; ++i) {
            u[i] += h / 6.0 * (ku[0][i] + 2.0 * ku[1][i] + 2.0 * ku[2][i] + ku[3][i]);
            v[i] += h / 6.0 * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
        }
        done += std::fabs(h);
        ++steps;
        bool finite = true, inside = true;
        const Box& dom = m.domain();
        for (int i = 0; i < n; ++i) {
            if (!std::isfinite(u[i]) || !std::isfinite(v[i])) finite = false;
            if (u[i] < dom.lo[i] || u[i] > dom.hi[i]) inside = false;
        }
        if (!finite) throw NumericalError("geodesic_solve: non-finite state (blow-up)");
        if (!inside)
            throw DomainExitError("geodesic_solve: left chart domain", dir * done);
    }

    GeodesicSolution sol;
    sol.u.assign(u, u + n);
    sol.v.assign(v, v + n);
    sol.t_max = t;
    sol.steps = steps;
    return sol;
}

Vec exp_map(const ChartManifold& m, const Vec& x, const Vec& w) {
    double wnorm = norm(w);
    if (wnorm == 0.0) return x;
    // u(1, x, w) = u(|w|, x, w/|w|); the unit-speed form takes
    // |w|/1e-3 steps instead of max(1,|w|)*1e3.
    return geodesic_solve(m, x, (1.0 / wnorm) * w, wnorm).u;
}

bool ConvexPatch::contains(const Vec& p) const {
    return norm(p - center) <= radius * (1.0 + 1e-12);
}

Vec log_map(const ChartManifold& m, const Vec& x, const Vec& y, const ConvexPatch& patch,
            const Vec* hint) {
    if (!patch.contains(x) || !patch.contains(y))
        throw ContractViolation("log_map: arguments outside convex patch");
    int n = m.dim();
    Vec w = hint ? *hint : y - x;
    const double tol = 1e-10;
    Mat jac_inv;
    bool have_jac = false;
    double prev_res = 1e300;
    int jac_age = 0;

    for (int iter = 0; iter < 50; ++iter) {
        Vec r = exp_map(m, x, w) - y;
        double res = norm(r);
        if (res < tol) return w;
        // Refresh the Jacobian when stale or when convergence stalls.
        if (!have_jac || res > 0.5 * prev_res || jac_age >= 4) {
            Mat jac(n, n);
            double h = 1e-6 * std::max(1.0, norm(w));
            Vec wp = w;
            for (int i = 0; i < n; ++i) {
                wp[i] = w[i] + h;
                Vec fp = exp_map(m, x, wp);
                for (int k = 0; k < n; ++k) jac(k, i) = (fp[k] - (r[k] + y[k])) / h;
                wp[i] = w[i];
            }
            jac_inv = inverse(jac);
            have_jac = true;
            jac_age = 0;
        }
        Vec delta = mat_vec(jac_inv, r);
        w = w - delta;
        prev_res = res;
        ++jac_age;
    }
    throw NonConvergenceError(
        "log_map: Newton did not converge in 50 iterations (pair outside convex patch?)");
}

ConvexPatch find_convex_patch(const ChartManifold& m, const Vec& x0, Rng& rng,
                              int trials) {
    int n = m.dim();
    double dist = 1e300;
    for (int i = 0; i < n; ++i) {
        dist = std::min(dist, x0[i] - m.domain().lo[i]);
        dist = std::min(dist, m.domain().hi[i] - x0[i]);
    }
    if (dist <= 0.0) throw ContractViolation("find_convex_patch: center outside domain");

    double r = 0.5 * dist;
    for (int halvings = 0; halvings < 24; ++halvings) {
        ConvexPatch patch{x0, r};
        bool ok = true;
        Rng trial_rng(rng.next_u64());
        for (int t = 0; t < trials && ok; ++t) {
            Vec a = x0, b = x0;
            Vec da = trial_rng.direction(n), db = trial_rng.direction(n);
            double ra = r * trial_rng.uniform(), rb = r * trial_rng.uniform();
            for (int i = 0; i < n; ++i) {
                a[i] += ra * da[i];
                b[i] += rb * db[i];
            }
            try {
                Vec w = log_map(m, a, b, patch);
                if (max_abs_diff(exp_map(m, a, w), b) > 1e-9) ok = false;
            } catch (const Error&) {
                ok = false;
            }
        }
        if (ok) return patch;
        r *= 0.5;
    }
    throw NonConvergenceError("find_convex_patch: no radius found");
}

JetReport jet_check_uv(const ChartManifold& m, const Vec& x, double t, Rng& rng,
                       int direction_pairs, double fd_step) {
    int n = m.dim();
    JetReport rep;

    GeodesicSolution base = geodesic_solve(m, x, Vec(n, 0.0), t);
    rep.value_residual = std::max(max_abs_diff(base.u, x), max_abs(base.v));

    Christoffel gamma = m.christoffel(x);
    const double h = fd_step;

    auto solve_dir = [&](const Vec& xi, const Vec& eta, double s) {
        Vec xs = x, ws(n);
        for (int i = 0; i < n; ++i) {
            xs[i] += s * xi[i];
            ws[i] = s * eta[i];
        }
        return geodesic_solve(m, xs, ws, t);
    };

    for (int pair = 0; pair < direction_pairs; ++pair) {
        Vec xi1 = rng.direction(n), eta1 = rng.direction(n);
        Vec xi2 = rng.direction(n), eta2 = rng.direction(n);

        // First derivatives along (xi1, eta1).
        GeodesicSolution p = solve_dir(xi1, eta1, h);
        GeodesicSolution q = solve_dir(xi1, eta1, -h);
        for (int k = 0; k < n; ++k) {
            double du = (p.u[k] - q.u[k]) / (2.0 * h);
            double dv = (p.v[k] - q.v[k]) / (2.0 * h);
            rep.first_residual = std::max(rep.first_residual,
                                          std::fabs(du - (xi1[k] + t * eta1[k])));
            rep.first_residual = std::max(rep.first_residual, std::fabs(dv - eta1[k]));
        }

        // Mixed second derivatives along ((xi1,eta1), (xi2,eta2)).
        Vec xs = xi1 + xi2, es = eta1 + eta2;
        Vec xd = xi1 - xi2, ed = eta1 - eta2;
        GeodesicSolution spp = solve_dir(xs, es, h);
        GeodesicSolution smm = solve_dir(xs, es, -h);
        GeodesicSolution dpp = solve_dir(xd, ed, h);
        GeodesicSolution dmm = solve_dir(xd, ed, -h);
        Vec g12 = gamma.apply(eta1, eta2), g21 = gamma.apply(eta2, eta1);
        for (int k = 0; k < n; ++k) {
            double d2u = (spp.u[k] + smm.u[k] - dpp.u[k] - dmm.u[k]) / (4.0 * h * h);
            double d2v = (spp.v[k] + smm.v[k] - dpp.v[k] - dmm.v[k]) / (4.0 * h * h);
            double ref_u = -0.5 * t * t * (g12[k] + g21[k]);
            double ref_v = -t * (g12[k] + g21[k]);
            rep.second_residual = std::max(rep.second_residual, std::fabs(d2u - ref_u));
            rep.second_residual = std::max(rep.second_residual, std::fabs(d2v - ref_v));
        }
    }
    rep.max_residual =
        std::max({rep.value_residual, rep.first_residual, rep.second_residual});
    return rep;
}

} // namespace gtf
