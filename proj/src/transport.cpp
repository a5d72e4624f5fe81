#include "gtf/transport.hpp"

#include <cmath>
#include <cstring>

namespace gtf {

namespace {

// Joint integration of (u, v, R) with R' = -Gamma(u)(v, R.). The geodesic is
// integrated in unit-speed parametrization; parallel transport is invariant
// under reparametrization.
Mat transport_core(const ChartManifold& m, const Vec& x, const Vec& w) {
    int n = m.dim();
    double wnorm = norm(w);
    Mat res = Mat::identity(n);
    if (wnorm == 0.0) return res;

    double u[kMaxDim], v[kMaxDim], r[kMaxDim * kMaxDim];
    for (int i = 0; i < n; ++i) {
        u[i] = x[i];
        v[i] = w[i] / wnorm;
    }
    for (int i = 0; i < n * n; ++i) r[i] = 0.0;
    for (int i = 0; i < n; ++i) r[i * n + i] = 1.0;

    double gamma[kMaxDim * kMaxDim * kMaxDim];
    auto rhs = [&](const double* uu, const double* vv, const double* rr, double* du,
                   double* dv, double* dr) {
        m.christoffel_raw(uu, gamma);
        for (int k = 0; k < n; ++k) {
            double sv = 0.0;
            for (int i = 0; i < n; ++i) {
                const double* G = &gamma[(static_cast<size_t>(k) * n + i) * n];
                double ti = 0.0;
                for (int j = 0; j < n; ++j) ti += G[j] * vv[j];
                sv += vv[i] * ti;
            }
            du[k] = vv[k];
            dv[k] = -sv;
            for (int c = 0; c < n; ++c) {
                double sr = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double* G = &gamma[(static_cast<size_t>(k) * n + i) * n];
                    double ti = 0.0;
                    for (int j = 0; j < n; ++j) ti += G[j] * rr[j * n + c];
                    sr += vv[i] * ti;
                }
                dr[k * n + c] = -sr;
            }
        }
    };

    const double h0 = 1e-3;
    double total = wnorm, done = 0.0;
    double ku[4][kMaxDim], kv[4][kMaxDim], kr[4][kMaxDim * kMaxDim];
    double tu[kMaxDim], tv[kMaxDim], tr[kMaxDim * kMaxDim];
    while (done < total) {
        double h = std::min(h0, total - done);
        rhs(u, v, r, ku[0], kv[0], kr[0]);
        for (int i = 0; i < n; ++i) {
            tu[i] = u[i] + 0.5 * h * ku[0][i];
            tv[i] = v[i] + 0.5 * h * kv[0][i];
        }
        for (int i = 0; i < n * n; ++i) tr[i] = r[i] + 0.5 * h * kr[0][i];
        rhs(tu, tv, tr, ku[1], kv[1], kr[1]);
        for (int i = 0; i < n; ++i) {
            tu[i] = u[i] + 0.5 * h * ku[1][i];
            tv[i] = v[i] + 0.5 * h * kv[1][i];
        }
        for (int i = 0; i < n * n; ++i) tr[i] = r[i] + 0.5 * h * kr[1][i];
        rhs(tu, tv, tr, ku[2], kv[2], kr[2]);
        for (int i = 0; i < n; ++i) {
            tu[i] = u[i] + h * ku[2][i];
            tv[i] = v[i] + h * kv[2][i];
        }
        for (int i = 0; i < n * n; ++i) tr[i] = r[i] + h * kr[2][i];
        rhs(tu, tv, tr, ku[3], kv[3], kr[3]);
        for (int i = 0; i < n; ++i) {
            u[i] += h / 6.0 * (ku[0][i] + 2.0 * ku[1][i] + 2.0 * ku[2][i] + ku[3][i]);
            v[i] += h / 6.0 * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
        }
        for (int i = 0; i < n * n; ++i)
            r[i] += h / 6.0 * (kr[0][i] + 2.0 * kr[1][i] + 2.0 * kr[2][i] + kr[3][i]);
        done += h;
        const Box& dom = m.domain();
        for (int i = 0; i < n; ++i) {
            if (!std::isfinite(u[i]))
                throw NumericalError("parallel_transport: non-finite state");
            if (u[i] < dom.lo[i] || u[i] > dom.hi[i])
                throw DomainExitError("parallel_transport: left chart domain", done);
        }
    }
    std::memcpy(res.a.data(), r, static_cast<size_t>(n) * n * sizeof(double));
    return res;
}

} // namespace

Vec parallel_transport(const ChartManifold& m, const Vec& x, const Vec& y,
                       const Vec& zeta, const ConvexPatch& patch) {
    Vec w = log_map(m, x, y, patch);
    Mat a = transport_core(m, x, w);
    return mat_vec(a, zeta);
}

Mat transport_matrix(const ChartManifold& m, const Vec& x, const Vec& y,
                     const ConvexPatch& patch, const Vec* log_hint) {
    Vec w = log_map(m, x, y, patch, log_hint);
    return transport_core(m, x, w);
}

Mat TransportOperator::eval(const Vec& x, const Vec& y) const {
    if (!patch_.contains(x) || !patch_.contains(y))
        throw ContractViolation("TransportOperator: pair outside convex patch");
    int n = manifold_->dim();
    std::vector<int64_t> key(2 * n);
    const double quantum = 0x1p32; // ~2.3e-10 resolution, below solver tolerance
    for (int i = 0; i < n; ++i) {
        key[i] = static_cast<int64_t>(std::llround(x[i] * quantum));
        key[n + i] = static_cast<int64_t>(std::llround(y[i] * quantum));
    }
    Vec hint;
    bool have_hint = false;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        if (!warm_x_.empty() && max_abs_diff(warm_x_, x) < 1e-14 &&
            max_abs_diff(warm_y_, y) < 0.1) {
            hint = warm_w_ + (y - warm_y_);
            have_hint = true;
        }
    }
    Vec w = log_map(*manifold_, x, y, patch_, have_hint ? &hint : nullptr);
    Mat a = transport_core(*manifold_, x, w);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        warm_x_ = x;
        warm_y_ = y;
        warm_w_ = w;
        cache_.emplace(std::move(key), a);
    }
    return a;
}

Vec TransportOperator::apply(const Vec& x, const Vec& y, const Vec& zeta) const {
    return mat_vec(eval(x, y), zeta);
}

TensorValue TransportOperator::apply_tensor(const Vec& x, const Vec& y,
                                            const TensorValue& t) const {
    if (t.slots() == 0) return t;
    Mat a = eval(x, y);
    Mat l = transpose(inverse(a));
    return tensor_slot_transform(t, a, l);
}

size_t TransportOperator::cache_size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

TensorValue transport_tensor(const TransportOperator& a, const Vec& x, const Vec& y,
                             const TensorValue& t) {
    return a.apply_tensor(x, y, t);
}

TransportJetReport jet_check_transport(const ChartManifold& m, const Vec& x, Rng& rng,
                                       int direction_pairs, double fd_step) {
    int n = m.dim();
    TransportJetReport rep;
    ConvexPatch patch{x, std::max(1.0, 8.0 * fd_step)};

    auto a_at = [&](const Vec& xx, const Vec& yy) {
        Vec w = log_map(m, xx, yy, patch);
        return transport_core(m, xx, w);
    };

    rep.identity_residual = max_abs_diff(a_at(x, x), Mat::identity(n));

    Christoffel gamma = m.christoffel(x);
    std::vector<double> dgamma = christoffel_derivative(m, x, 1e-4);
    auto gamma_prime = [&](const Vec& wdir, const Vec& yv, const Vec& zv) {
        // (Gamma'(x) . wdir)(yv, zv)
        Vec out(n, 0.0);
        for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int mm = 0; mm < n; ++mm) {
                if (wdir[mm] == 0.0) continue;
                double t = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        t += dgamma[((static_cast<size_t>(mm) * n + k) * n + i) * n + j] *
                             yv[i] * zv[j];
                acc += wdir[mm] * t;
            }
            out[k] = acc;
        }
        return out;
    };

    const double h = fd_step;
    auto shift = [&](const Vec& base, const Vec& d, double sc) {
        Vec out = base;
        for (int i = 0; i < n; ++i) out[i] += sc * d[i];
        return out;
    };

    for (int pair = 0; pair < direction_pairs; ++pair) {
        Vec xi1 = rng.direction(n), eta1 = rng.direction(n);
        Vec xi2 = rng.direction(n), eta2 = rng.direction(n);
        Vec zeta = rng.direction(n);

        // (ii) first derivative along (xi1, eta1)
        Mat ap = a_at(shift(x, xi1, h), shift(x, eta1, h));
        Mat am = a_at(shift(x, xi1, -h), shift(x, eta1, -h));
        Vec da = mat_vec((1.0 / (2.0 * h)) * (ap - am), zeta);
        Vec ref1 = gamma.apply(eta1 - xi1, zeta);
        for (int k = 0; k < n; ++k)
            rep.first_residual = std::max(rep.first_residual, std::fabs(da[k] + ref1[k]));

        // (iii) mixed second derivative along the pair
        Vec xs = xi1 + xi2, es = eta1 + eta2;
        Vec xd = xi1 - xi2, ed = eta1 - eta2;
        Mat spp = a_at(shift(x, xs, h), shift(x, es, h));
        Mat smm = a_at(shift(x, xs, -h), shift(x, es, -h));
        Mat dpp = a_at(shift(x, xd, h), shift(x, ed, h));
        Mat dmm = a_at(shift(x, xd, -h), shift(x, ed, -h));
        Vec d2a = mat_vec((1.0 / (4.0 * h * h)) * (spp + smm - dpp - dmm), zeta);

        Vec m1 = eta1 - xi1, m2 = eta2 - xi2;
        Vec ref2 = gamma_prime(eta1 + xi1, m2, zeta) + gamma_prime(eta2 + xi2, m1, zeta) -
                   gamma.apply(m1, gamma.apply(m2, zeta)) -
                   gamma.apply(m2, gamma.apply(m1, zeta));
        // 2 a'' = -ref2, so compare 2*d2a + ref2 against zero.
        for (int k = 0; k < n; ++k)
            rep.second_residual =
                std::max(rep.second_residual, std::fabs(2.0 * d2a[k] + ref2[k]));
    }
    rep.max_residual =
        std::max({rep.identity_residual, rep.first_residual, rep.second_residual});
    return rep;
}

Mat pullback_transport(const Diffeo& mu, const Diffeo& nu, const TransportOperator& a,
                       const Vec& p, const Vec& q) {
    Mat dmu = mu.jacobian(p);
    Mat dnu = nu.jacobian(q);
    Mat core = a.eval(mu.apply(p), nu.apply(q));
    return inverse(dnu) * core * dmu;
}

namespace {

// Central difference with one Richardson step over tau and tau/2.
template <typename F>
auto richardson_flow_derivative(const F& eval, double tau) -> decltype(eval(0.0)) {
    auto d_at = [&](double t) {
        auto plus = eval(t);
        auto minus = eval(-t);
        return (1.0 / (2.0 * t)) * (plus - minus);
    };
    auto d1 = d_at(tau);
    auto d2 = d_at(0.5 * tau);
    return (1.0 / 3.0) * (4.0 * d2 - d1);
}

} // namespace

Mat lie_transport(const TransportOperator& a, const VectorField& x_field,
                  const VectorField& y_field, const Vec& p, const Vec& q, double tau) {
    auto eval = [&](double t) -> Mat {
        FlowDiffeo mu(x_field, t);
        FlowDiffeo nu(y_field, t);
        return pullback_transport(mu, nu, a, p, q);
    };
    return richardson_flow_derivative(eval, tau);
}

TensorValue lie_transport_tensor(const TransportOperator& a, const VectorField& x_field,
                                 const VectorField& y_field, const Vec& p, const Vec& q,
                                 const TensorValue& w, double tau) {
    auto eval = [&](double t) -> Vec {
        FlowDiffeo mu(x_field, t);
        FlowDiffeo nu(y_field, t);
        Mat dmu = mu.jacobian(p);
        // Push w forward through T mu, transport, pull back through T nu.
        TensorValue pushed =
            tensor_slot_transform(w, dmu, transpose(inverse(dmu)));
        TensorValue moved = a.apply_tensor(mu.apply(p), nu.apply(q), pushed);
        Mat dnu = nu.jacobian(q);
        TensorValue back =
            tensor_slot_transform(moved, inverse(dnu), transpose(dnu));
        return back.comps;
    };
    Vec d = richardson_flow_derivative(eval, tau);
    TensorValue out(w.r, w.s, w.n);
    out.comps = d;
    return out;
}

double holonomy_angle(const ChartManifold& m, const std::vector<Vec>& vertices) {
    int n = m.dim();
    if (n != 2) throw ContractViolation("holonomy_angle: 2-d charts only");
    Mat loop = Mat::identity(n);
    size_t count = vertices.size();
    for (size_t leg = 0; leg < count; ++leg) {
        const Vec& from = vertices[leg];
        const Vec& to = vertices[(leg + 1) % count];
        ConvexPatch patch;
        patch.center = 0.5 * (from + to);
        patch.radius = 0.75 * norm(to - from) + 1e-6;
        loop = transport_matrix(m, from, to, patch) * loop;
    }
    return std::atan2(loop(1, 0), loop(0, 0));
}

} // namespace gtf
