#include "gtf/embedding.hpp"

#include <cmath>

namespace gtf {

namespace {

void check_patch(const TransportOperator& a, const Box& support) {
    const ConvexPatch& patch = a.patch();
    int n = static_cast<int>(support.lo.size());
    // All corners of the support box must lie in the patch ball.
    for (int mask = 0; mask < (1 << n); ++mask) {
        Vec corner(n);
        for (int i = 0; i < n; ++i)
            corner[i] = (mask >> i) & 1 ? support.hi[i] : support.lo[i];
        if (!patch.contains(corner))
            throw ContractViolation("embed: kernel support leaves the convex patch");
    }
}

} // namespace

double embed(const TensorDistribution& t, const TransportOperator& a,
             const KernelFamily& kern, double eps, const TensorFieldFn& v, const Vec& p,
             const PairOptions& opts) {
    if (v.r != t.rank_s() || v.s != t.rank_r())
        throw ContractViolation("embed: dual field rank mismatch");

    TestObject xi;
    xi.omega.support = kern.support_box(eps, p);
    check_patch(a, xi.omega.support);
    const KernelFamily* kf = &kern;
    Vec pc = p;
    xi.omega.coeff = [kf, eps, pc](const Vec& q) { return kf->density(eps, pc, q); };

    if (t.rank_r() == 0 && t.rank_s() == 0) {
        xi.u = TensorFieldFn::constant(TensorValue::scalar(v.eval(p).comps[0]));
        return pair(t, xi, opts);
    }

    TensorValue vp = v.eval(p);
    const TransportOperator* op = &a;
    xi.u.r = v.r;
    xi.u.s = v.s;
    xi.u.n = v.n;
    xi.u.eval = [op, pc, vp](const Vec& q) { return op->apply_tensor(pc, q, vp); };
    return pair(t, xi, opts);
}

std::vector<TensorFieldFn> dual_basis_fields(int r, int s, int n) {
    std::vector<TensorFieldFn> out;
    size_t count = TensorValue::flat_size(r, s, n);
    for (size_t lambda = 0; lambda < count; ++lambda)
        out.push_back(TensorFieldFn::constant(dual_basis(lambda, r, s, n)));
    return out;
}

GeneralizedField embed_field(const TensorDistribution& t,
                             std::shared_ptr<const TransportOperator> a,
                             PairOptions opts) {
    GeneralizedField f;
    f.r = t.rank_r();
    f.s = t.rank_s();
    f.n = t.dim();
    f.provenance = Provenance::EmbeddedDistribution;
    auto basis = dual_basis_fields(f.r, f.s, f.n);
    TensorDistribution dist = t;
    f.evaluator = [dist, a, opts, basis](const KernelFamily& kern, double eps,
                                         const Vec& p) {
        TensorValue out(dist.rank_r(), dist.rank_s(), dist.dim());
        for (size_t lambda = 0; lambda < out.size(); ++lambda)
            out.comps[lambda] = embed(dist, *a, kern, eps, basis[lambda], p, opts);
        return out;
    };
    return f;
}

GeneralizedField sigma_embed(const TensorFieldFn& t) {
    GeneralizedField f;
    f.r = t.r;
    f.s = t.s;
    f.n = t.n;
    f.provenance = Provenance::SigmaSmooth;
    TensorFieldFn field = t;
    f.evaluator = [field](const KernelFamily&, double, const Vec& p) {
        return field.eval(p);
    };
    return f;
}

std::vector<TensorValue> regularize(const TensorDistribution& t, const TransportOperator& a,
                                    const KernelFamily& kern, double eps,
                                    const std::vector<Vec>& grid,
                                    const PairOptions& opts) {
    auto basis = dual_basis_fields(t.rank_r(), t.rank_s(), t.dim());
    std::vector<TensorValue> out;
    out.reserve(grid.size());
    for (const Vec& p : grid) {
        TensorValue v(t.rank_r(), t.rank_s(), t.dim());
        for (size_t lambda = 0; lambda < v.size(); ++lambda)
            v.comps[lambda] = embed(t, a, kern, eps, basis[lambda], p, opts);
        out.push_back(std::move(v));
    }
    return out;
}

RateFitResult weak_convergence_test(const TensorDistribution& t, const TransportOperator& a,
                                    const KernelFamily& kern, const TestObject& xi,
                                    const std::vector<double>& eps_grid,
                                    const PairOptions& opts) {
    RateFitResult res;
    res.eps = eps_grid;
    double target = pair(t, xi, opts);
    auto basis = dual_basis_fields(t.rank_r(), t.rank_s(), t.dim());
    TensorGrid outer = tensor_gauss_grid(xi.omega.support, opts.nodes_per_axis);
    double scale = std::max(1.0, std::fabs(target));

    for (double eps : eps_grid) {
        double acc = 0.0;
        for (size_t i = 0; i < outer.points.size(); ++i) {
            const Vec& p = outer.points[i];
            double w = xi.omega.coeff(p);
            if (w == 0.0) continue;
            TensorValue teps(t.rank_r(), t.rank_s(), t.dim());
            for (size_t lambda = 0; lambda < teps.size(); ++lambda)
                teps.comps[lambda] = embed(t, a, kern, eps, basis[lambda], p, opts);
            acc += outer.weights[i] * teps.contract_dual(xi.u.eval(p)) * w;
        }
        res.values.push_back(std::fabs(acc - target));
    }
    res.slope = fit_loglog_slope(res.eps, res.values, 1e-13 * scale, &res.points_used);
    res.saturated = res.points_used < 3;
    return res;
}

RateFitResult iota_vs_sigma(const TensorFieldFn& t, const TensorFieldFn& u,
                            const TransportOperator& a, const KernelFamily& kern,
                            const std::vector<Vec>& sample_grid,
                            const std::vector<double>& eps_grid,
                            const PairOptions& opts) {
    RateFitResult res;
    res.eps = eps_grid;
    double scale = 0.0;
    for (double eps : eps_grid) {
        double sup = 0.0;
        for (const Vec& p : sample_grid) {
            Box box = kern.support_box(eps, p);
            check_patch(a, box);
            TensorValue up = u.eval(p);
            double fpp = t.eval(p).contract_dual(up);
            scale = std::max(scale, std::fabs(fpp));
            TensorGrid grid = tensor_gauss_grid(box, opts.nodes_per_axis);
            double acc = 0.0;
            for (size_t i = 0; i < grid.points.size(); ++i) {
                const Vec& q = grid.points[i];
                double w = kern.density(eps, p, q);
                if (w == 0.0) continue;
                // f(p,q) - f(p,p) under the kernel: the unit-mass constant
                // cancels exactly.
                double fq = t.eval(q).contract_dual(a.apply_tensor(p, q, up));
                acc += grid.weights[i] * (fq - fpp) * w;
            }
            sup = std::max(sup, std::fabs(acc));
        }
        res.values.push_back(sup);
    }
    res.slope =
        fit_loglog_slope(res.eps, res.values, 1e-14 * std::max(1.0, scale), &res.points_used);
    res.saturated = res.points_used < 3;
    return res;
}

InjectivityResult injectivity_probe(const TensorDistribution& t, const TransportOperator& a,
                                    const KernelFamily& kern, const TestObject& xi,
                                    const std::vector<double>& eps_grid,
                                    const PairOptions& opts, double tol) {
    InjectivityResult res;
    res.eps = eps_grid;
    res.target = pair(t, xi, opts);
    auto basis = dual_basis_fields(t.rank_r(), t.rank_s(), t.dim());
    TensorGrid outer = tensor_gauss_grid(xi.omega.support, opts.nodes_per_axis);
    for (double eps : eps_grid) {
        double acc = 0.0;
        for (size_t i = 0; i < outer.points.size(); ++i) {
            const Vec& p = outer.points[i];
            double w = xi.omega.coeff(p);
            if (w == 0.0) continue;
            TensorValue teps(t.rank_r(), t.rank_s(), t.dim());
            for (size_t lambda = 0; lambda < teps.size(); ++lambda)
                teps.comps[lambda] = embed(t, a, kern, eps, basis[lambda], p, opts);
            acc += outer.weights[i] * teps.contract_dual(xi.u.eval(p)) * w;
        }
        res.values.push_back(acc);
    }
    res.limit = res.values.back();
    double scale = std::max(1.0, std::fabs(res.target));
    res.converged = std::fabs(res.limit - res.target) <= tol * scale;
    res.nonzero_limit = std::fabs(res.limit) > 0.5 * std::fabs(res.target);
    return res;
}

} // namespace gtf
