#include "gtf/calculus.hpp"

#include <cmath>

namespace gtf {

namespace {

class InverseDiffeo : public Diffeo {
public:
    explicit InverseDiffeo(const Diffeo& base) : base_(base) {}
    Vec apply(const Vec& p) const override { return base_.apply_inverse(p); }
    Vec apply_inverse(const Vec& p) const override { return base_.apply(p); }
    Mat jacobian(const Vec& p) const override {
        return inverse(base_.jacobian(base_.apply_inverse(p)));
    }

private:
    const Diffeo& base_;
};

} // namespace

TensorValue pullback_generalized(const Diffeo& mu, const GeneralizedField& r,
                                 const KernelFamily& kern, double eps, const Vec& p) {
    // mu_* omega = (mu^{-1})^* omega as a kernel family.
    InverseDiffeo mu_inv(mu);
    PulledBackKernel pushed(mu_inv, kern);
    TensorValue value = r(pushed, eps, mu.apply(p));
    if (value.slots() == 0) return value;
    Mat dmu = mu.jacobian(p);
    return tensor_value_pullback(value, dmu);
}

TensorValue lie_generalized(const VectorField& x_field, const GeneralizedField& r,
                            const KernelFamily& kern, double eps, const Vec& p,
                            double tau) {
    auto eval = [&](double t) -> Vec {
        FlowDiffeo mu(x_field, t);
        return pullback_generalized(mu, r, kern, eps, p).comps;
    };
    auto d_at = [&](double t) {
        Vec plus = eval(t), minus = eval(-t);
        return (1.0 / (2.0 * t)) * (plus - minus);
    };
    Vec d1 = d_at(tau), d2 = d_at(0.5 * tau);
    TensorValue out(r.r, r.s, r.n);
    out.comps = (1.0 / 3.0) * (4.0 * d2 - d1);
    return out;
}

namespace {

CommutationReport::Verdict judge(const CommutationReport& rep,
                                 const CommutationThresholds& th) {
    if (std::fabs(rep.final_closed) < th.closed_zero_tol && rep.slope >= th.decay_slope)
        return CommutationReport::Verdict::Commutes;
    if (std::fabs(rep.final_residual) > th.nonzero_floor &&
        rep.final_mismatch <= th.match_rel_tol)
        return CommutationReport::Verdict::FailsWithFormulaMatch;
    return CommutationReport::Verdict::Inconclusive;
}

} // namespace

CommutationReport commutator_residual(const TensorDistribution& t,
                                      std::shared_ptr<const TransportOperator> a,
                                      const VectorField& x_field, const KernelFamily& kern,
                                      const TensorFieldFn& v, const Vec& p,
                                      const std::vector<double>& eps_grid,
                                      const PairOptions& opts,
                                      const CommutationThresholds& thresholds) {
    CommutationReport rep;
    rep.eps = eps_grid;

    TensorDistribution lie_t = TensorDistribution::lie_derived(x_field, t);
    GeneralizedField iota_t = embed_field(t, a, opts);
    TensorValue vp = v.eval(p);

    for (double eps : eps_grid) {
        double side1 = embed(lie_t, *a, kern, eps, v, p, opts);
        TensorValue lie_of_embedded = lie_generalized(x_field, iota_t, kern, eps, p);
        double side2 = lie_of_embedded.contract_dual(vp);
        double d = side1 - side2;

        // Closed form <T, (L_{XxX}A)(p,.) v(p) (x) Phi(eps,p)> through the
        // transport-operator derivative (independent of the embedding path).
        TestObject xi;
        xi.omega.support = kern.support_box(eps, p);
        const KernelFamily* kf = &kern;
        Vec pc = p;
        xi.omega.coeff = [kf, eps, pc](const Vec& q) { return kf->density(eps, pc, q); };
        xi.u.r = v.r;
        xi.u.s = v.s;
        xi.u.n = v.n;
        const TransportOperator* op = a.get();
        const VectorField* xf = &x_field;
        TensorValue vpc = vp;
        xi.u.eval = [op, xf, pc, vpc](const Vec& q) {
            return lie_transport_tensor(*op, *xf, *xf, pc, q, vpc);
        };
        double closed = pair(t, xi, opts);

        rep.residual.push_back(std::fabs(d));
        rep.closed_form.push_back(closed);
        double floor = 1e-10;
        rep.rel_mismatch.push_back(std::fabs(d - closed) /
                                   std::max(std::fabs(closed), floor));
    }

    rep.final_residual = rep.residual.back();
    rep.final_closed = rep.closed_form.back();
    rep.final_mismatch = rep.rel_mismatch.back();
    rep.slope = fit_loglog_slope(rep.eps, rep.residual, 1e-12, nullptr);
    rep.verdict = judge(rep, thresholds);
    return rep;
}

ConnectionMismatchReport connection_mismatch_residual(
    const TensorDistribution& t, const TransportOperator& a, const TransportOperator& a_tilde,
    const VectorField& y_probe, const KernelFamily& kern, const TensorFieldFn& v,
    const Vec& p, const std::vector<double>& eps_grid, const PairOptions& opts) {
    ConnectionMismatchReport rep;
    rep.eps = eps_grid;
    for (double eps : eps_grid) {
        double va = embed(t, a, kern, eps, v, p, opts);
        double vb = embed(t, a_tilde, kern, eps, v, p, opts);
        rep.residual.push_back(std::fabs(va - vb));
    }

    // First-order check at q = p along the probe direction.
    Vec y = y_probe.eval(p);
    TensorValue vp = v.eval(p);
    if (vp.slots() != 1 || vp.r != 1)
        throw ContractViolation(
            "connection_mismatch_residual: first-order check needs a vector dual field");
    Vec z(vp.comps);
    rep.fd_derivative = transport_difference_derivative(a, a_tilde, p, y, z);

    const ChartManifold& m = a.manifold();
    const ChartManifold& mt = a_tilde.manifold();
    Christoffel ga = m.christoffel(p);
    Christoffel gt = mt.christoffel(p);
    rep.formula_value = gt.apply(y, z) - ga.apply(y, z);
    rep.derivative_residual = max_abs_diff(rep.fd_derivative, rep.formula_value);
    return rep;
}

Vec transport_difference_derivative(const TransportOperator& a,
                                    const TransportOperator& a_tilde, const Vec& p,
                                    const Vec& y, const Vec& z, double h) {
    auto diff_at = [&](double s) {
        Vec q = p + s * y;
        Vec va = a.apply(p, q, z);
        Vec vb = a_tilde.apply(p, q, z);
        return va - vb;
    };
    Vec plus = diff_at(h), minus = diff_at(-h);
    return (1.0 / (2.0 * h)) * (plus - minus);
}

Vec lie_single_transport_fd(const TransportOperator& a, const VectorField& x_field,
                            const Vec& z, const Vec& p, double tau) {
    auto eval = [&](double t) {
        FlowJet jet = flow_with_jacobian(x_field, t, p);
        Vec moved = a.apply(p, jet.x, z);
        return mat_vec(inverse(jet.jacobian), moved);
    };
    auto d_at = [&](double t) { return (1.0 / (2.0 * t)) * (eval(t) - eval(-t)); };
    Vec d1 = d_at(tau), d2 = d_at(0.5 * tau);
    return (1.0 / 3.0) * (4.0 * d2 - d1);
}

Vec first_order_formula(const ChartManifold& m, const VectorField& x_field, const Vec& z,
                        const Vec& x) {
    Vec xv = x_field.eval(x);
    Mat xp = x_field.jacobian(x);
    Christoffel gamma = m.christoffel(x);
    Vec out = mat_vec(xp, z);
    Vec gxz = gamma.apply(xv, z);
    for (size_t i = 0; i < out.size(); ++i) out[i] = -out[i] - gxz[i];
    return out;
}

Vec second_order_formula(const ChartManifold& m, const VectorField& x_field,
                         const VectorField& y_field, const VectorField& z_field,
                         const Vec& x) {
    int n = m.dim();
    Vec xv = x_field.eval(x), yv = y_field.eval(x), zv = z_field.eval(x);
    Mat xp = x_field.jacobian(x);
    Christoffel gamma = m.christoffel(x);
    std::vector<double> dgamma = christoffel_derivative(m, x, 1e-4);

    auto gamma_prime = [&](const Vec& w, const Vec& yy, const Vec& zz) {
        Vec out(n, 0.0);
        for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int mm = 0; mm < n; ++mm) {
                if (w[mm] == 0.0) continue;
                double tsum = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        tsum += dgamma[((static_cast<size_t>(mm) * n + k) * n + i) * n + j] *
                                yy[i] * zz[j];
                acc += w[mm] * tsum;
            }
            out[k] = acc;
        }
        return out;
    };

    Vec xpp = x_field.second_apply(x, yv, zv);      // X'' Y Z
    Vec g_yz = gamma.apply(yv, zv);
    Vec term2 = mat_vec(xp, g_yz);                  // X' Gamma(Y,Z)
    Vec term3 = gamma_prime(yv, yv, zv);            // (Gamma'.Y)(Y,Z)
    Vec term4 = gamma.apply(yv, gamma.apply(yv, zv));
    Vec half1 = gamma_prime(xv, yv, zv);            // (Gamma'.X)(Y,Z)
    Vec half2 = gamma_prime(yv, xv, zv);            // (Gamma'.Y)(X,Z)
    Vec half3 = gamma.apply(xv, gamma.apply(yv, zv));
    Vec half4 = gamma.apply(yv, gamma.apply(xv, zv));
    Vec xpy = mat_vec(xp, yv);
    Vec term7 = gamma.apply(xpy, zv);               // Gamma(X'Y, Z)
    Vec xpz = mat_vec(xp, zv);
    Vec term8 = gamma.apply(yv, xpz);               // Gamma(Y, X'Z)

    Vec out(n);
    for (int k = 0; k < n; ++k)
        out[k] = -xpp[k] + term2[k] - term3[k] + term4[k] -
                 0.5 * (half1[k] - half2[k] + half3[k] + half4[k]) - term7[k] - term8[k];
    return out;
}

Vec second_order_double_fd(const TransportOperator& a, const VectorField& x_field,
                           const VectorField& y_field, const VectorField& z_field,
                           const Vec& x, double tau) {
    Vec z = z_field.eval(x);
    auto eval = [&](double s) {
        FlowJet jet = flow_with_jacobian(y_field, s, x);
        Mat lie = lie_transport(a, x_field, x_field, x, jet.x);
        return mat_vec(inverse(jet.jacobian), mat_vec(lie, z));
    };
    auto d_at = [&](double s) { return (1.0 / (2.0 * s)) * (eval(s) - eval(-s)); };
    Vec d1 = d_at(tau), d2 = d_at(0.5 * tau);
    return (1.0 / 3.0) * (4.0 * d2 - d1);
}

CommutationReport homothety_commutation(const Diffeo& mu, const TensorDistribution& t,
                                        std::shared_ptr<const TransportOperator> a,
                                        const KernelFamily& kern, const Vec& p,
                                        const std::vector<double>& eps_grid,
                                        const PairOptions& opts,
                                        const CommutationThresholds& thresholds) {
    CommutationReport rep;
    rep.eps = eps_grid;

    // iota(mu^* T) embeds on the source; mu^*(iota T) pulls the embedded
    // field back. For a homothety both use the same Levi-Civita transport.
    auto mu_shared = std::shared_ptr<const Diffeo>(&mu, [](const Diffeo*) {});
    TensorDistribution pulled = TensorDistribution::pulled_back(mu_shared, t);
    GeneralizedField iota_pulled = embed_field(pulled, a, opts);
    GeneralizedField iota_t = embed_field(t, a, opts);

    for (double eps : eps_grid) {
        TensorValue lhs = iota_pulled(kern, eps, p);
        TensorValue rhs = pullback_generalized(mu, iota_t, kern, eps, p);
        double diff = 0.0, scale = 0.0;
        for (size_t i = 0; i < lhs.size(); ++i) {
            diff = std::max(diff, std::fabs(lhs.comps[i] - rhs.comps[i]));
            scale = std::max(scale, std::fabs(rhs.comps[i]));
        }
        rep.residual.push_back(diff);
        rep.closed_form.push_back(0.0);
        rep.rel_mismatch.push_back(scale > 0 ? diff / scale : diff);
    }
    rep.final_residual = rep.residual.back();
    rep.final_closed = 0.0;
    rep.final_mismatch = rep.rel_mismatch.back();
    rep.slope = fit_loglog_slope(rep.eps, rep.residual, 1e-13, nullptr);
    // Exact symmetries sit at the numerical floor; count that as commuting.
    bool at_floor = true;
    for (double r : rep.residual)
        if (r > 1e-7) at_floor = false;
    if (at_floor || rep.slope >= thresholds.decay_slope)
        rep.verdict = CommutationReport::Verdict::Commutes;
    else
        rep.verdict = CommutationReport::Verdict::Inconclusive;
    return rep;
}

} // namespace gtf
