#pragma once

#include "gtf/distributions.hpp"
#include "gtf/mollifier.hpp"
#include "gtf/transport.hpp"

namespace gtf {

enum class Provenance { EmbeddedDistribution, SigmaSmooth, Derived };

// Desk-scale generalized (r,s)-tensor field: a function of (kernel family,
// eps, point). Embedded distributions sample the transport operator; sigma
// fields ignore the kernel entirely.
struct GeneralizedField {
    int r = 0, s = 0, n = 1;
    Provenance provenance = Provenance::Derived;
    std::function<TensorValue(const KernelFamily&, double eps, const Vec& p)> evaluator;

    TensorValue operator()(const KernelFamily& kern, double eps, const Vec& p) const {
        return evaluator(kern, eps, p);
    }
};

// ((iota T)(Phi(eps,p)) . v)(p) = <T, A(p,.) v(p) (x) Phi(eps,p)> with v a
// dual field of rank (s,r). Requires the eps-support of the kernel at p to
// stay inside the transport operator's convex patch.
double embed(const TensorDistribution& t, const TransportOperator& a,
             const KernelFamily& kern, double eps, const TensorFieldFn& v, const Vec& p,
             const PairOptions& opts = {});

// The full evaluator p -> (iota T)(Phi(eps,p))(p) as a GeneralizedField.
GeneralizedField embed_field(const TensorDistribution& t,
                             std::shared_ptr<const TransportOperator> a,
                             PairOptions opts = {});

// sigma(t): evaluator ignores (kernel, eps).
GeneralizedField sigma_embed(const TensorFieldFn& t);

// T_eps sampled on a grid of points.
std::vector<TensorValue> regularize(const TensorDistribution& t, const TransportOperator& a,
                                    const KernelFamily& kern, double eps,
                                    const std::vector<Vec>& grid,
                                    const PairOptions& opts = {});

struct RateFitResult {
    std::vector<double> eps;
    std::vector<double> values;
    double slope = 0.0;
    int points_used = 0;
    bool saturated = false;
};

// d(eps) = |<rho(T_eps) - T, xi>| with the outer integral over supp omega on
// the same Gauss-Legendre grid as pairings; fits the log-log decay slope.
RateFitResult weak_convergence_test(const TensorDistribution& t, const TransportOperator& a,
                                    const KernelFamily& kern, const TestObject& xi,
                                    const std::vector<double>& eps_grid,
                                    const PairOptions& opts = {});

// sup_K |int (t . A(p,.) u(p))(q) Phi(eps,p)(q) dq - (t.u)(p)| for a smooth
// field t; the constant term is subtracted inside the quadrature so the
// noise floor scales with eps. Slope should be >= order + 1.
RateFitResult iota_vs_sigma(const TensorFieldFn& t, const TensorFieldFn& u,
                            const TransportOperator& a, const KernelFamily& kern,
                            const std::vector<Vec>& sample_grid,
                            const std::vector<double>& eps_grid,
                            const PairOptions& opts = {});

struct InjectivityResult {
    std::vector<double> eps;
    std::vector<double> values; // <rho(T_eps), xi>
    double limit = 0.0;         // value at the smallest eps
    double target = 0.0;        // <T, xi>
    bool nonzero_limit = false;
    bool converged = false;     // |limit - target| within tolerance
};

InjectivityResult injectivity_probe(const TensorDistribution& t, const TransportOperator& a,
                                    const KernelFamily& kern, const TestObject& xi,
                                    const std::vector<double>& eps_grid,
                                    const PairOptions& opts = {}, double tol = 1e-6);

// Constant dual-basis fields b^lambda (rank (s,r)) used to extract the
// components of (iota T)(omega)(p).
std::vector<TensorFieldFn> dual_basis_fields(int r, int s, int n);

} // namespace gtf
