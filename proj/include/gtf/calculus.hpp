#pragma once

#include "gtf/embedding.hpp"

namespace gtf {

// (mu^* R)(omega) = mu^*(R(mu_* omega)): evaluates R at the pushed-forward
// kernel family at mu(p), then pulls the tensor value back through T mu.
TensorValue pullback_generalized(const Diffeo& mu, const GeneralizedField& r,
                                 const KernelFamily& kern, double eps, const Vec& p);

// (L_X R) via Richardson-extrapolated central differences of the flow
// pullback (tau and tau/2).
TensorValue lie_generalized(const VectorField& x_field, const GeneralizedField& r,
                            const KernelFamily& kern, double eps, const Vec& p,
                            double tau = 1e-3);

struct CommutationReport {
    std::vector<double> eps;
    std::vector<double> residual;     // |D(eps)| = |iota(L_X T) - L_X(iota T)| . v
    std::vector<double> closed_form;  // <T, (L_{XxX}A)(p,.) v(p) (x) Phi(eps,p)>
    std::vector<double> rel_mismatch; // |D - closed| / max(|closed|, floor)
    double slope = 0.0;               // decay slope of |D|
    double final_residual = 0.0;
    double final_closed = 0.0;
    double final_mismatch = 0.0;

    enum class Verdict { Commutes, FailsWithFormulaMatch, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
};

struct CommutationThresholds {
    double decay_slope = 0.8;
    double closed_zero_tol = 1e-4;  // "commutes": closed form below this
    double nonzero_floor = 1e-3;    // "fails": residual limit above this
    double match_rel_tol = 5e-3;    // and closed form matched this tightly
};

// D(eps,p) = (iota(L_X T) - L_X(iota T)) . v at p, against the closed form
// <T, (L_{XxX}A)(p,.) v(p) (x) Phi(eps,p)> computed through lie_transport.
CommutationReport commutator_residual(const TensorDistribution& t,
                                      std::shared_ptr<const TransportOperator> a,
                                      const VectorField& x_field, const KernelFamily& kern,
                                      const TensorFieldFn& v, const Vec& p,
                                      const std::vector<double>& eps_grid,
                                      const PairOptions& opts = {},
                                      const CommutationThresholds& thresholds = {});

// Residual of iota_nabla - iota_nabla~ plus the first-order check: the
// directional derivative of q -> (A - A~)(p,q) v(p) at q = p equals
// (Gamma~ - Gamma)(Y, v)(p).
struct ConnectionMismatchReport {
    std::vector<double> eps;
    std::vector<double> residual; // |(iota_A - iota_A~)(T) . v|(p)
    double derivative_residual = 0.0;
    Vec fd_derivative;
    Vec formula_value;
};

ConnectionMismatchReport connection_mismatch_residual(
    const TensorDistribution& t, const TransportOperator& a, const TransportOperator& a_tilde,
    const VectorField& y_probe, const KernelFamily& kern, const TensorFieldFn& v,
    const Vec& p, const std::vector<double>& eps_grid, const PairOptions& opts = {});

// FD directional derivative of q -> (a - a~)(p, q) z at q = p along y.
Vec transport_difference_derivative(const TransportOperator& a,
                                    const TransportOperator& a_tilde, const Vec& p,
                                    const Vec& y, const Vec& z, double h = 1e-3);

// L_X(q -> A(p,q) Z(p))(p) by flow differences; equals -X'(p)Z - Gamma(p)(X, Z).
Vec lie_single_transport_fd(const TransportOperator& a, const VectorField& x_field,
                            const Vec& z, const Vec& p, double tau = 1e-3);
Vec first_order_formula(const ChartManifold& m, const VectorField& x_field, const Vec& z,
                        const Vec& x);

// Closed form of L_Y(q -> (L_{XxX}A)(p,q) Z(p))(p):
//   -X''YZ + X' Gamma(Y,Z) - (Gamma'.Y)(Y,Z) + Gamma(Y, Gamma(Y,Z))
//   - 1/2 [ (Gamma'.X)(Y,Z) - (Gamma'.Y)(X,Z)
//           + Gamma(X, Gamma(Y,Z)) + Gamma(Y, Gamma(X,Z)) ]
//   - Gamma(X'Y, Z) - Gamma(Y, X'Z)
// with all fields evaluated at x and Gamma' by the same central-difference
// stencil used elsewhere.
Vec second_order_formula(const ChartManifold& m, const VectorField& x_field,
                         const VectorField& y_field, const VectorField& z_field,
                         const Vec& x);

// The same quantity by double flow differences of lie_transport.
Vec second_order_double_fd(const TransportOperator& a, const VectorField& x_field,
                           const VectorField& y_field, const VectorField& z_field,
                           const Vec& x, double tau = 1e-3);

// Residual of iota(mu^* T) - mu^*(iota T) over the eps grid (max-norm of the
// tensor difference at p).
CommutationReport homothety_commutation(const Diffeo& mu, const TensorDistribution& t,
                                        std::shared_ptr<const TransportOperator> a,
                                        const KernelFamily& kern, const Vec& p,
                                        const std::vector<double>& eps_grid,
                                        const PairOptions& opts = {},
                                        const CommutationThresholds& thresholds = {});

} // namespace gtf
