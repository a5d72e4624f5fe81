#pragma once

#include <memory>
#include <string>

#include "gtf/expr.hpp"
#include "gtf/geometry.hpp"
#include "gtf/quadrature.hpp"
#include "gtf/random.hpp"

namespace gtf {

// Order-q vanishing-moment radial profile phi_1 on [0, infty):
//
//   phi_1(s) = b(s) (c0 + h(s) Q(s)),  Q a polynomial of degree q,
//
// where b is 1 on [0, s_max/10] and decays C^6-smoothly to 0 at s_max, and h
// rises C^6-smoothly from 0 to 1 on [s_max/10, s_max/5]. phi_1 is constant
// near 0 and satisfies
//
//   int_0^inf s^{j/n} phi_1(s) ds = n/omega_n  (j = 0),  0  (j = 1..q),
//
// with omega_n the area of the (n-1)-sphere. The induced bump on R^n is
// phi = phi_1(|.|^n), which has unit mass and vanishing moments of orders
// 1..q. Different `seed` values pick different solutions of the
// underdetermined moment system (min-norm plus a null-space component).
class RadialMollifier {
public:
    int dim() const { return n_; }
    int order() const { return q_; }
    double s_max() const { return s_max_; }
    double support_radius() const { return r_phi_; }
    double plateau_end() const { return s1_; }

    double profile(double s) const;       // phi_1(s)
    double bump(const Vec& z) const;      // phi(z) = phi_1(|z|^n)
    double bump_at_radius(double r) const;

    // Moment of the profile against s^{j/n}, evaluated pointwise with
    // composite Gauss-Legendre in the substituted variable s = sigma^n
    // (independent of the construction-time moment matrix).
    double moment(int j, int nodes = 64) const;
    double moment_residual(int j) const; // moment(j) - target(j)

    std::string export_text() const;
    static RadialMollifier import_text(const std::string& text);

    friend RadialMollifier build_radial_mollifier(int n, int q, double s_max,
                                                  uint64_t seed);

private:
    int n_ = 1, q_ = 0;
    double s_max_ = 1.0, s1_ = 0.1, s2_ = 0.2, r_phi_ = 1.0;
    double c0_ = 0.0;
    Vec q_coeffs_; // Q in the scaled variable s/s_max

    double bump_b(double s) const;
    double ramp_h(double s) const;
    double poly_q(double s) const;
};

// Solves the (q+1)-equation moment system by QR (minimum-norm). Throws
// NumericalError when the system is ill-conditioned (condition > 1e12) with a
// suggestion to lower q; requires q <= 12.
RadialMollifier build_radial_mollifier(int n, int q, double s_max = 1.0,
                                       uint64_t seed = 0);

double sphere_area(int n); // omega_n

// A family of compactly supported n-form coefficients omega(eps, p) on a
// chart. The translation-scale family below is the concrete construction;
// pulled-back families implement the same interface.
class KernelFamily {
public:
    virtual ~KernelFamily() = default;
    virtual int dim() const = 0;
    virtual double density(double eps, const Vec& p, const Vec& q) const = 0;
    virtual Box support_box(double eps, const Vec& p) const = 0;
    virtual int order() const { return -1; }
};

// eval(eps, x, y) = eps^{-n} phi((y - x)/eps); supp inside the ball of
// radius support_radius() * eps.
class SmoothingKernel : public KernelFamily {
public:
    SmoothingKernel(RadialMollifier mollifier, std::shared_ptr<const ChartManifold> chart)
        : mollifier_(std::move(mollifier)), chart_(std::move(chart)) {}

    int dim() const override { return mollifier_.dim(); }
    double density(double eps, const Vec& p, const Vec& q) const override;
    Box support_box(double eps, const Vec& p) const override;
    int order() const override { return mollifier_.order(); }

    double support_radius(double eps) const {
        return eps * mollifier_.support_radius();
    }
    const RadialMollifier& mollifier() const { return mollifier_; }
    const ChartManifold& chart() const { return *chart_; }

    // Total mass by tensor-product quadrature over the support box.
    double mass(double eps, const Vec& p, int nodes_per_axis = 24) const;

private:
    RadialMollifier mollifier_;
    std::shared_ptr<const ChartManifold> chart_;
};

// (mu^* Phi)(eps, p)(q) = Phi-density(eps, mu(p), mu(q)) |det D mu(q)|.
class PulledBackKernel : public KernelFamily {
public:
    PulledBackKernel(const Diffeo& mu, const KernelFamily& inner)
        : mu_(mu), inner_(inner) {}

    int dim() const override { return inner_.dim(); }
    double density(double eps, const Vec& p, const Vec& q) const override;
    Box support_box(double eps, const Vec& p) const override;
    int order() const override { return inner_.order(); }

private:
    const Diffeo& mu_;
    const KernelFamily& inner_;
};

PulledBackKernel pullback_kernel(const Diffeo& mu, const KernelFamily& kernel);

// Fitted convergence order of |f(x) - int f . eval(eps, x, .)| over the
// epsilon grid (least-squares slope in log-log).
struct OrderFitResult {
    std::vector<double> eps;
    std::vector<double> error;
    double slope = 0.0;
    int points_used = 0;
    bool saturated = false; // all errors at the quadrature noise floor
};

OrderFitResult kernel_order_test(const SmoothingKernel& kernel, const Expr& f,
                                 const Vec& x, const std::vector<double>& eps_grid,
                                 int nodes_per_axis = 24);

// Measured epsilon growth exponents of kernel derivatives: m derivatives in
// the second slot, l combined (first + second slot) derivatives. For the
// translation-scale family the combined derivative cancels exactly;
// `cancelled` reports that case.
struct GrowthProbeResult {
    double exponent = 0.0; // measured e in sup ~ eps^{-e}
    bool cancelled = false;
    std::vector<double> eps;
    std::vector<double> sup_values;
    bool passes(int n, int m) const { return cancelled || exponent <= n + m + 0.2; }
};

GrowthProbeResult kernel_growth_probe(const SmoothingKernel& kernel, int m_order,
                                      int l_order, const std::vector<Vec>& sample_points,
                                      const std::vector<double>& eps_grid);

// Least-squares slope of log(value) against log(eps), skipping values below
// `floor`. Returns the number of points used.
double fit_loglog_slope(const std::vector<double>& eps, const std::vector<double>& values,
                        double floor, int* points_used = nullptr);

} // namespace gtf
