#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gtf/expr.hpp"
#include "gtf/linalg.hpp"
#include "gtf/quadrature.hpp"

namespace gtf {

// Christoffel symbols at a point, viewed as the bilinear map
// (Y, Z) -> Gamma(x)(Y, Z), components gamma[k][i][j].
struct Christoffel {
    int n = 0;
    std::vector<double> g;

    Christoffel() = default;
    explicit Christoffel(int dim) : n(dim), g(static_cast<size_t>(dim) * dim * dim, 0.0) {}

    double& at(int k, int i, int j) { return g[(static_cast<size_t>(k) * n + i) * n + j]; }
    double at(int k, int i, int j) const { return g[(static_cast<size_t>(k) * n + i) * n + j]; }

    Vec apply(const Vec& y, const Vec& z) const;
    void apply_raw(const double* y, const double* z, double* out) const;
};

using ChristoffelFn = std::function<void(const double* x, double* gamma)>;
using MetricFn = std::function<void(const double* x, double* g)>;

// Chart-local manifold: a dimension, an open box (the chart image), a
// Christoffel field and an optional metric. Immutable after construction.
class ChartManifold {
public:
    ChartManifold(int dim, Box domain, ChristoffelFn christoffel,
                  MetricFn metric = nullptr)
        : dim_(dim), domain_(std::move(domain)),
          christoffel_(std::move(christoffel)), metric_(std::move(metric)) {}

    int dim() const { return dim_; }
    const Box& domain() const { return domain_; }

    Christoffel christoffel(const Vec& x) const;
    void christoffel_raw(const double* x, double* gamma) const { christoffel_(x, gamma); }

    bool has_metric() const { return static_cast<bool>(metric_); }
    Mat metric(const Vec& x) const;
    double metric_dot(const Vec& x, const Vec& u, const Vec& v) const;

    // Builds the Levi-Civita Christoffel field from the metric by central
    // differences (step 1e-5 scaled by coordinate magnitude).
    static ChartManifold from_metric(int dim, Box domain, MetricFn metric);

private:
    int dim_;
    Box domain_;
    ChristoffelFn christoffel_;
    MetricFn metric_;
};

// Levi-Civita symbols Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
// with metric derivatives by central differences of step h. Throws
// NumericalError if g(x) is singular (condition above 1e12 or eigenvalue <= 0).
Christoffel christoffel_from_metric(const MetricFn& metric, int dim, const Vec& x,
                                    double h = 1e-5);

// d_m Gamma^k_ij by central differences; layout [((m*n+k)*n+i)*n+j].
std::vector<double> christoffel_derivative(const ChartManifold& m, const Vec& x,
                                           double h = 1e-4);

// A vector field on a chart. Expression-backed fields differentiate exactly
// when every component is polynomial and fall back to nested central
// differences (steps 1e-4 and 1e-3) otherwise.
class VectorField {
public:
    static VectorField from_exprs(std::vector<Expr> components, int dim);
    static VectorField constant(Vec c);
    static VectorField zero(int dim);
    static VectorField from_function(std::function<Vec(const Vec&)> f, int dim);

    int dim() const { return dim_; }
    Vec eval(const Vec& x) const;
    Mat jacobian(const Vec& x) const;
    // second[k][i][j] = d_i d_j X^k, contracted as X''(Y,Z).
    std::vector<double> second_derivative(const Vec& x) const;
    Vec second_apply(const Vec& x, const Vec& y, const Vec& z) const;

    bool exact_derivatives() const { return exact_; }

private:
    VectorField() = default;
    int dim_ = 0;
    std::function<Vec(const Vec&)> fn_;
    std::vector<Expr> exprs_;
    std::vector<std::vector<Expr>> djac_;   // [k][i] = d_i X^k
    std::vector<std::vector<Expr>> dsec_;   // [k][i*n+j]
    bool exact_ = false;
};

struct FlowOptions {
    double step = 1e-3;
    long max_steps = 2'000'000;
    const Box* domain = nullptr; // when set, integration aborts on exit
};

// Integrates the flow ODE da/dt = X(a), a(0) = x with fixed-step RK4.
Vec flow(const VectorField& x_field, double t, const Vec& x, const FlowOptions& opts = {});

// Flow together with its space derivative Da(t,x), via the variational
// equation dJ/dt = X'(a) J.
struct FlowJet {
    Vec x;
    Mat jacobian;
};
FlowJet flow_with_jacobian(const VectorField& x_field, double t, const Vec& x,
                           const FlowOptions& opts = {});

// Orientation-preserving diffeomorphism of a chart.
class Diffeo {
public:
    virtual ~Diffeo() = default;
    virtual Vec apply(const Vec& p) const = 0;
    virtual Vec apply_inverse(const Vec& p) const = 0;
    virtual Mat jacobian(const Vec& p) const = 0; // of the forward map
};

class ExprDiffeo : public Diffeo {
public:
    ExprDiffeo(std::vector<Expr> forward, std::vector<Expr> inverse, int dim);

    Vec apply(const Vec& p) const override;
    Vec apply_inverse(const Vec& p) const override;
    Mat jacobian(const Vec& p) const override;

    bool orientation_preserving(const std::vector<Vec>& samples) const;
    // Checks forward(inverse(p)) = p within 1e-9 on the samples.
    double roundtrip_residual(const std::vector<Vec>& samples) const;

private:
    int dim_;
    std::vector<Expr> fwd_, inv_;
    std::vector<std::vector<Expr>> jac_; // exact when polynomial
    bool exact_;
};

// Time-tau flow of a vector field as a diffeomorphism; jacobian comes from
// the variational equation.
class FlowDiffeo : public Diffeo {
public:
    FlowDiffeo(VectorField field, double tau, const Box* domain = nullptr)
        : field_(std::move(field)), tau_(tau), domain_(domain) {}

    Vec apply(const Vec& p) const override;
    Vec apply_inverse(const Vec& p) const override;
    Mat jacobian(const Vec& p) const override;

private:
    VectorField field_;
    double tau_;
    const Box* domain_;
};

class FuncDiffeo : public Diffeo {
public:
    FuncDiffeo(std::function<Vec(const Vec&)> fwd, std::function<Vec(const Vec&)> inv,
               std::function<Mat(const Vec&)> jac)
        : fwd_(std::move(fwd)), inv_(std::move(inv)), jac_(std::move(jac)) {}

    Vec apply(const Vec& p) const override { return fwd_(p); }
    Vec apply_inverse(const Vec& p) const override { return inv_(p); }
    Mat jacobian(const Vec& p) const override { return jac_(p); }

private:
    std::function<Vec(const Vec&)> fwd_, inv_;
    std::function<Mat(const Vec&)> jac_;
};

// (L_X g)_ij at x by central differences of the flow pullback; zero for
// Killing fields.
Mat metric_lie_derivative(const ChartManifold& m, const VectorField& x_field, const Vec& x,
                          double tau = 1e-4);
bool is_killing(const ChartManifold& m, const VectorField& x_field,
                const std::vector<Vec>& samples, double tol = 1e-5);

// ---------------------------------------------------------------------------
// Manifold-definition DSL
// ---------------------------------------------------------------------------
//
//   dim 2
//   domain -3 3 0.2 6
//   metric [[1/(y*y), 0], [0, 1/(y*y)]]
//   christoffel 1 1 2 -1/y      # k i j expr, unlisted entries are zero
//
// Statements are separated by newlines or ';', '#' starts a comment. A file
// provides either a metric (Christoffels derived via Levi-Civita) or explicit
// christoffel entries, not both.

struct ChristoffelEntry {
    int k, i, j;
    Expr expr;
};

struct ManifoldSource {
    int dim = 0;
    std::optional<Box> domain;
    std::vector<std::vector<Expr>> metric; // row-major, empty if none
    std::vector<ChristoffelEntry> christoffel;

    std::string to_text() const;
    ChartManifold build() const;
};

ManifoldSource parse_manifold_source(const std::string& text);
ChartManifold parse_manifold(const std::string& text);
ChartManifold load_manifold(const std::string& path);

} // namespace gtf
