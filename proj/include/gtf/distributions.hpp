#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gtf/geometry.hpp"
#include "gtf/tensor.hpp"

namespace gtf {

// Pointwise tensor field backed by a function (rank (r,s), components at
// each chart point).
struct TensorFieldFn {
    int r = 0, s = 0, n = 1;
    std::function<TensorValue(const Vec&)> eval;

    static TensorFieldFn constant(TensorValue v);
    static TensorFieldFn from_exprs(int r, int s, int n, std::vector<Expr> comps);
    static TensorFieldFn scalar(int n, std::function<double(const Vec&)> f);
};

// Compactly supported n-form coefficient.
struct FormDensity {
    std::function<double(const Vec&)> coeff;
    Box support;
};

// f times a C^6 plateau window subordinate to the box (rises over the outer
// 20% of each axis).
FormDensity windowed_form(std::function<double(const Vec&)> f, Box support);
FormDensity windowed_form_expr(const Expr& f, Box support);

// Test object u (x) omega for pairing with an (r,s)-distribution; u has the
// dual rank (s,r).
struct TestObject {
    TensorFieldFn u;
    FormDensity omega;
};

struct PairOptions {
    int nodes_per_axis = 24;
    int pv_nodes = 64;
    const Box* chart_domain = nullptr; // when set, supports must stay inside
};

// Desk-scale tensor distribution: regular field, delta, axis principal
// value P = delta x ... x sign t |t|^{n-2} x ... x delta (times a constant
// tensor), finite sums, plus lazily pulled-back and Lie-derived wrappers.
class TensorDistribution {
public:
    enum class Kind { Regular, DeltaAt, AxisPV, Sum, Pulled, LieDerived };

    static TensorDistribution regular(TensorFieldFn t);
    static TensorDistribution delta_at(Vec p0, TensorValue c);
    // P along axis k at x0 with cutoff eta; c fixes rank and direction
    // (scalar 1 by default).
    static TensorDistribution axis_pv(int axis, Vec x0, double eta,
                                      TensorValue c = TensorValue::scalar(1.0));
    static TensorDistribution sum(
        std::vector<std::pair<double, TensorDistribution>> terms);
    // mu^* T: pairs against pushed-forward test objects.
    static TensorDistribution pulled_back(std::shared_ptr<const Diffeo> mu,
                                          TensorDistribution inner);
    // L_X T, realized as <L_X T, xi> = -<T, L_X u (x) omega + u (x) L_X omega>.
    static TensorDistribution lie_derived(VectorField x_field, TensorDistribution inner,
                                          double tau = 1e-3);

    Kind kind() const { return kind_; }
    int rank_r() const { return r_; }
    int rank_s() const { return s_; }
    int dim() const { return n_; }

    const Vec& point() const { return p0_; }           // DeltaAt / AxisPV
    const TensorValue& coefficient() const { return c_; }
    int axis() const { return axis_; }
    double cutoff() const { return eta_; }
    const TensorFieldFn& field() const { return field_; }

    friend double pair(const TensorDistribution& t, const TestObject& xi,
                       const PairOptions& opts);

private:
    TensorDistribution() = default;
    Kind kind_ = Kind::Regular;
    int r_ = 0, s_ = 0, n_ = 1;

    TensorFieldFn field_;                       // Regular
    Vec p0_;                                    // DeltaAt, AxisPV
    TensorValue c_;                             // DeltaAt, AxisPV
    int axis_ = 0;                              // AxisPV
    double eta_ = 0.0;                          // AxisPV
    std::vector<std::pair<double, std::shared_ptr<TensorDistribution>>> terms_;
    std::shared_ptr<const Diffeo> mu_;          // Pulled
    std::shared_ptr<TensorDistribution> inner_; // Pulled, LieDerived
    VectorField lie_field_;                     // LieDerived
    double lie_tau_ = 1e-3;
};

double pair(const TensorDistribution& t, const TestObject& xi,
            const PairOptions& opts = {});

// <sign t |t|^{n-2}, omega> = int_0^eta t^{n-2} (omega(t) - omega(-t)) dt;
// the symmetrized integrand is regular at 0.
double pv_pair(const std::function<double(double)>& omega, int n, double eta,
               int nodes = 64);

// Classical Lie derivatives of test data by central differences of the flow
// pullback (one Richardson step).
TensorFieldFn lie_tensor_field(const VectorField& x_field, const TensorFieldFn& u,
                               double tau = 1e-3);
FormDensity lie_form_density(const VectorField& x_field, const FormDensity& omega,
                             double tau = 1e-3);

// Pushforwards along a diffeomorphism (used by distribution pullback).
TensorFieldFn pushforward_tensor_field(const Diffeo& mu, const TensorFieldFn& u);
FormDensity pushforward_form_density(const Diffeo& mu, const FormDensity& omega);

// Pullback of a pointwise tensor value along mu at p (value lives at mu(p)).
TensorValue tensor_value_pullback(const TensorValue& v, const Mat& dmu_at_p);

// ---------------------------------------------------------------------------
// Distribution-definition files
// ---------------------------------------------------------------------------
//
//   regular <r> <s> <expr>[, <expr>]*     # n^(r+s) component expressions
//   delta <r> <s> <point...> <components...>
//   axispv <k> <point...> <eta> [<r> <s> <components...>]
//   sum <w1> <ref1> [<w2> <ref2> ...]     # 1-based refs to earlier lines
//
// '#' comments; the last statement is the distribution the file defines.
TensorDistribution parse_distribution(const std::string& text, int dim);
TensorDistribution load_distribution(const std::string& path, int dim);

} // namespace gtf
