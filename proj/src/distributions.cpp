#include "gtf/distributions.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gtf/quadrature.hpp"

namespace gtf {

TensorFieldFn TensorFieldFn::constant(TensorValue v) {
    TensorFieldFn f;
    f.r = v.r;
    f.s = v.s;
    f.n = v.n;
    f.eval = [v](const Vec&) { return v; };
    return f;
}

TensorFieldFn TensorFieldFn::from_exprs(int r, int s, int n, std::vector<Expr> comps) {
    if (comps.size() != TensorValue::flat_size(r, s, n))
        throw ContractViolation("TensorFieldFn: wrong component count");
    TensorFieldFn f;
    f.r = r;
    f.s = s;
    f.n = n;
    f.eval = [r, s, n, comps](const Vec& x) {
        TensorValue v(r, s, n);
        for (size_t i = 0; i < comps.size(); ++i) v.comps[i] = comps[i]->eval(x.data());
        return v;
    };
    return f;
}

TensorFieldFn TensorFieldFn::scalar(int n, std::function<double(const Vec&)> f) {
    TensorFieldFn out;
    out.n = n;
    out.eval = [f](const Vec& x) { return TensorValue::scalar(f(x)); };
    return out;
}

namespace {

// C^6 window: 1 on the middle of [0,1], rising/falling over the outer 20%.
double plateau_window(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    double up = t / 0.2, down = (1.0 - t) / 0.2;
    double w = 1.0;
    if (up < 1.0) w *= smooth_step(up);
    if (down < 1.0) w *= smooth_step(down);
    return w;
}

} // namespace

FormDensity windowed_form(std::function<double(const Vec&)> f, Box support) {
    FormDensity d;
    d.support = support;
    d.coeff = [f, support](const Vec& q) {
        double w = 1.0;
        for (size_t i = 0; i < support.lo.size(); ++i) {
            double t = (q[i] - support.lo[i]) / (support.hi[i] - support.lo[i]);
            w *= plateau_window(t);
            if (w == 0.0) return 0.0;
        }
        return f(q) * w;
    };
    return d;
}

FormDensity windowed_form_expr(const Expr& f, Box support) {
    Expr e = f;
    return windowed_form([e](const Vec& q) { return e->eval(q.data()); },
                         std::move(support));
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

TensorDistribution TensorDistribution::regular(TensorFieldFn t) {
    TensorDistribution d;
    d.kind_ = Kind::Regular;
    d.r_ = t.r;
    d.s_ = t.s;
    d.n_ = t.n;
    d.field_ = std::move(t);
    return d;
}

TensorDistribution TensorDistribution::delta_at(Vec p0, TensorValue c) {
    TensorDistribution d;
    d.kind_ = Kind::DeltaAt;
    d.r_ = c.r;
    d.s_ = c.s;
    d.n_ = c.n;
    d.p0_ = std::move(p0);
    d.c_ = std::move(c);
    return d;
}

TensorDistribution TensorDistribution::axis_pv(int axis, Vec x0, double eta,
                                               TensorValue c) {
    if (axis < 0 || axis >= static_cast<int>(x0.size()))
        throw ContractViolation("axis_pv: axis out of range");
    TensorDistribution d;
    d.kind_ = Kind::AxisPV;
    d.c_ = c;
    d.c_.n = static_cast<int>(x0.size());
    d.r_ = c.r;
    d.s_ = c.s;
    d.n_ = static_cast<int>(x0.size());
    d.p0_ = std::move(x0);
    d.axis_ = axis;
    d.eta_ = eta;
    return d;
}

TensorDistribution TensorDistribution::sum(
    std::vector<std::pair<double, TensorDistribution>> terms) {
    if (terms.empty()) throw ContractViolation("sum: no terms");
    TensorDistribution d;
    d.kind_ = Kind::Sum;
    d.r_ = terms[0].second.r_;
    d.s_ = terms[0].second.s_;
    d.n_ = terms[0].second.n_;
    for (auto& t : terms) {
        if (t.second.r_ != d.r_ || t.second.s_ != d.s_)
            throw ContractViolation("sum: rank mismatch between terms");
        d.terms_.emplace_back(t.first,
                              std::make_shared<TensorDistribution>(std::move(t.second)));
    }
    return d;
}

TensorDistribution TensorDistribution::pulled_back(std::shared_ptr<const Diffeo> mu,
                                                   TensorDistribution inner) {
    TensorDistribution d;
    d.kind_ = Kind::Pulled;
    d.r_ = inner.r_;
    d.s_ = inner.s_;
    d.n_ = inner.n_;
    d.mu_ = std::move(mu);
    d.inner_ = std::make_shared<TensorDistribution>(std::move(inner));
    return d;
}

TensorDistribution TensorDistribution::lie_derived(VectorField x_field,
                                                   TensorDistribution inner, double tau) {
    TensorDistribution d;
    d.kind_ = Kind::LieDerived;
    d.r_ = inner.r_;
    d.s_ = inner.s_;
    d.n_ = inner.n_;
    d.lie_field_ = std::move(x_field);
    d.lie_tau_ = tau;
    d.inner_ = std::make_shared<TensorDistribution>(std::move(inner));
    return d;
}

// ---------------------------------------------------------------------------
// Lie derivatives and pushforwards of test data
// ---------------------------------------------------------------------------

TensorFieldFn lie_tensor_field(const VectorField& x_field, const TensorFieldFn& u,
                               double tau) {
    TensorFieldFn out = u;
    VectorField field = x_field;
    TensorFieldFn base = u;
    out.eval = [field, base, tau](const Vec& p) {
        auto pullback_at = [&](double t) {
            FlowJet jet = flow_with_jacobian(field, t, p);
            TensorValue v = base.eval(jet.x);
            return tensor_slot_transform(v, inverse(jet.jacobian),
                                         transpose(jet.jacobian))
                .comps;
        };
        auto d_at = [&](double t) {
            Vec plus = pullback_at(t), minus = pullback_at(-t);
            return (1.0 / (2.0 * t)) * (plus - minus);
        };
        Vec d1 = d_at(tau), d2 = d_at(0.5 * tau);
        TensorValue v(base.r, base.s, base.n);
        v.comps = (1.0 / 3.0) * (4.0 * d2 - d1);
        return v;
    };
    return out;
}

FormDensity lie_form_density(const VectorField& x_field, const FormDensity& omega,
                             double tau) {
    FormDensity out;
    VectorField field = x_field;
    FormDensity base = omega;
    // Flows move the support by at most |tau| sup|X|; pad conservatively.
    out.support = base.support;
    double pad = 0.0;
    {
        Vec mid(out.support.lo.size());
        for (size_t i = 0; i < mid.size(); ++i)
            mid[i] = 0.5 * (out.support.lo[i] + out.support.hi[i]);
        pad = 2.0 * tau * (1.0 + max_abs(field.eval(mid)));
    }
    for (size_t i = 0; i < out.support.lo.size(); ++i) {
        out.support.lo[i] -= pad;
        out.support.hi[i] += pad;
    }
    out.coeff = [field, base, tau](const Vec& p) {
        auto pullback_at = [&](double t) {
            FlowJet jet = flow_with_jacobian(field, t, p);
            return base.coeff(jet.x) * determinant(jet.jacobian);
        };
        auto d_at = [&](double t) { return (pullback_at(t) - pullback_at(-t)) / (2.0 * t); };
        double d1 = d_at(tau), d2 = d_at(0.5 * tau);
        return (4.0 * d2 - d1) / 3.0;
    };
    return out;
}

TensorValue tensor_value_pullback(const TensorValue& v, const Mat& dmu_at_p) {
    if (v.slots() == 0) return v;
    return tensor_slot_transform(v, inverse(dmu_at_p), transpose(dmu_at_p));
}

TensorFieldFn pushforward_tensor_field(const Diffeo& mu, const TensorFieldFn& u) {
    TensorFieldFn out = u;
    const Diffeo* m = &mu;
    TensorFieldFn base = u;
    out.eval = [m, base](const Vec& q) {
        Vec pre = m->apply_inverse(q);
        Mat j = m->jacobian(pre);
        TensorValue v = base.eval(pre);
        if (v.slots() == 0) return v;
        return tensor_slot_transform(v, j, transpose(inverse(j)));
    };
    return out;
}

FormDensity pushforward_form_density(const Diffeo& mu, const FormDensity& omega) {
    FormDensity out;
    const Diffeo* m = &mu;
    FormDensity base = omega;
    out.coeff = [m, base](const Vec& q) {
        Vec pre = m->apply_inverse(q);
        return base.coeff(pre) / std::fabs(determinant(m->jacobian(pre)));
    };
    // Image bounding box by sampling the old support.
    int n = static_cast<int>(omega.support.lo.size());
    Vec lo(n, 1e300), hi(n, -1e300);
    const int samples = 5;
    std::vector<int> idx(n, 0);
    while (true) {
        Vec corner(n);
        for (int i = 0; i < n; ++i)
            corner[i] = omega.support.lo[i] +
                        (omega.support.hi[i] - omega.support.lo[i]) * idx[i] / (samples - 1);
        Vec img = mu.apply(corner);
        for (int i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], img[i]);
            hi[i] = std::max(hi[i], img[i]);
        }
        int axis = 0;
        while (axis < n && ++idx[axis] == samples) idx[axis++] = 0;
        if (axis == n) break;
    }
    out.support.lo.resize(n);
    out.support.hi.resize(n);
    for (int i = 0; i < n; ++i) {
        double margin = 0.1 * (hi[i] - lo[i]) + 1e-12;
        out.support.lo[i] = lo[i] - margin;
        out.support.hi[i] = hi[i] + margin;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pairings
// ---------------------------------------------------------------------------

double pv_pair(const std::function<double(double)>& omega, int n, double eta,
               int nodes) {
    auto integrand = [&](double t) {
        return std::pow(t, n - 2) * (omega(t) - omega(-t));
    };
    if (n == 1) {
        // (omega(t) - omega(-t)) / t extends smoothly to 0.
        auto f = [&](double t) { return (omega(t) - omega(-t)) / t; };
        return integrate_gl(f, 0.0, eta, nodes);
    }
    if (n == 2) return integrate_gl([&](double t) { return omega(t) - omega(-t); }, 0.0,
                                    eta, nodes);
    return integrate_gl(integrand, 0.0, eta, nodes);
}

double pair(const TensorDistribution& t, const TestObject& xi, const PairOptions& opts) {
    if (xi.u.r != t.rank_s() || xi.u.s != t.rank_r())
        throw ContractViolation("pair: test object rank mismatch");
    if (opts.chart_domain) {
        if (!opts.chart_domain->contains(xi.omega.support.lo) ||
            !opts.chart_domain->contains(xi.omega.support.hi))
            throw ContractViolation("pair: test support exceeds chart domain");
    }

    switch (t.kind()) {
        case TensorDistribution::Kind::Regular: {
            TensorGrid grid = tensor_gauss_grid(xi.omega.support, opts.nodes_per_axis);
            double acc = 0.0;
            for (size_t i = 0; i < grid.points.size(); ++i) {
                const Vec& q = grid.points[i];
                double w = xi.omega.coeff(q);
                if (w == 0.0) continue;
                acc += grid.weights[i] * t.field().eval(q).contract_dual(xi.u.eval(q)) * w;
            }
            return acc;
        }
        case TensorDistribution::Kind::DeltaAt: {
            const Vec& p0 = t.point();
            if (!xi.omega.support.contains(p0)) return 0.0;
            return t.coefficient().contract_dual(xi.u.eval(p0)) * xi.omega.coeff(p0);
        }
        case TensorDistribution::Kind::AxisPV: {
            const Vec& x0 = t.point();
            int k = t.axis();
            // Integration bound: cutoff, clipped to the reach of the test
            // support along the axis slice.
            double reach_plus = xi.omega.support.hi[k] - x0[k];
            double reach_minus = x0[k] - xi.omega.support.lo[k];
            double bound = std::min(t.cutoff(), std::max(reach_plus, reach_minus));
            if (bound <= 0.0) return 0.0;
            TensorValue c = t.coefficient();
            auto g = [&](double tt) {
                Vec q = x0;
                q[k] += tt;
                if (!xi.omega.support.contains(q)) return 0.0;
                double w = xi.omega.coeff(q);
                if (w == 0.0) return 0.0;
                return c.contract_dual(xi.u.eval(q)) * w;
            };
            return pv_pair(g, t.dim(), bound, opts.pv_nodes);
        }
        case TensorDistribution::Kind::Sum: {
            double acc = 0.0;
            for (const auto& term : t.terms_)
                acc += term.first * pair(*term.second, xi, opts);
            return acc;
        }
        case TensorDistribution::Kind::Pulled: {
            TestObject pushed;
            pushed.u = pushforward_tensor_field(*t.mu_, xi.u);
            pushed.omega = pushforward_form_density(*t.mu_, xi.omega);
            PairOptions inner_opts = opts;
            inner_opts.chart_domain = nullptr; // the inner chart may differ
            return pair(*t.inner_, pushed, inner_opts);
        }
        case TensorDistribution::Kind::LieDerived: {
            TestObject a{lie_tensor_field(t.lie_field_, xi.u, t.lie_tau_), xi.omega};
            TestObject b{xi.u, lie_form_density(t.lie_field_, xi.omega, t.lie_tau_)};
            PairOptions inner_opts = opts;
            inner_opts.chart_domain = nullptr; // support was padded by the flow
            return -pair(*t.inner_, a, inner_opts) - pair(*t.inner_, b, inner_opts);
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Distribution files
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) {
            lines.push_back("");
            continue;
        }
        size_t b = line.find_last_not_of(" \t\r");
        lines.push_back(line.substr(a, b - a + 1));
    }
    return lines;
}

} // namespace

TensorDistribution parse_distribution(const std::string& text, int dim) {
    std::vector<TensorDistribution> defined;
    auto lines = split_lines(text);
    for (size_t li = 0; li < lines.size(); ++li) {
        const std::string& line = lines[li];
        if (line.empty()) continue;
        int lineno = static_cast<int>(li) + 1;
        std::istringstream is(line);
        std::string kw;
        is >> kw;
        if (kw == "regular") {
            int r, s;
            if (!(is >> r >> s)) throw ParseError("regular expects ranks r s", lineno, 1);
            std::string rest;
            std::getline(is, rest);
            std::vector<Expr> comps;
            std::string cell;
            std::istringstream cells(rest);
            while (std::getline(cells, cell, ','))
                comps.push_back(parse_expression(cell, dim, lineno));
            if (comps.size() != TensorValue::flat_size(r, s, dim))
                throw ParseError("regular: expected " +
                                     std::to_string(TensorValue::flat_size(r, s, dim)) +
                                     " component expressions",
                                 lineno, 1);
            defined.push_back(
                TensorDistribution::regular(TensorFieldFn::from_exprs(r, s, dim, comps)));
        } else if (kw == "delta") {
            int r, s;
            if (!(is >> r >> s)) throw ParseError("delta expects ranks r s", lineno, 1);
            Vec p0(dim);
            for (double& v : p0)
                if (!(is >> v)) throw ParseError("delta: missing point", lineno, 1);
            TensorValue c(r, s, dim);
            for (double& v : c.comps)
                if (!(is >> v)) throw ParseError("delta: missing components", lineno, 1);
            defined.push_back(TensorDistribution::delta_at(p0, c));
        } else if (kw == "axispv") {
            int k;
            if (!(is >> k)) throw ParseError("axispv expects axis", lineno, 1);
            Vec x0(dim);
            for (double& v : x0)
                if (!(is >> v)) throw ParseError("axispv: missing point", lineno, 1);
            double eta;
            if (!(is >> eta)) throw ParseError("axispv: missing eta", lineno, 1);
            int r = 0, s = 0;
            TensorValue c = TensorValue::scalar(1.0);
            if (is >> r >> s) {
                c = TensorValue(r, s, dim);
                for (double& v : c.comps)
                    if (!(is >> v))
                        throw ParseError("axispv: missing components", lineno, 1);
            }
            defined.push_back(TensorDistribution::axis_pv(k - 1, x0, eta, c));
        } else if (kw == "sum") {
            std::vector<std::pair<double, TensorDistribution>> terms;
            double w;
            int ref;
            while (is >> w >> ref) {
                if (ref < 1 || ref > static_cast<int>(defined.size()))
                    throw ParseError("sum: reference out of range", lineno, 1);
                terms.emplace_back(w, defined[ref - 1]);
            }
            if (terms.empty()) throw ParseError("sum: no terms", lineno, 1);
            defined.push_back(TensorDistribution::sum(std::move(terms)));
        } else {
            throw ParseError("unknown keyword '" + kw + "'", lineno, 1);
        }
    }
    if (defined.empty()) throw ParseError("empty distribution file", 1, 1);
    return defined.back();
}

TensorDistribution load_distribution(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open distribution file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_distribution(ss.str(), dim);
}

} // namespace gtf
