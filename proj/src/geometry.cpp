#include "gtf/geometry.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gtf {

Vec Christoffel::apply(const Vec& y, const Vec& z) const {
    Vec out(n, 0.0);
    apply_raw(y.data(), z.data(), out.data());
    return out;
}

void Christoffel::apply_raw(const double* y, const double* z, double* out) const {
    const double* G = g.data();
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double yi = y[i];
            if (yi == 0.0) {
                G += n;
                continue;
            }
            double t = 0.0;
            for (int j = 0; j < n; ++j) t += G[j] * z[j];
            s += yi * t;
            G += n;
        }
        out[k] = s;
    }
}

Christoffel ChartManifold::christoffel(const Vec& x) const {
    Christoffel c(dim_);
    christoffel_(x.data(), c.g.data());
    return c;
}

Mat ChartManifold::metric(const Vec& x) const {
    if (!metric_) throw ContractViolation("manifold has no metric");
    Mat g(dim_, dim_);
    metric_(x.data(), g.a.data());
    return g;
}

double ChartManifold::metric_dot(const Vec& x, const Vec& u, const Vec& v) const {
    Mat g = metric(x);
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) s += g(i, j) * u[i] * v[j];
    return s;
}

Christoffel christoffel_from_metric(const MetricFn& metric, int dim, const Vec& x,
                                    double h) {
    int n = dim;
    Mat g0(n, n);
    metric(x.data(), g0.a.data());
    auto range = symmetric_eigen_range(g0);
    if (range.first <= 0.0 || range.second / range.first > 1e12)
        throw NumericalError("christoffel_from_metric: singular or ill-conditioned metric");
    Mat ginv = inverse(g0);

    // dg[l][i][j] = d_l g_ij, central differences scaled per coordinate.
    std::vector<double> dg(static_cast<size_t>(n) * n * n);
    Vec xp = x, xm = x;
    Mat gp(n, n), gm(n, n);
    for (int l = 0; l < n; ++l) {
        double hl = h * std::max(1.0, std::fabs(x[l]));
        xp[l] = x[l] + hl;
        xm[l] = x[l] - hl;
        metric(xp.data(), gp.a.data());
        metric(xm.data(), gm.a.data());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dg[(static_cast<size_t>(l) * n + i) * n + j] =
                    (gp(i, j) - gm(i, j)) / (2.0 * hl);
        xp[l] = x[l];
        xm[l] = x[l];
    }

    Christoffel c(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (dg[(static_cast<size_t>(i) * n + j) * n + l] +
                                       dg[(static_cast<size_t>(j) * n + i) * n + l] -
                                       dg[(static_cast<size_t>(l) * n + i) * n + j]);
                c.at(k, i, j) = 0.5 * s;
            }
    return c;
}

ChartManifold ChartManifold::from_metric(int dim, Box domain, MetricFn metric) {
    MetricFn m = metric;
    ChristoffelFn gamma = [m, dim](const double* x, double* out) {
        Vec xv(x, x + dim);
        Christoffel c = christoffel_from_metric(m, dim, xv);
        std::memcpy(out, c.g.data(), c.g.size() * sizeof(double));
    };
    return ChartManifold(dim, std::move(domain), std::move(gamma), std::move(metric));
}

std::vector<double> christoffel_derivative(const ChartManifold& m, const Vec& x,
                                           double h) {
    int n = m.dim();
    std::vector<double> out(static_cast<size_t>(n) * n * n * n);
    std::vector<double> gp(static_cast<size_t>(n) * n * n), gm(gp.size());
    Vec xs = x;
    for (int d = 0; d < n; ++d) {
        double hd = h * std::max(1.0, std::fabs(x[d]));
        xs[d] = x[d] + hd;
        m.christoffel_raw(xs.data(), gp.data());
        xs[d] = x[d] - hd;
        m.christoffel_raw(xs.data(), gm.data());
        xs[d] = x[d];
        for (size_t idx = 0; idx < gp.size(); ++idx)
            out[static_cast<size_t>(d) * gp.size() + idx] = (gp[idx] - gm[idx]) / (2.0 * hd);
    }
    return out;
}

// ---------------------------------------------------------------------------
// VectorField
// ---------------------------------------------------------------------------

VectorField VectorField::from_exprs(std::vector<Expr> components, int dim) {
    VectorField f;
    f.dim_ = dim;
    f.exprs_ = std::move(components);
    f.exact_ = true;
    for (const Expr& e : f.exprs_)
        if (!e->is_polynomial()) f.exact_ = false;
    if (f.exact_) {
        f.djac_.resize(dim);
        f.dsec_.resize(dim);
        for (int k = 0; k < dim; ++k) {
            f.djac_[k].resize(dim);
            f.dsec_[k].resize(static_cast<size_t>(dim) * dim);
            for (int i = 0; i < dim; ++i) {
                f.djac_[k][i] = f.exprs_[k]->derivative(i);
                for (int j = 0; j < dim; ++j)
                    f.dsec_[k][static_cast<size_t>(i) * dim + j] =
                        f.djac_[k][i]->derivative(j);
            }
        }
    }
    return f;
}

VectorField VectorField::constant(Vec c) {
    int dim = static_cast<int>(c.size());
    std::vector<Expr> comps(dim);
    for (int i = 0; i < dim; ++i) comps[i] = make_const(c[i]);
    return from_exprs(std::move(comps), dim);
}

VectorField VectorField::zero(int dim) { return constant(Vec(dim, 0.0)); }

VectorField VectorField::from_function(std::function<Vec(const Vec&)> f, int dim) {
    VectorField v;
    v.dim_ = dim;
    v.fn_ = std::move(f);
    v.exact_ = false;
    return v;
}

Vec VectorField::eval(const Vec& x) const {
    if (fn_) return fn_(x);
    Vec out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = exprs_[k]->eval(x.data());
    return out;
}

Mat VectorField::jacobian(const Vec& x) const {
    Mat j(dim_, dim_);
    if (exact_) {
        for (int k = 0; k < dim_; ++k)
            for (int i = 0; i < dim_; ++i) j(k, i) = djac_[k][i]->eval(x.data());
        return j;
    }
    const double h = 1e-4;
    Vec xp = x, xm = x;
    for (int i = 0; i < dim_; ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        Vec fp = eval(xp), fm = eval(xm);
        for (int k = 0; k < dim_; ++k) j(k, i) = (fp[k] - fm[k]) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return j;
}

std::vector<double> VectorField::second_derivative(const Vec& x) const {
    std::vector<double> s(static_cast<size_t>(dim_) * dim_ * dim_);
    if (exact_) {
        for (int k = 0; k < dim_; ++k)
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j)
                    s[(static_cast<size_t>(k) * dim_ + i) * dim_ + j] =
                        dsec_[k][static_cast<size_t>(i) * dim_ + j]->eval(x.data());
        return s;
    }
    const double h = 1e-3;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
            Vec a = x, b = x, c = x, d = x;
            a[i] += h; a[j] += h;
            b[i] += h; b[j] -= h;
            c[i] -= h; c[j] += h;
            d[i] -= h; d[j] -= h;
            Vec fa = eval(a), fb = eval(b), fc = eval(c), fd = eval(d);
            for (int k = 0; k < dim_; ++k) {
                double v = (fa[k] - fb[k] - fc[k] + fd[k]) / (4.0 * h * h);
                s[(static_cast<size_t>(k) * dim_ + i) * dim_ + j] = v;
                s[(static_cast<size_t>(k) * dim_ + j) * dim_ + i] = v;
            }
        }
    return s;
}

Vec VectorField::second_apply(const Vec& x, const Vec& y, const Vec& z) const {
    std::vector<double> s = second_derivative(x);
    Vec out(dim_, 0.0);
    for (int k = 0; k < dim_; ++k) {
        double acc = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                acc += s[(static_cast<size_t>(k) * dim_ + i) * dim_ + j] * y[i] * z[j];
        out[k] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Flows
// ---------------------------------------------------------------------------

Vec flow(const VectorField& x_field, double t, const Vec& x, const FlowOptions& opts) {
    int n = x_field.dim();
    Vec u = x;
    double remaining = std::fabs(t);
    double dir = t >= 0 ? 1.0 : -1.0;
    long steps = 0;
    Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
    while (remaining > 0.0) {
        double h = std::min(opts.step, remaining) * dir;
        k1 = x_field.eval(u);
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
        k2 = x_field.eval(tmp);
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
        k3 = x_field.eval(tmp);
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
        k4 = x_field.eval(tmp);
        for (int i = 0; i < n; ++i)
            u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        remaining -= std::fabs(h);
        ++steps;
        if (opts.domain && !opts.domain->contains(u))
            throw DomainExitError("flow left the chart domain",
                                  dir * (std::fabs(t) - remaining));
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(u[i])) throw NumericalError("flow: non-finite state");
        if (steps > opts.max_steps) throw NonConvergenceError("flow: step count exceeded");
    }
    return u;
}

FlowJet flow_with_jacobian(const VectorField& x_field, double t, const Vec& x,
                           const FlowOptions& opts) {
    int n = x_field.dim();
    // State (u, J) with dJ/dt = X'(u) J.
    Vec u = x;
    Mat jac = Mat::identity(n);
    double remaining = std::fabs(t);
    double dir = t >= 0 ? 1.0 : -1.0;
    long steps = 0;

    auto rhs = [&](const Vec& uu, const Mat& jj, Vec& du, Mat& dj) {
        du = x_field.eval(uu);
        Mat xp = x_field.jacobian(uu);
        dj = xp * jj;
    };

    Vec ku1(n), ku2(n), ku3(n), ku4(n);
    Mat kj1, kj2, kj3, kj4;
    while (remaining > 0.0) {
        double h = std::min(opts.step, remaining) * dir;
        Vec ut(n);
        Mat jt(n, n);
        rhs(u, jac, ku1, kj1);
        for (int i = 0; i < n; ++i) ut[i] = u[i] + 0.5 * h * ku1[i];
        jt = jac + (0.5 * h) * kj1;
        rhs(ut, jt, ku2, kj2);
        for (int i = 0; i < n; ++i) ut[i] = u[i] + 0.5 * h * ku2[i];
        jt = jac + (0.5 * h) * kj2;
        rhs(ut, jt, ku3, kj3);
        for (int i = 0; i < n; ++i) ut[i] = u[i] + h * ku3[i];
        jt = jac + h * kj3;
        rhs(ut, jt, ku4, kj4);
        for (int i = 0; i < n; ++i)
            u[i] += h / 6.0 * (ku1[i] + 2.0 * ku2[i] + 2.0 * ku3[i] + ku4[i]);
        jac = jac + (h / 6.0) * (kj1 + 2.0 * kj2 + 2.0 * kj3 + kj4);
        remaining -= std::fabs(h);
        ++steps;
        if (opts.domain && !opts.domain->contains(u))
            throw DomainExitError("flow left the chart domain",
                                  dir * (std::fabs(t) - remaining));
        if (steps > opts.max_steps) throw NonConvergenceError("flow: step count exceeded");
    }
    return {u, jac};
}

// ---------------------------------------------------------------------------
// Diffeos
// ---------------------------------------------------------------------------

ExprDiffeo::ExprDiffeo(std::vector<Expr> forward, std::vector<Expr> inverse, int dim)
    : dim_(dim), fwd_(std::move(forward)), inv_(std::move(inverse)) {
    exact_ = true;
    for (const Expr& e : fwd_)
        if (!e->is_polynomial()) exact_ = false;
    if (exact_) {
        jac_.resize(dim_);
        for (int k = 0; k < dim_; ++k) {
            jac_[k].resize(dim_);
            for (int i = 0; i < dim_; ++i) jac_[k][i] = fwd_[k]->derivative(i);
        }
    }
}

Vec ExprDiffeo::apply(const Vec& p) const {
    Vec out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = fwd_[k]->eval(p.data());
    return out;
}

Vec ExprDiffeo::apply_inverse(const Vec& p) const {
    Vec out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = inv_[k]->eval(p.data());
    return out;
}

Mat ExprDiffeo::jacobian(const Vec& p) const {
    Mat j(dim_, dim_);
    if (exact_) {
        for (int k = 0; k < dim_; ++k)
            for (int i = 0; i < dim_; ++i) j(k, i) = jac_[k][i]->eval(p.data());
        return j;
    }
    const double h = 1e-5;
    Vec pp = p, pm = p;
    for (int i = 0; i < dim_; ++i) {
        pp[i] = p[i] + h;
        pm[i] = p[i] - h;
        Vec fp = apply(pp), fm = apply(pm);
        for (int k = 0; k < dim_; ++k) j(k, i) = (fp[k] - fm[k]) / (2.0 * h);
        pp[i] = p[i];
        pm[i] = p[i];
    }
    return j;
}

bool ExprDiffeo::orientation_preserving(const std::vector<Vec>& samples) const {
    for (const Vec& p : samples)
        if (determinant(jacobian(p)) <= 0.0) return false;
    return true;
}

double ExprDiffeo::roundtrip_residual(const std::vector<Vec>& samples) const {
    double worst = 0.0;
    for (const Vec& p : samples) {
        Vec q = apply(apply_inverse(p));
        worst = std::max(worst, max_abs_diff(p, q));
    }
    return worst;
}

Vec FlowDiffeo::apply(const Vec& p) const {
    FlowOptions opts;
    opts.domain = domain_;
    return flow(field_, tau_, p, opts);
}

Vec FlowDiffeo::apply_inverse(const Vec& p) const {
    FlowOptions opts;
    opts.domain = domain_;
    return flow(field_, -tau_, p, opts);
}

Mat FlowDiffeo::jacobian(const Vec& p) const {
    FlowOptions opts;
    opts.domain = domain_;
    return flow_with_jacobian(field_, tau_, p, opts).jacobian;
}

Mat metric_lie_derivative(const ChartManifold& m, const VectorField& x_field, const Vec& x,
                          double tau) {
    int n = m.dim();
    // (Fl_t^* g)_ij(x) = g_kl(Fl_t x) J^k_i J^l_j, differentiated centrally.
    auto pullback = [&](double t) {
        FlowJet jet = flow_with_jacobian(x_field, t, x);
        Mat g = m.metric(jet.x);
        Mat out(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        s += g(k, l) * jet.jacobian(k, i) * jet.jacobian(l, j);
                out(i, j) = s;
            }
        return out;
    };
    Mat gp = pullback(tau), gm = pullback(-tau);
    return (1.0 / (2.0 * tau)) * (gp - gm);
}

bool is_killing(const ChartManifold& m, const VectorField& x_field,
                const std::vector<Vec>& samples, double tol) {
    for (const Vec& x : samples) {
        Mat lg = metric_lie_derivative(m, x_field, x);
        for (double v : lg.a)
            if (std::fabs(v) > tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Manifold DSL
// ---------------------------------------------------------------------------

namespace {

struct Statement {
    std::string text;
    int line;
};

std::vector<Statement> split_statements(const std::string& text) {
    std::vector<Statement> out;
    std::string current;
    int line = 1, start_line = 1;
    bool in_comment = false;
    auto push = [&]() {
        size_t a = current.find_first_not_of(" \t\r");
        if (a != std::string::npos) {
            size_t b = current.find_last_not_of(" \t\r");
            out.push_back({current.substr(a, b - a + 1), start_line});
        }
        current.clear();
        start_line = line;
    };
    for (char c : text) {
        if (c == '\n') {
            push();
            ++line;
            start_line = line;
            in_comment = false;
        } else if (in_comment) {
            continue;
        } else if (c == '#') {
            in_comment = true;
        } else if (c == ';') {
            push();
        } else {
            current += c;
        }
    }
    push();
    return out;
}

// Splits "[[a, b],[c, d]]" into rows of expression strings; tracks bracket
// depth so commas inside parentheses survive.
std::vector<std::vector<std::string>> split_matrix(const std::string& s, int line) {
    size_t pos = 0;
    auto skip = [&]() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    };
    auto expect = [&](char c) {
        skip();
        if (pos >= s.size() || s[pos] != c)
            throw ParseError(std::string("expected '") + c + "' in metric",
                             line, static_cast<int>(pos) + 1);
        ++pos;
    };
    std::vector<std::vector<std::string>> rows;
    expect('[');
    while (true) {
        expect('[');
        std::vector<std::string> row;
        std::string cell;
        int depth = 0;
        while (true) {
            if (pos >= s.size())
                throw ParseError("unclosed bracket in metric", line,
                                 static_cast<int>(pos) + 1);
            char c = s[pos];
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                row.push_back(cell);
                cell.clear();
                ++pos;
                continue;
            }
            if (c == ']' && depth == 0) {
                row.push_back(cell);
                ++pos;
                break;
            }
            cell += c;
            ++pos;
        }
        rows.push_back(std::move(row));
        skip();
        if (pos < s.size() && s[pos] == ',') {
            ++pos;
            continue;
        }
        break;
    }
    expect(']');
    skip();
    if (pos != s.size())
        throw ParseError("unexpected trailing input after metric", line,
                         static_cast<int>(pos) + 1);
    return rows;
}

} // namespace

ManifoldSource parse_manifold_source(const std::string& text) {
    ManifoldSource src;
    bool have_dim = false;
    for (const Statement& st : split_statements(text)) {
        std::istringstream is(st.text);
        std::string keyword;
        is >> keyword;
        if (keyword == "dim") {
            int d = 0;
            if (!(is >> d) || d < 1)
                throw ParseError("dim expects a positive integer", st.line, 1);
            src.dim = d;
            have_dim = true;
        } else if (keyword == "domain") {
            if (!have_dim) throw ParseError("domain before dim", st.line, 1);
            Box box;
            box.lo.resize(src.dim);
            box.hi.resize(src.dim);
            for (int i = 0; i < src.dim; ++i) {
                if (!(is >> box.lo[i] >> box.hi[i]))
                    throw ParseError("domain expects 2*dim numbers", st.line, 1);
                if (box.lo[i] >= box.hi[i])
                    throw ParseError("domain bounds must satisfy lo < hi", st.line, 1);
            }
            double extra;
            if (is >> extra)
                throw ParseError("domain expects exactly 2*dim numbers (dimension mismatch)",
                                 st.line, 1);
            src.domain = box;
        } else if (keyword == "metric") {
            if (!have_dim) throw ParseError("metric before dim", st.line, 1);
            if (!src.christoffel.empty())
                throw ParseError("manifold provides both metric and christoffel entries",
                                 st.line, 1);
            std::string rest = st.text.substr(st.text.find("metric") + 6);
            auto rows = split_matrix(rest, st.line);
            if (static_cast<int>(rows.size()) != src.dim)
                throw ParseError("metric row count does not match dim (dimension mismatch)",
                                 st.line, 1);
            src.metric.resize(src.dim);
            for (int i = 0; i < src.dim; ++i) {
                if (static_cast<int>(rows[i].size()) != src.dim)
                    throw ParseError("metric column count does not match dim (dimension mismatch)",
                                     st.line, 1);
                src.metric[i].resize(src.dim);
                for (int j = 0; j < src.dim; ++j)
                    src.metric[i][j] = parse_expression(rows[i][j], src.dim, st.line);
            }
        } else if (keyword == "christoffel") {
            if (!have_dim) throw ParseError("christoffel before dim", st.line, 1);
            if (!src.metric.empty())
                throw ParseError("manifold provides both metric and christoffel entries",
                                 st.line, 1);
            int k, i, j;
            if (!(is >> k >> i >> j))
                throw ParseError("christoffel expects indices k i j", st.line, 1);
            if (k < 1 || k > src.dim || i < 1 || i > src.dim || j < 1 || j > src.dim)
                throw ParseError("christoffel index out of range (dimension mismatch)",
                                 st.line, 1);
            std::string rest;
            std::getline(is, rest);
            src.christoffel.push_back(
                {k - 1, i - 1, j - 1, parse_expression(rest, src.dim, st.line)});
        } else {
            throw ParseError("unknown keyword '" + keyword + "'", st.line, 1);
        }
    }
    if (!have_dim) throw ParseError("missing dim statement", 1, 1);
    if (src.metric.empty() && src.christoffel.empty())
        throw ParseError("manifold needs a metric or christoffel entries", 1, 1);
    return src;
}

std::string ManifoldSource::to_text() const {
    std::ostringstream os;
    os << "dim " << dim << "\n";
    if (domain) {
        os << "domain";
        char buf[64];
        for (int i = 0; i < dim; ++i) {
            std::snprintf(buf, sizeof(buf), " %.17g %.17g", domain->lo[i], domain->hi[i]);
            os << buf;
        }
        os << "\n";
    }
    if (!metric.empty()) {
        os << "metric [";
        for (int i = 0; i < dim; ++i) {
            os << (i ? ",[" : "[");
            for (int j = 0; j < dim; ++j)
                os << (j ? "," : "") << metric[i][j]->pretty();
            os << "]";
        }
        os << "]\n";
    }
    for (const ChristoffelEntry& e : christoffel)
        os << "christoffel " << e.k + 1 << " " << e.i + 1 << " " << e.j + 1 << " "
           << e.expr->pretty() << "\n";
    return os.str();
}

ChartManifold ManifoldSource::build() const {
    int n = dim;
    Box box;
    if (domain) {
        box = *domain;
    } else {
        box.lo.assign(n, -1e8);
        box.hi.assign(n, 1e8);
    }

    if (!metric.empty()) {
        // Symmetry check at sampled interior points.
        Vec center(n);
        for (int i = 0; i < n; ++i) {
            double lo = std::max(box.lo[i], -1.0), hi = std::min(box.hi[i], 1.0);
            if (lo >= hi) {
                lo = box.lo[i];
                hi = box.hi[i];
            }
            center[i] = 0.5 * (lo + hi);
        }
        std::vector<Vec> samples = {center};
        for (int d = 0; d < n; ++d) {
            Vec p = center;
            p[d] += 0.25 * (box.hi[d] - center[d]);
            samples.push_back(p);
        }
        for (const Vec& p : samples)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    double gij = metric[i][j]->eval(p.data());
                    double gji = metric[j][i]->eval(p.data());
                    if (std::fabs(gij - gji) > 1e-12 * std::max(1.0, std::fabs(gij)))
                        throw Error("non-symmetric metric expression");
                }
        auto exprs = metric;
        MetricFn mf = [exprs, n](const double* x, double* g) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    g[static_cast<size_t>(i) * n + j] = exprs[i][j]->eval(x);
        };
        return ChartManifold::from_metric(n, box, std::move(mf));
    }

    auto entries = christoffel;
    ChristoffelFn gamma = [entries, n](const double* x, double* g) {
        std::memset(g, 0, static_cast<size_t>(n) * n * n * sizeof(double));
        for (const ChristoffelEntry& e : entries)
            g[(static_cast<size_t>(e.k) * n + e.i) * n + e.j] = e.expr->eval(x);
    };
    return ChartManifold(n, box, std::move(gamma));
}

ChartManifold parse_manifold(const std::string& text) {
    return parse_manifold_source(text).build();
}

ChartManifold load_manifold(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifold file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifold(ss.str());
}

} // namespace gtf
