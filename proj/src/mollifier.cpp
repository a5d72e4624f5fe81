#include "gtf/mollifier.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gtf {

double sphere_area(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

double RadialMollifier::bump_b(double s) const {
    if (s <= s1_) return 1.0;
    if (s >= s_max_) return 0.0;
    return 1.0 - smooth_step((s - s1_) / (s_max_ - s1_));
}

double RadialMollifier::ramp_h(double s) const {
    if (s <= s1_) return 0.0;
    if (s >= s2_) return 1.0;
    return smooth_step((s - s1_) / (s2_ - s1_));
}

double RadialMollifier::poly_q(double s) const {
    double t = s / s_max_;
    double acc = 0.0;
    for (int i = static_cast<int>(q_coeffs_.size()) - 1; i >= 0; --i)
        acc = acc * t + q_coeffs_[i];
    return acc;
}

double RadialMollifier::profile(double s) const {
    if (s < 0.0 || s >= s_max_) return 0.0;
    return bump_b(s) * (c0_ + ramp_h(s) * poly_q(s));
}

double RadialMollifier::bump_at_radius(double r) const {
    double ar = std::fabs(r);
    double s;
    if (n_ == 1) s = ar;
    else if (n_ == 2) s = ar * ar;
    else s = std::pow(ar, n_);
    return profile(s);
}

double RadialMollifier::bump(const Vec& z) const {
    double r2 = 0.0;
    for (double v : z) r2 += v * v;
    if (n_ == 2) return profile(r2);
    return bump_at_radius(std::sqrt(r2));
}

double RadialMollifier::moment(int j, int nodes) const {
    // s = sigma^n turns s^{j/n} phi_1(s) ds into n sigma^{j+n-1}
    // phi_1(sigma^n) d sigma, smooth on each piece.
    double b0 = std::pow(s1_, 1.0 / n_);
    double b1 = std::pow(s2_, 1.0 / n_);
    double b2 = std::pow(s_max_, 1.0 / n_);
    auto f = [&](double sigma) {
        return n_ * std::pow(sigma, j + n_ - 1) * profile(std::pow(sigma, n_));
    };
    double acc = 0.0;
    const double cuts[4] = {0.0, b0, b1, b2};
    for (int piece = 0; piece < 3; ++piece)
        acc += integrate_gl(f, cuts[piece], cuts[piece + 1], nodes);
    return acc;
}

double RadialMollifier::moment_residual(int j) const {
    double target = j == 0 ? n_ / sphere_area(n_) : 0.0;
    return moment(j) - target;
}

std::string RadialMollifier::export_text() const {
    std::ostringstream os;
    char buf[64];
    os << "mollifier " << n_ << " " << q_ << "\n";
    auto emit = [&](const char* tag, double v) {
        std::snprintf(buf, sizeof(buf), "%s %.17g\n", tag, v);
        os << buf;
    };
    emit("smax", s_max_);
    emit("break1", s1_);
    emit("break2", s2_);
    emit("c0", c0_);
    os << "coeffs";
    for (double c : q_coeffs_) {
        std::snprintf(buf, sizeof(buf), " %.17g", c);
        os << buf;
    }
    os << "\n";
    return os.str();
}

RadialMollifier RadialMollifier::import_text(const std::string& text) {
    std::istringstream is(text);
    std::string tag;
    RadialMollifier m;
    if (!(is >> tag >> m.n_ >> m.q_) || tag != "mollifier")
        throw ParseError("mollifier import: bad header", 1, 1);
    auto read_tagged = [&](const char* want, double& out) {
        std::string t;
        if (!(is >> t >> out) || t != want)
            throw ParseError(std::string("mollifier import: expected ") + want, 1, 1);
    };
    read_tagged("smax", m.s_max_);
    read_tagged("break1", m.s1_);
    read_tagged("break2", m.s2_);
    read_tagged("c0", m.c0_);
    if (!(is >> tag) || tag != "coeffs")
        throw ParseError("mollifier import: expected coeffs", 1, 1);
    m.q_coeffs_.resize(m.q_ + 1);
    for (double& c : m.q_coeffs_)
        if (!(is >> c)) throw ParseError("mollifier import: missing coefficient", 1, 1);
    m.r_phi_ = std::pow(m.s_max_, 1.0 / m.n_);
    return m;
}

RadialMollifier build_radial_mollifier(int n, int q, double s_max, uint64_t seed) {
    if (q > 12)
        throw NumericalError(
            "build_radial_mollifier: q > 12 is outside the conditioning bound");
    if (s_max <= 0.0) throw NumericalError("build_radial_mollifier: s_max must be > 0");

    RadialMollifier m;
    m.n_ = n;
    m.q_ = q;
    m.s_max_ = s_max;
    m.s1_ = s_max / 10.0;
    m.s2_ = s_max / 5.0;
    m.r_phi_ = std::pow(s_max, 1.0 / n);
    m.c0_ = 1.0;
    m.q_coeffs_.assign(q + 1, 0.0);

    // phi_1 = c0 * b + sum_i d_i * b h (s/s_max)^i; assemble the moments of
    // each basis field against s^{j/n}.
    auto column_moment = [&](int col, int j) {
        RadialMollifier probe = m;
        if (col == 0) {
            probe.c0_ = 1.0;
            probe.q_coeffs_.assign(q + 1, 0.0);
        } else {
            probe.c0_ = 0.0;
            probe.q_coeffs_.assign(q + 1, 0.0);
            probe.q_coeffs_[col - 1] = 1.0;
        }
        return probe.moment(j);
    };

    int unknowns = q + 2;
    Mat a(q + 1, unknowns);
    Vec rhs(q + 1, 0.0);
    rhs[0] = n / sphere_area(n);
    for (int j = 0; j <= q; ++j)
        for (int col = 0; col < unknowns; ++col) a(j, col) = column_moment(col, j);

    MinNormSolution sol = qr_min_norm(a, rhs);
    if (sol.condition > 1e12)
        throw NumericalError(
            "build_radial_mollifier: moment system condition exceeds 1e12; lower q");

    Vec x = sol.x;
    if (seed != 0 && !sol.null_basis.empty()) {
        Rng rng(seed);
        double scale = 0.5 * norm(x) / std::max(1e-12, norm(sol.null_basis[0]));
        x = x + (rng.uniform(-1.0, 1.0) * scale) * sol.null_basis[0];
    }
    m.c0_ = x[0];
    for (int i = 0; i <= q; ++i) m.q_coeffs_[i] = x[i + 1];

    double worst = 0.0;
    for (int j = 0; j <= q; ++j) worst = std::max(worst, std::fabs(m.moment_residual(j)));
    if (worst > 1e-12)
        throw NumericalError("build_radial_mollifier: moment residual " +
                             std::to_string(worst) + " exceeds 1e-12");
    return m;
}

double SmoothingKernel::density(double eps, const Vec& p, const Vec& q) const {
    int n = mollifier_.dim();
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale /= eps;
    Vec z(n);
    for (int i = 0; i < n; ++i) z[i] = (q[i] - p[i]) / eps;
    return scale * mollifier_.bump(z);
}

Box SmoothingKernel::support_box(double eps, const Vec& p) const {
    int n = mollifier_.dim();
    double r = support_radius(eps);
    Box b;
    b.lo.resize(n);
    b.hi.resize(n);
    for (int i = 0; i < n; ++i) {
        b.lo[i] = p[i] - r;
        b.hi[i] = p[i] + r;
    }
    return b;
}

double SmoothingKernel::mass(double eps, const Vec& p, int nodes_per_axis) const {
    return integrate_box([&](const Vec& q) { return density(eps, p, q); },
                         support_box(eps, p), nodes_per_axis);
}

double PulledBackKernel::density(double eps, const Vec& p, const Vec& q) const {
    double det = determinant(mu_.jacobian(q));
    return inner_.density(eps, mu_.apply(p), mu_.apply(q)) * std::fabs(det);
}

Box PulledBackKernel::support_box(double eps, const Vec& p) const {
    // Preimage of the inner support box, bounded by mapping a sample grid
    // through mu^{-1} and inflating slightly.
    Box inner_box = inner_.support_box(eps, mu_.apply(p));
    int n = dim();
    Vec lo(n, 1e300), hi(n, -1e300);
    const int samples = 5;
    std::vector<int> idx(n, 0);
    while (true) {
        Vec corner(n);
        for (int i = 0; i < n; ++i)
            corner[i] = inner_box.lo[i] +
                        (inner_box.hi[i] - inner_box.lo[i]) * idx[i] / (samples - 1);
        Vec pre = mu_.apply_inverse(corner);
        for (int i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], pre[i]);
            hi[i] = std::max(hi[i], pre[i]);
        }
        int axis = 0;
        while (axis < n && ++idx[axis] == samples) idx[axis++] = 0;
        if (axis == n) break;
    }
    Box out;
    out.lo.resize(n);
    out.hi.resize(n);
    for (int i = 0; i < n; ++i) {
        double margin = 0.1 * (hi[i] - lo[i]);
        out.lo[i] = lo[i] - margin;
        out.hi[i] = hi[i] + margin;
    }
    return out;
}

PulledBackKernel pullback_kernel(const Diffeo& mu, const KernelFamily& kernel) {
    return PulledBackKernel(mu, kernel);
}

double fit_loglog_slope(const std::vector<double>& eps, const std::vector<double>& values,
                        double floor, int* points_used) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (size_t i = 0; i < eps.size(); ++i) {
        if (values[i] <= floor) continue;
        double lx = std::log(eps[i]), ly = std::log(values[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (points_used) *points_used = count;
    if (count < 2) return 0.0;
    double denom = count * sxx - sx * sx;
    return (count * sxy - sx * sy) / denom;
}

OrderFitResult kernel_order_test(const SmoothingKernel& kernel, const Expr& f,
                                 const Vec& x, const std::vector<double>& eps_grid,
                                 int nodes_per_axis) {
    OrderFitResult res;
    res.eps = eps_grid;
    double fx = f->eval(x.data());
    double fscale = std::max(1.0, std::fabs(fx));
    for (double eps : eps_grid) {
        Box box = kernel.support_box(eps, x);
        if (!kernel.chart().domain().contains(box.lo) ||
            !kernel.chart().domain().contains(box.hi))
            throw ContractViolation("kernel_order_test: support leaves chart domain");
        // sum of (f(q) - f(x)) w(q): subtracting the value at x cancels the
        // unit-mass term exactly, so the quadrature floor scales with eps.
        double e = integrate_box(
            [&](const Vec& q) {
                return (f->eval(q.data()) - fx) * kernel.density(eps, x, q);
            },
            box, nodes_per_axis);
        res.error.push_back(std::fabs(e));
    }
    double floor = 1e-14 * fscale;
    res.slope = fit_loglog_slope(res.eps, res.error, floor, &res.points_used);
    if (res.points_used < 3) {
        res.saturated = true; // order at or beyond the measurable grid limit
        res.slope = 0.0;
    }
    return res;
}

GrowthProbeResult kernel_growth_probe(const SmoothingKernel& kernel, int m_order,
                                      int l_order, const std::vector<Vec>& sample_points,
                                      const std::vector<double>& eps_grid) {
    if (m_order + l_order > 4)
        throw ContractViolation("kernel_growth_probe: derivative order above 4");
    int n = kernel.dim();
    GrowthProbeResult res;
    res.eps = eps_grid;

    for (double eps : eps_grid) {
        double sup = 0.0;
        double h = 1e-3 * eps;
        for (const Vec& p : sample_points) {
            Box box = kernel.support_box(eps, p);
            const int g = 9;
            std::vector<int> idx(n, 0);
            while (true) {
                Vec q(n);
                for (int i = 0; i < n; ++i)
                    q[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / (g - 1);

                // Product central stencil: l joint (p,q) shifts followed by
                // m second-slot shifts, along coordinate axes.
                double acc = 0.0;
                int total_shifts = m_order + l_order;
                int combos = 1 << total_shifts;
                for (int c = 0; c < combos; ++c) {
                    Vec pp = p, qq = q;
                    double sign = 1.0;
                    for (int b = 0; b < total_shifts; ++b) {
                        int axis = b % n;
                        double s = h;
                        if (!((c >> b) & 1)) {
                            s = -h;
                            sign = -sign;
                        }
                        qq[axis] += s;
                        if (b < l_order) pp[axis] += s; // joint shift
                    }
                    acc += sign * kernel.density(eps, pp, qq);
                }
                double denom = std::pow(2.0 * h, total_shifts);
                sup = std::max(sup, std::fabs(acc / denom));

                int axis = 0;
                while (axis < n && ++idx[axis] == g) idx[axis++] = 0;
                if (axis == n) break;
            }
        }
        res.sup_values.push_back(sup);
    }

    // Combined derivatives of a translation-scale family cancel identically;
    // detect that against the eps^{-n} scale of the family itself.
    if (l_order > 0) {
        bool all_small = true;
        for (size_t i = 0; i < res.eps.size(); ++i)
            if (res.sup_values[i] > 1e-9 * std::pow(res.eps[i], -static_cast<double>(n)))
                all_small = false;
        if (all_small) {
            res.cancelled = true;
            res.exponent = n; // bounded by the family scale itself
            return res;
        }
    }
    double slope = fit_loglog_slope(res.eps, res.sup_values, 0.0, nullptr);
    res.exponent = -slope;
    return res;
}

} // namespace gtf
