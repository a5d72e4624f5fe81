#include "gtf/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace gtf {

Mat operator*(const Mat& a, const Mat& b) {
    Mat c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            double v = a(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) c(i, j) += v * b(k, j);
        }
    return c;
}

Mat operator+(const Mat& a, const Mat& b) {
    Mat c = a;
    for (size_t i = 0; i < c.a.size(); ++i) c.a[i] += b.a[i];
    return c;
}

Mat operator-(const Mat& a, const Mat& b) {
    Mat c = a;
    for (size_t i = 0; i < c.a.size(); ++i) c.a[i] -= b.a[i];
    return c;
}

Mat operator*(double s, const Mat& a) {
    Mat c = a;
    for (double& v : c.a) v *= s;
    return c;
}

Vec mat_vec(const Mat& a, const Vec& x) {
    Vec y(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

Mat inverse(const Mat& a) {
    if (a.rows != a.cols) throw NumericalError("inverse: matrix not square");
    int n = a.rows;
    Mat w = a;
    Mat inv = Mat::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(w(r, col)) > std::fabs(w(piv, col))) piv = r;
        if (std::fabs(w(piv, col)) < 1e-300)
            throw NumericalError("inverse: singular matrix");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(w(piv, j), w(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        double d = 1.0 / w(col, col);
        for (int j = 0; j < n; ++j) {
            w(col, j) *= d;
            inv(col, j) *= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = w(r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                w(r, j) -= f * w(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

double determinant(const Mat& a) {
    int n = a.rows;
    Mat w = a;
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(w(r, col)) > std::fabs(w(piv, col))) piv = r;
        if (w(piv, col) == 0.0) return 0.0;
        if (piv != col) {
            det = -det;
            for (int j = 0; j < n; ++j) std::swap(w(piv, j), w(col, j));
        }
        det *= w(col, col);
        for (int r = col + 1; r < n; ++r) {
            double f = w(r, col) / w(col, col);
            for (int j = col; j < n; ++j) w(r, j) -= f * w(col, j);
        }
    }
    return det;
}

Vec solve(const Mat& a, const Vec& b) {
    Mat inv = inverse(a);
    return mat_vec(inv, b);
}

Vec qr_solve(const Mat& a, const Vec& b) {
    // Straightforward normal-free least squares: apply reflectors to b.
    int rows = a.rows, cols = a.cols;
    Mat m = a;
    Vec rhs = b;
    for (int k = 0; k < cols; ++k) {
        double nrm = 0.0;
        for (int i = k; i < rows; ++i) nrm += m(i, k) * m(i, k);
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) throw NumericalError("qr_solve: rank deficient");
        double alpha = m(k, k) > 0 ? -nrm : nrm;
        Vec v(rows, 0.0);
        v[k] = m(k, k) - alpha;
        for (int i = k + 1; i < rows; ++i) v[i] = m(i, k);
        double vtv = 0.0;
        for (int i = k; i < rows; ++i) vtv += v[i] * v[i];
        if (vtv == 0.0) continue;
        for (int j = k; j < cols; ++j) {
            double s = 0.0;
            for (int i = k; i < rows; ++i) s += v[i] * m(i, j);
            s = 2.0 * s / vtv;
            for (int i = k; i < rows; ++i) m(i, j) -= s * v[i];
        }
        double s = 0.0;
        for (int i = k; i < rows; ++i) s += v[i] * rhs[i];
        s = 2.0 * s / vtv;
        for (int i = k; i < rows; ++i) rhs[i] -= s * v[i];
    }
    Vec x(cols, 0.0);
    for (int i = cols - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int j = i + 1; j < cols; ++j) s -= m(i, j) * x[j];
        if (std::fabs(m(i, i)) < 1e-300)
            throw NumericalError("qr_solve: rank deficient");
        x[i] = s / m(i, i);
    }
    return x;
}

MinNormSolution qr_min_norm(const Mat& a, const Vec& b) {
    // A x = b with A (r x c), r <= c. Factor A^T = Q R; then
    // x = Q R^{-T} b is the minimum-norm solution and the trailing columns
    // of Q span null(A).
    int r = a.rows, c = a.cols;
    Mat at = transpose(a); // c x r
    // Build Q explicitly (c x c) by accumulating reflectors.
    Mat m = at;
    Mat q = Mat::identity(c);
    for (int k = 0; k < r; ++k) {
        double nrm = 0.0;
        for (int i = k; i < c; ++i) nrm += m(i, k) * m(i, k);
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) throw NumericalError("qr_min_norm: rank deficient");
        double alpha = m(k, k) > 0 ? -nrm : nrm;
        Vec v(c, 0.0);
        v[k] = m(k, k) - alpha;
        for (int i = k + 1; i < c; ++i) v[i] = m(i, k);
        double vtv = 0.0;
        for (int i = k; i < c; ++i) vtv += v[i] * v[i];
        if (vtv == 0.0) continue;
        for (int j = k; j < r; ++j) {
            double s = 0.0;
            for (int i = k; i < c; ++i) s += v[i] * m(i, j);
            s = 2.0 * s / vtv;
            for (int i = k; i < c; ++i) m(i, j) -= s * v[i];
        }
        // q := q * H_k  (accumulate on the right so columns of q are Q's)
        for (int row = 0; row < c; ++row) {
            double s = 0.0;
            for (int i = k; i < c; ++i) s += q(row, i) * v[i];
            s = 2.0 * s / vtv;
            for (int i = k; i < c; ++i) q(row, i) -= s * v[i];
        }
    }
    // m's top r x r block now holds R (A^T = Q R).
    double dmax = 0.0, dmin = 1e300;
    for (int i = 0; i < r; ++i) {
        double d = std::fabs(m(i, i));
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    if (dmin == 0.0) throw NumericalError("qr_min_norm: rank deficient");
    // Solve R^T y = b (forward substitution), then x = Q_1 y.
    Vec y(r, 0.0);
    for (int i = 0; i < r; ++i) {
        double s = b[i];
        for (int j = 0; j < i; ++j) s -= m(j, i) * y[j];
        y[i] = s / m(i, i);
    }
    MinNormSolution out;
    out.x.assign(c, 0.0);
    for (int row = 0; row < c; ++row) {
        double s = 0.0;
        for (int j = 0; j < r; ++j) s += q(row, j) * y[j];
        out.x[row] = s;
    }
    for (int j = r; j < c; ++j) {
        Vec nb(c, 0.0);
        for (int row = 0; row < c; ++row) nb[row] = q(row, j);
        out.null_basis.push_back(nb);
    }
    out.condition = dmax / dmin;
    return out;
}

std::pair<double, double> symmetric_eigen_range(const Mat& a) {
    int n = a.rows;
    Mat w = a;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += w(i, j) * w(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(w(p, q)) < 1e-300) continue;
                double theta = (w(q, q) - w(p, p)) / (2.0 * w(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double wkp = w(k, p), wkq = w(k, q);
                    w(k, p) = c * wkp - s * wkq;
                    w(k, q) = s * wkp + c * wkq;
                }
                for (int k = 0; k < n; ++k) {
                    double wpk = w(p, k), wqk = w(q, k);
                    w(p, k) = c * wpk - s * wqk;
                    w(q, k) = s * wpk + c * wqk;
                }
            }
    }
    double lo = w(0, 0), hi = w(0, 0);
    for (int i = 1; i < n; ++i) {
        lo = std::min(lo, w(i, i));
        hi = std::max(hi, w(i, i));
    }
    return {lo, hi};
}

double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

Vec operator+(const Vec& x, const Vec& y) {
    Vec z = x;
    for (size_t i = 0; i < z.size(); ++i) z[i] += y[i];
    return z;
}

Vec operator-(const Vec& x, const Vec& y) {
    Vec z = x;
    for (size_t i = 0; i < z.size(); ++i) z[i] -= y[i];
    return z;
}

Vec operator*(double s, const Vec& x) {
    Vec z = x;
    for (double& v : z) v *= s;
    return z;
}

double max_abs(const Vec& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    return m;
}

double max_abs_diff(const Vec& x, const Vec& y) {
    double m = 0.0;
    for (size_t i = 0; i < x.size(); ++i) m = std::max(m, std::fabs(x[i] - y[i]));
    return m;
}

double max_abs_diff(const Mat& x, const Mat& y) {
    double m = 0.0;
    for (size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::fabs(x.a[i] - y.a[i]));
    return m;
}

} // namespace gtf
