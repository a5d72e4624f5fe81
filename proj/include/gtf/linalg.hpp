#pragma once

#include <cstddef>
#include <vector>

#include "gtf/errors.hpp"

namespace gtf {

using Vec = std::vector<double>;

// Dense row-major matrix, sized for the small systems that appear here
// (chart dimension <= 4, moment systems <= 14x14).
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

Mat operator*(const Mat& a, const Mat& b);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Vec mat_vec(const Mat& a, const Vec& x);
Mat transpose(const Mat& a);

// Gauss-Jordan inverse with partial pivoting. Throws NumericalError on a
// (numerically) singular input.
Mat inverse(const Mat& a);

double determinant(const Mat& a);

// Solves the square system a x = b with partial pivoting.
Vec solve(const Mat& a, const Vec& b);

// Householder QR least-squares solve of a x = b, rows >= cols.
Vec qr_solve(const Mat& a, const Vec& b);

// Minimum-norm solution of an underdetermined full-row-rank system
// a x = b (rows <= cols), via QR of the transpose. Also returns a basis of
// the null space of a in `null_basis` (one column per spare dimension) and a
// cheap condition estimate from the R diagonal.
struct MinNormSolution {
    Vec x;
    std::vector<Vec> null_basis;
    double condition;
};
MinNormSolution qr_min_norm(const Mat& a, const Vec& b);

// Symmetric eigenvalue range via Jacobi iteration (used for the
// positive-definiteness check of metrics). Returns {min, max} eigenvalue.
std::pair<double, double> symmetric_eigen_range(const Mat& a);

double dot(const Vec& x, const Vec& y);
double norm(const Vec& x);
Vec operator+(const Vec& x, const Vec& y);
Vec operator-(const Vec& x, const Vec& y);
Vec operator*(double s, const Vec& x);

double max_abs(const Vec& x);
double max_abs_diff(const Vec& x, const Vec& y);
double max_abs_diff(const Mat& x, const Mat& y);

} // namespace gtf
