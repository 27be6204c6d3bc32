#ifndef CPKIT_MATRIX_HPP
#define CPKIT_MATRIX_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cpkit/errors.hpp"

namespace cpkit {

// Dense row-major matrix of doubles. Column vectors are Mat{n,1}.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    std::size_t size() const { return v.size(); }
    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

    void fill(double x) { std::fill(v.begin(), v.end(), x); }

    bool operator==(const Mat& o) const = default;
};

using Vec = Mat; // n x 1

inline Vec make_vec(int n) { return Mat(n, 1); }

inline Vec make_vec(std::initializer_list<double> xs) {
    Mat m(static_cast<int>(xs.size()), 1);
    int i = 0;
    for (double x : xs) m[i++] = x;
    return m;
}

inline void check_shape(bool ok, const char* what) {
    if (!ok) throw ShapeError(what);
}

// y = A x
inline Vec matvec(const Mat& a, const Vec& x) {
    check_shape(a.cols == x.rows && x.cols == 1, "matvec: dimension mismatch");
    Vec y(a.rows, 1);
    const double* ap = a.v.data();
    for (int r = 0; r < a.rows; ++r) {
        double s = 0.0;
        const double* row = ap + static_cast<std::size_t>(r) * a.cols;
        for (int c = 0; c < a.cols; ++c) s += row[c] * x.v[c];
        y[r] = s;
    }
    return y;
}

// y += A x
inline void matvec_add(const Mat& a, const Vec& x, Vec& y) {
    check_shape(a.cols == x.rows && a.rows == y.rows, "matvec_add: dimension mismatch");
    for (int r = 0; r < a.rows; ++r) {
        double s = 0.0;
        const double* row = a.v.data() + static_cast<std::size_t>(r) * a.cols;
        for (int c = 0; c < a.cols; ++c) s += row[c] * x.v[c];
        y[r] += s;
    }
}

// y = A^T x  (accumulating variant)
inline void matvec_t_add(const Mat& a, const Vec& x, Vec& y) {
    check_shape(a.rows == x.rows && a.cols == y.rows, "matvec_t_add: dimension mismatch");
    for (int r = 0; r < a.rows; ++r) {
        const double xr = x.v[r];
        const double* row = a.v.data() + static_cast<std::size_t>(r) * a.cols;
        for (int c = 0; c < a.cols; ++c) y[c] += row[c] * xr;
    }
}

// A += u v^T
inline void outer_add(Mat& a, const Vec& u, const Vec& v) {
    check_shape(a.rows == u.rows && a.cols == v.rows, "outer_add: dimension mismatch");
    for (int r = 0; r < a.rows; ++r) {
        double* row = a.v.data() + static_cast<std::size_t>(r) * a.cols;
        const double ur = u.v[r];
        for (int c = 0; c < a.cols; ++c) row[c] += ur * v.v[c];
    }
}

inline void axpy(double alpha, const Mat& x, Mat& y) {
    check_shape(x.same_shape(y), "axpy: shape mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline double dot(const Vec& a, const Vec& b) {
    check_shape(a.rows == b.rows, "dot: length mismatch");
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i) s += a[i] * b[i];
    return s;
}

inline bool all_finite(const Mat& m) {
    for (double x : m.v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace cpkit

#endif
