#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

// Small fixed-size linear algebra used throughout: everything is 2x2, 4x4
// or a Kronecker product of the two, so closed forms beat a general library.

namespace heston {

using Vec2 = std::array<double, 2>;
using Vec4 = std::array<double, 4>;

struct Mat2 {
    // row-major
    double m[2][2]{};

    static Mat2 identity() { return Mat2{{{1.0, 0.0}, {0.0, 1.0}}}; }

    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

    Mat2 transpose() const { return Mat2{{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }

    // analytic inverse; throws on (numerically) singular input
    Mat2 inverse() const {
        const double d = det();
        if (d == 0.0 || !std::isfinite(d))
            throw std::domain_error("Mat2::inverse: singular matrix");
        const double id = 1.0 / d;
        return Mat2{{{m[1][1] * id, -m[0][1] * id}, {-m[1][0] * id, m[0][0] * id}}};
    }
};

inline Vec2 mul(const Mat2& A, const Vec2& x) {
    return {A.m[0][0] * x[0] + A.m[0][1] * x[1], A.m[1][0] * x[0] + A.m[1][1] * x[1]};
}

inline Mat2 mul(const Mat2& A, const Mat2& B) {
    Mat2 C;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            C.m[i][j] = A.m[i][0] * B.m[0][j] + A.m[i][1] * B.m[1][j];
    return C;
}

inline double dot(const Vec2& x, const Vec2& y) { return x[0] * y[0] + x[1] * y[1]; }
inline double dot(const Vec4& x, const Vec4& y) {
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3];
}

// x^T A y
inline double quad(const Vec2& x, const Mat2& A, const Vec2& y) { return dot(x, mul(A, y)); }

// lower-triangular Cholesky factor of a symmetric positive definite 2x2
inline Mat2 chol_lower(const Mat2& A, double tol = 0.0) {
    const double a = A.m[0][0];
    if (a <= tol) throw std::domain_error("chol_lower: matrix not positive definite");
    const double l11 = std::sqrt(a);
    const double l21 = A.m[1][0] / l11;
    const double rest = A.m[1][1] - l21 * l21;
    if (rest <= tol) throw std::domain_error("chol_lower: matrix not positive definite");
    return Mat2{{{l11, 0.0}, {l21, std::sqrt(rest)}}};
}

// eigenvalues of a symmetric 2x2, ascending
inline Vec2 sym_eigenvalues(const Mat2& A) {
    const double tr = A.m[0][0] + A.m[1][1];
    const double off = 0.5 * (A.m[0][1] + A.m[1][0]);
    const double d = 0.5 * (A.m[0][0] - A.m[1][1]);
    const double r = std::sqrt(d * d + off * off);
    return {0.5 * tr - r, 0.5 * tr + r};
}

struct Mat4 {
    double m[4][4]{};

    static Mat4 identity() {
        Mat4 I;
        for (int i = 0; i < 4; ++i) I.m[i][i] = 1.0;
        return I;
    }

    static Mat4 diag(const Vec4& d) {
        Mat4 D;
        for (int i = 0; i < 4; ++i) D.m[i][i] = d[i];
        return D;
    }

    Mat4 transpose() const {
        Mat4 T;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) T.m[i][j] = m[j][i];
        return T;
    }
};

inline Vec4 mul(const Mat4& A, const Vec4& x) {
    Vec4 y{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) y[i] += A.m[i][j] * x[j];
    return y;
}

inline Mat4 mul(const Mat4& A, const Mat4& B) {
    Mat4 C;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += A.m[i][k] * B.m[k][j];
            C.m[i][j] = s;
        }
    return C;
}

inline double quad(const Vec4& x, const Mat4& A, const Vec4& y) { return dot(x, mul(A, y)); }

// Kronecker product of two 2x2 blocks, (A o B)[2i+k][2j+l] = A[i][j] B[k][l]
inline Mat4 kron(const Mat2& A, const Mat2& B) {
    Mat4 K;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) K.m[2 * i + k][2 * j + l] = A.m[i][j] * B.m[k][l];
    return K;
}

inline double max_abs(const Mat4& A) {
    double v = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v = std::max(v, std::abs(A.m[i][j]));
    return v;
}

inline double max_sym_gap(const Mat4& A) {
    double v = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) v = std::max(v, std::abs(A.m[i][j] - A.m[j][i]));
    return v;
}

// smallest eigenvalue of a symmetric 4x4 by cyclic Jacobi sweeps
inline double sym_min_eigenvalue(const Mat4& A0, int sweeps = 24) {
    Mat4 A = A0;
    for (int s = 0; s < sweeps; ++s) {
        double off = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) off += A.m[p][q] * A.m[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) {
                const double apq = A.m[p][q];
                if (apq == 0.0) continue;
                const double theta = 0.5 * (A.m[q][q] - A.m[p][p]) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < 4; ++k) {
                    const double akp = A.m[k][p], akq = A.m[k][q];
                    A.m[k][p] = c * akp - sn * akq;
                    A.m[k][q] = sn * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    const double apk = A.m[p][k], aqk = A.m[q][k];
                    A.m[p][k] = c * apk - sn * aqk;
                    A.m[q][k] = sn * apk + c * aqk;
                }
            }
    }
    double mn = A.m[0][0];
    for (int i = 1; i < 4; ++i) mn = std::min(mn, A.m[i][i]);
    return mn;
}

// solve A x = b for generic 4x4 via Gaussian elimination with partial pivoting
inline Vec4 solve(const Mat4& A0, const Vec4& b0) {
    double a[4][5];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) a[i][j] = A0.m[i][j];
        a[i][4] = b0[i];
    }
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) throw std::domain_error("solve: singular matrix");
        if (piv != col)
            for (int j = col; j < 5; ++j) std::swap(a[piv][j], a[col][j]);
        for (int r = col + 1; r < 4; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int j = col; j < 5; ++j) a[r][j] -= f * a[col][j];
        }
    }
    Vec4 x{};
    for (int i = 3; i >= 0; --i) {
        double s = a[i][4];
        for (int j = i + 1; j < 4; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace heston
