#pragma once

#include <cmath>
#include <complex>

#include "weakprobe/errors.hpp"

namespace weakprobe {

using cplx = std::complex<double>;

struct Vec2 {
    cplx a{0.0}, b{0.0};

    double norm() const { return std::sqrt(std::norm(a) + std::norm(b)); }

    Vec2 normalized() const {
        double n = norm();
        return {a / n, b / n};
    }
};

inline cplx inner(const Vec2& x, const Vec2& y) {
    return std::conj(x.a) * y.a + std::conj(x.b) * y.b;
}

// 2x2 complex matrix, row-major.
struct Mat2 {
    cplx m00{0.0}, m01{0.0}, m10{0.0}, m11{0.0};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    // |x><y|
    static Mat2 outer(const Vec2& x, const Vec2& y) {
        return {x.a * std::conj(y.a), x.a * std::conj(y.b),
                x.b * std::conj(y.a), x.b * std::conj(y.b)};
    }

    static Mat2 diag(cplx d0, cplx d1) { return {d0, 0.0, 0.0, d1}; }

    Mat2 adjoint() const {
        return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
    }

    cplx trace() const { return m00 + m11; }
    cplx det() const { return m00 * m11 - m01 * m10; }

    double frobenius_norm() const {
        return std::sqrt(std::norm(m00) + std::norm(m01) + std::norm(m10) +
                         std::norm(m11));
    }

    Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }

    Vec2 operator*(const Vec2& v) const {
        return {m00 * v.a + m01 * v.b, m10 * v.a + m11 * v.b};
    }

    Mat2 operator*(cplx s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }
    Mat2 operator*(double s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }

    Mat2 operator+(const Mat2& o) const {
        return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11};
    }

    Mat2 operator-(const Mat2& o) const {
        return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11};
    }
};

// Eigen-decomposition of a Hermitian 2x2 matrix. Eigenvalues are real,
// eig_lo <= eig_hi; eigenvectors are orthonormal.
struct HermEig2 {
    double eig_hi, eig_lo;
    Vec2 vec_hi, vec_lo;
};

inline HermEig2 herm_eig(const Mat2& h) {
    const double a = h.m00.real();
    const double b = h.m11.real();
    const cplx c = h.m01;
    const double c2 = std::norm(c);
    const double half_tr = 0.5 * (a + b);
    const double disc = std::sqrt(0.25 * (a - b) * (a - b) + c2);
    HermEig2 e;
    e.eig_hi = half_tr + disc;
    e.eig_lo = half_tr - disc;
    if (c2 == 0.0 && a == b) {
        e.vec_hi = {1.0, 0.0};
        e.vec_lo = {0.0, 1.0};
        return e;
    }
    // Pick the column of (H - eig_lo*I) with the larger norm; it is
    // parallel to vec_hi and avoids cancellation near degeneracy.
    Vec2 col0{cplx(a - e.eig_lo, 0.0), std::conj(c)};
    Vec2 col1{c, cplx(b - e.eig_lo, 0.0)};
    e.vec_hi = (col0.norm() >= col1.norm()) ? col0.normalized() : col1.normalized();
    e.vec_lo = {-std::conj(e.vec_hi.b), std::conj(e.vec_hi.a)};
    return e;
}

// Singular value factorization M = W * diag(s_hi, s_lo) * V^dagger,
// with s_hi >= s_lo >= 0 and W, V unitary.
struct Svd2 {
    Mat2 w;
    double s_hi, s_lo;
    Mat2 v;
};

inline Svd2 svd2(const Mat2& m) {
    // Eigen-decompose M^dagger M for V and the squared singular values,
    // then recover W columns as M v_i / s_i.
    const Mat2 gram = m.adjoint() * m;
    const HermEig2 e = herm_eig(gram);
    Svd2 s;
    s.s_hi = std::sqrt(std::max(e.eig_hi, 0.0));
    s.s_lo = std::sqrt(std::max(e.eig_lo, 0.0));
    s.v = {e.vec_hi.a, e.vec_lo.a, e.vec_hi.b, e.vec_lo.b};

    const double tiny = 1e-300;
    Vec2 w_hi, w_lo;
    if (s.s_hi < tiny) {
        w_hi = {1.0, 0.0};
        w_lo = {0.0, 1.0};
    } else {
        Vec2 mv = m * e.vec_hi;
        w_hi = {mv.a / s.s_hi, mv.b / s.s_hi};
        w_hi = w_hi.normalized();
        if (s.s_lo / s.s_hi > 1e-15) {
            Vec2 mv2 = m * e.vec_lo;
            w_lo = {mv2.a / s.s_lo, mv2.b / s.s_lo};
            // Re-orthogonalize against w_hi, then normalize.
            cplx ov = inner(w_hi, w_lo);
            w_lo = {w_lo.a - ov * w_hi.a, w_lo.b - ov * w_hi.b};
            w_lo = w_lo.normalized();
        } else {
            // Rank-deficient: complete the unitary.
            w_lo = {-std::conj(w_hi.b), std::conj(w_hi.a)};
        }
    }
    s.w = {w_hi.a, w_lo.a, w_hi.b, w_lo.b};
    return s;
}

// Right polar form M = rotation * positive_part.
struct PolarFactors {
    Mat2 rotation;      // unitary
    Mat2 positive_part; // Hermitian PSD
};

inline PolarFactors polar_decompose(const Mat2& m) {
    const Svd2 s = svd2(m);
    if (s.s_hi < 1e-300) {
        throw NumericalError("polar_decompose: degenerate propagator (matrix ~ 0)");
    }
    PolarFactors pf;
    pf.rotation = s.w * s.v.adjoint();
    pf.positive_part = s.v * Mat2::diag(s.s_hi, s.s_lo) * s.v.adjoint();
    return pf;
}

} // namespace weakprobe
