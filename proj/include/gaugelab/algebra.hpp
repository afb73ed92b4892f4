/// su(2) arithmetic in the basis tau_i = -(i/2) sigma_i, its complexification,
/// and unit quaternions acting through the adjoint representation.
#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace gaugelab {

/// Element of su(2): c[0] tau_1 + c[1] tau_2 + c[2] tau_3.
struct Su2 {
    std::array<double, 3> c{0.0, 0.0, 0.0};

    constexpr Su2() = default;
    constexpr Su2(double a, double b, double d) : c{a, b, d} {}

    static constexpr Su2 basis(int i) {
        Su2 u;
        u.c[static_cast<std::size_t>(i)] = 1.0;
        return u;
    }

    constexpr double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    constexpr double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    constexpr Su2& operator+=(const Su2& o) {
        c[0] += o.c[0]; c[1] += o.c[1]; c[2] += o.c[2];
        return *this;
    }
    constexpr Su2& operator-=(const Su2& o) {
        c[0] -= o.c[0]; c[1] -= o.c[1]; c[2] -= o.c[2];
        return *this;
    }
    constexpr Su2& operator*=(double s) {
        c[0] *= s; c[1] *= s; c[2] *= s;
        return *this;
    }
    friend constexpr Su2 operator+(Su2 a, const Su2& b) { return a += b; }
    friend constexpr Su2 operator-(Su2 a, const Su2& b) { return a -= b; }
    friend constexpr Su2 operator-(Su2 a) { return a *= -1.0; }
    friend constexpr Su2 operator*(double s, Su2 a) { return a *= s; }
    friend constexpr Su2 operator*(Su2 a, double s) { return a *= s; }
    friend constexpr bool operator==(const Su2&, const Su2&) = default;
};

/// [u, v]; with [tau_i, tau_j] = eps_ijk tau_k this is the cross product.
constexpr Su2 bracket(const Su2& u, const Su2& v) {
    return {u.c[1] * v.c[2] - u.c[2] * v.c[1],
            u.c[2] * v.c[0] - u.c[0] * v.c[2],
            u.c[0] * v.c[1] - u.c[1] * v.c[0]};
}

/// -tr(uv) = (1/2) c(u).c(v).
constexpr double inner(const Su2& u, const Su2& v) {
    return 0.5 * (u.c[0] * v.c[0] + u.c[1] * v.c[1] + u.c[2] * v.c[2]);
}

constexpr double norm_sq(const Su2& u) { return inner(u, u); }

inline double norm(const Su2& u) { return std::sqrt(norm_sq(u)); }

/// Element re + i im of sl(2;C).
struct Su2C {
    Su2 re;
    Su2 im;

    constexpr Su2C() = default;
    constexpr Su2C(const Su2& r, const Su2& i) : re(r), im(i) {}
    constexpr explicit Su2C(const Su2& r) : re(r) {}

    constexpr Su2C& operator+=(const Su2C& o) { re += o.re; im += o.im; return *this; }
    constexpr Su2C& operator-=(const Su2C& o) { re -= o.re; im -= o.im; return *this; }
    constexpr Su2C& operator*=(double s) { re *= s; im *= s; return *this; }
    Su2C& operator*=(std::complex<double> z) {
        const Su2 r = z.real() * re - z.imag() * im;
        const Su2 i = z.imag() * re + z.real() * im;
        re = r;
        im = i;
        return *this;
    }
    friend constexpr Su2C operator+(Su2C a, const Su2C& b) { return a += b; }
    friend constexpr Su2C operator-(Su2C a, const Su2C& b) { return a -= b; }
    friend constexpr Su2C operator-(Su2C a) { return a *= -1.0; }
    friend constexpr Su2C operator*(double s, Su2C a) { return a *= s; }
    friend constexpr Su2C operator*(Su2C a, double s) { return a *= s; }
    friend Su2C operator*(std::complex<double> z, Su2C a) { return a *= z; }
    friend constexpr bool operator==(const Su2C&, const Su2C&) = default;
};

/// Complex-bilinear bracket.
constexpr Su2C bracket(const Su2C& u, const Su2C& v) {
    return {bracket(u.re, v.re) - bracket(u.im, v.im),
            bracket(u.re, v.im) + bracket(u.im, v.re)};
}

/// tr(uv), complex-bilinear; equals -inner(u, v) on real elements.
inline std::complex<double> complex_trace_pair(const Su2C& u, const Su2C& v) {
    return {-(inner(u.re, v.re) - inner(u.im, v.im)),
            -(inner(u.re, v.im) + inner(u.im, v.re))};
}

/// Real part of the Hermitian pairing, used for L2 norms of Su2C fields.
constexpr double inner(const Su2C& u, const Su2C& v) {
    return inner(u.re, v.re) + inner(u.im, v.im);
}

constexpr double inner(double a, double b) { return a * b; }

/// Unit quaternion w + x i + y j + z k representing an SU(2) element.
/// The adjoint action on su(2) coefficients is the rotation R(q).
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    friend constexpr Quat operator*(const Quat& a, const Quat& b) {
        return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
    }
    constexpr Quat conj() const { return {w, -x, -y, -z}; }
    double length() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quat normalized() const {
        const double s = 1.0 / length();
        return {w * s, x * s, y * s, z * s};
    }
};

/// Ad_q u = q u q^{-1}, realized as the rotation of the coefficient vector.
constexpr Su2 adjoint(const Quat& q, const Su2& u) {
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    const double r00 = 1 - 2 * (y * y + z * z), r01 = 2 * (x * y - w * z), r02 = 2 * (x * z + w * y);
    const double r10 = 2 * (x * y + w * z), r11 = 1 - 2 * (x * x + z * z), r12 = 2 * (y * z - w * x);
    const double r20 = 2 * (x * z - w * y), r21 = 2 * (y * z + w * x), r22 = 1 - 2 * (x * x + y * y);
    return {r00 * u.c[0] + r01 * u.c[1] + r02 * u.c[2],
            r10 * u.c[0] + r11 * u.c[1] + r12 * u.c[2],
            r20 * u.c[0] + r21 * u.c[1] + r22 * u.c[2]};
}

inline Su2C adjoint(const Quat& q, const Su2C& u) { return {adjoint(q, u.re), adjoint(q, u.im)}; }

/// Group exponential: exp(xi) for xi in su(2). Its adjoint is rotation by |c(xi)| about c(xi).
inline Quat exp_su2(const Su2& xi) {
    const double th = std::sqrt(xi.c[0] * xi.c[0] + xi.c[1] * xi.c[1] + xi.c[2] * xi.c[2]);
    const double half = 0.5 * th;
    const double s = th > 1e-300 ? std::sin(half) / th : 0.5;
    return {std::cos(half), s * xi.c[0], s * xi.c[1], s * xi.c[2]};
}

/// Principal logarithm with the w >= 0 representative of +-q; inverse of exp_su2 on |xi| <= pi.
inline Su2 log_su2(Quat q) {
    if (q.w < 0) q = {-q.w, -q.x, -q.y, -q.z};
    const double v = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    const double half = std::atan2(v, q.w);
    const double s = v > 1e-300 ? 2.0 * half / v : 2.0;
    return {s * q.x, s * q.y, s * q.z};
}

}  // namespace gaugelab
