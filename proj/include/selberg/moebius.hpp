#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "selberg/error.hpp"

namespace selberg {

using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

class Point {
public:
    Point(double x, double y) : x_(x), y_(y)
    {
        if (!(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
            throw DomainError("moebius: point must lie in the upper half-plane (y > 0), got y = " +
                              std::to_string(y));
    }
    static Point from_complex(cplx z) { return Point(z.real(), z.imag()); }

    double x() const { return x_; }
    double y() const { return y_; }
    cplx z() const { return {x_, y_}; }

private:
    double x_, y_;
};

class GroupElement {
public:
    GroupElement() = default;

    GroupElement(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d)
    {
        normalize();
    }

    static GroupElement identity() { return {}; }

    // z -> e^l z
    static GroupElement boost(double l)
    {
        return {std::exp(l / 2), 0.0, 0.0, std::exp(-l / 2)};
    }

    // Rotation about i by angle phi.
    static GroupElement rotation(double phi)
    {
        const double c = std::cos(phi / 2), s = std::sin(phi / 2);
        return {c, s, -s, c};
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double d() const { return d_; }
    double trace() const { return a_ + d_; }
    double det() const { return a_ * d_ - b_ * c_; }

    GroupElement inverse() const { return raw(d_, -b_, -c_, a_); }
    GroupElement operator-() const { return raw(-a_, -b_, -c_, -d_); }

    // cosh d(i, g i)
    double cosh_displacement() const { return 0.5 * (a_ * a_ + b_ * b_ + c_ * c_ + d_ * d_); }

    friend GroupElement compose(const GroupElement& g1, const GroupElement& g2)
    {
        GroupElement r = raw(g1.a_ * g2.a_ + g1.b_ * g2.c_, g1.a_ * g2.b_ + g1.b_ * g2.d_,
                             g1.c_ * g2.a_ + g1.d_ * g2.c_, g1.c_ * g2.b_ + g1.d_ * g2.d_);
        r.normalize();
        return r;
    }
    friend GroupElement operator*(const GroupElement& g1, const GroupElement& g2)
    {
        return compose(g1, g2);
    }

    double max_abs_diff(const GroupElement& o) const
    {
        return std::max({std::abs(a_ - o.a_), std::abs(b_ - o.b_), std::abs(c_ - o.c_),
                         std::abs(d_ - o.d_)});
    }
    // Distance to o in PSL, i.e. min over the two lifts.
    double max_abs_diff_psl(const GroupElement& o) const
    {
        return std::min(max_abs_diff(o), max_abs_diff(-o));
    }

private:
    static GroupElement raw(double a, double b, double c, double d)
    {
        GroupElement g;
        g.a_ = a;
        g.b_ = b;
        g.c_ = c;
        g.d_ = d;
        return g;
    }

    // The determinant can only be resolved to about eps*(|ad|+|bc|); drift below that
    // level is rounding noise and rescaling would only add more of it.
    void normalize()
    {
        const double det = a_ * d_ - b_ * c_;
        const double scale = std::abs(a_ * d_) + std::abs(b_ * c_);
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * scale;
        const double err = std::abs(det - 1.0);
        if (!(err <= std::max(1e-6, 1e3 * noise)))
            throw DomainError("moebius: matrix is not in SL(2,R), det = " + std::to_string(det));
        if (err > 1e-13 && err > noise) {
            const double s = 1.0 / std::sqrt(det);
            a_ *= s;
            b_ *= s;
            c_ *= s;
            d_ *= s;
        }
    }

    double a_ = 1.0, b_ = 0.0, c_ = 0.0, d_ = 1.0;
};

inline Point moebius_act(const GroupElement& g, const Point& z)
{
    const cplx w = z.z();
    const cplx den = g.c() * w + g.d();
    const cplx num = g.a() * w + g.b();
    const double y = z.y() / std::norm(den);
    return Point((num / den).real(), y);
}

inline double cosh_distance(const Point& z1, const Point& z2)
{
    return 1.0 + std::norm(z1.z() - z2.z()) / (2.0 * z1.y() * z2.y());
}

inline double hyperbolic_distance(const Point& z1, const Point& z2)
{
    // asinh form keeps accuracy for nearby points
    const double r = std::abs(z1.z() - z2.z()) / (2.0 * std::sqrt(z1.y() * z2.y()));
    return 2.0 * std::asinh(r);
}

// sigma = (cosh d + 1)/2 = cosh^2(d/2)
inline double sigma_invariant(const Point& z1, const Point& z2)
{
    return 1.0 + std::norm(z1.z() - z2.z()) / (4.0 * z1.y() * z2.y());
}

enum class ElementClass { identity, elliptic, parabolic, hyperbolic };

inline std::string to_string(ElementClass c)
{
    switch (c) {
    case ElementClass::identity: return "identity";
    case ElementClass::elliptic: return "elliptic";
    case ElementClass::parabolic: return "parabolic";
    case ElementClass::hyperbolic: return "hyperbolic";
    }
    return "?";
}

struct Classification {
    ElementClass kind;
    std::optional<double> length;

    double require_length() const
    {
        if (!length)
            throw DomainError("moebius: length requested for a " + to_string(kind) + " element");
        return *length;
    }
};

inline Classification classify_and_length(const GroupElement& g)
{
    const double t = std::abs(g.trace());
    if (std::abs(t - 2.0) <= 1e-10) {
        const bool central = std::abs(g.b()) <= 1e-10 && std::abs(g.c()) <= 1e-10;
        return {central ? ElementClass::identity : ElementClass::parabolic, std::nullopt};
    }
    if (t < 2.0) return {ElementClass::elliptic, std::nullopt};
    return {ElementClass::hyperbolic, 2.0 * std::acosh(t / 2.0)};
}

inline double translation_length(const GroupElement& g)
{
    return classify_and_length(g).require_length();
}

struct Weight {
    int k = 1;
};

// j_g(z,k) = e^{i k arg(cz+d)}
inline cplx factor_j(const GroupElement& g, const Point& z, Weight w)
{
    const cplx den = g.c() * z.z() + g.d();
    return std::polar(1.0, w.k * std::arg(den));
}

inline Mat2c factor_J(const GroupElement& g, const Point& z, Weight w)
{
    Mat2c J = Mat2c::Zero();
    J(0, 0) = factor_j(g, z, w);
    J(1, 1) = factor_j(g, z, Weight{w.k - 2});
    return J;
}

struct PairMatrices {
    Mat2c A;
    Mat2c B;
};

// The literal diagonal matrices A(z', z), B(z', z) with principal half-powers.
inline PairMatrices pair_matrices(const Point& z1, const Point& z2)
{
    const cplx zp = z1.z(), z = z2.z();
    if (zp == z) throw DomainError("moebius: pair matrices need two distinct points");
    auto h = [](cplx v) { return std::sqrt(v); };
    PairMatrices m{Mat2c::Zero(), Mat2c::Zero()};
    m.A(0, 0) = h(z - std::conj(zp)) / h(zp - z);
    m.A(1, 1) = h(zp - std::conj(z)) / h(std::conj(z) - std::conj(zp));
    m.B(0, 0) = h(zp - z) / h(zp - std::conj(z));
    m.B(1, 1) = h(std::conj(z) - std::conj(zp)) / h(z - std::conj(zp));
    return m;
}

// Products A_ii B_jj entering K = -i A Phi B. The diagonal products are the principal
// roots of ((z - conj z')/(z' - conj z))^{+-1/2}; the off-diagonal ones use the root
// that is continuous in z' - z.
struct PairPhases {
    cplx d1, d2, o12, o21;
};

inline PairPhases pair_phases(const Point& z1, const Point& z2)
{
    const cplx zp = z1.z(), z = z2.z();
    const cplx w = zp - z;
    const double aw = std::abs(w);
    if (aw == 0.0) throw DomainError("moebius: pair matrices need two distinct points");
    const cplx u = z - std::conj(zp);
    const cplx d1 = -I * u / std::abs(u);
    const cplx o12 = I * std::conj(w) / aw;
    return {d1, std::conj(d1), o12, std::conj(o12)};
}

// A * M * B for a matrix M of point-pair values.
inline Mat2c sandwich(const PairPhases& p, const Mat2c& M)
{
    Mat2c r;
    r(0, 0) = p.d1 * M(0, 0);
    r(0, 1) = p.o12 * M(0, 1);
    r(1, 0) = p.o21 * M(1, 0);
    r(1, 1) = p.d2 * M(1, 1);
    return r;
}

}  // namespace selberg
