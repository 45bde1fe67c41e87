#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "selberg/moebius.hpp"

namespace selberg {

using Vec2c = Eigen::Vector2cd;
using ScalarField = std::function<cplx(double, double)>;
using SpinorField = std::function<Vec2c(double, double)>;
using Field = std::variant<ScalarField, SpinorField>;

struct GridPatch {
    double x0 = -1.0, x1 = 1.0, y0 = 0.5, y1 = 2.0;
    double hx = 1e-3, hy = 1e-3;
    int order = 4;
    int samples = 25;  // assertion points per axis

    void validate() const
    {
        if (!(x1 > x0) || !(y1 > y0)) throw ConfigError("operators: empty patch");
        if (!(hx > 0.0) || !(hy > 0.0)) throw ConfigError("operators: stencil spacings must be positive");
        if (!(y0 - 2.0 * hy > 0.0)) throw ConfigError("operators: stencils must stay in the upper half-plane");
        if (order != 2 && order != 4 && order != 6 && order != 8)
            throw ConfigError("operators: stencil order must be 2, 4, 6 or 8");
        if (samples < 2) throw ConfigError("operators: at least two assertion points per axis");
        if (x1 - x0 <= 4.0 * margin_x() || y1 - y0 <= 4.0 * margin_y())
            throw ConfigError("operators: patch too small for its stencil margin");
    }

    // Interior margin: two stencil widths.
    double margin_x() const { return 2.0 * (order / 2) * hx; }
    double margin_y() const { return 2.0 * (order / 2) * hy; }

    std::vector<Point> check_points() const
    {
        validate();
        std::vector<Point> pts;
        const double ax = x0 + margin_x(), bx = x1 - margin_x();
        const double ay = y0 + margin_y(), by = y1 - margin_y();
        for (int i = 0; i < samples; ++i)
            for (int j = 0; j < samples; ++j)
                pts.emplace_back(ax + (bx - ax) * i / (samples - 1), ay + (by - ay) * j / (samples - 1));
        return pts;
    }

    bool interior(const Point& z) const
    {
        return z.x() >= x0 + margin_x() && z.x() <= x1 - margin_x() && z.y() >= y0 + margin_y() &&
               z.y() <= y1 - margin_y();
    }

    GridPatch refined() const
    {
        GridPatch p = *this;
        p.hx /= 2;
        p.hy /= 2;
        return p;
    }
};

namespace detail {

struct Stencil {
    std::vector<double> d1, d2;  // central weights for offsets -m..m
};

inline const Stencil& stencil(int order)
{
    static const Stencil s2{{-0.5, 0.0, 0.5}, {1.0, -2.0, 1.0}};
    static const Stencil s4{{1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
                            {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12}};
    static const Stencil s6{{-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60},
                            {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90}};
    static const Stencil s8{{1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280},
                            {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315,
                             -1.0 / 560}};
    return order == 2 ? s2 : order == 4 ? s4 : order == 6 ? s6 : s8;
}

// First and second partial derivatives of f (returning cplx or Vec2c) at (x, y).
template <class T, class F>
struct Partials {
    T f, fx, fy, fxx, fyy;
};

template <class T, class F>
Partials<T, F> partials(const F& f, double x, double y, const GridPatch& p, bool second)
{
    const Stencil& s = stencil(p.order);
    const int m = p.order / 2;
    Partials<T, F> out{f(x, y), T(), T(), T(), T()};
    out.fx = out.fy = out.fxx = out.fyy = out.f * 0.0;
    for (int i = -m; i <= m; ++i) {
        if (i == 0) {
            if (second) {
                out.fxx += s.d2[m] * out.f;
                out.fyy += s.d2[m] * out.f;
            }
            continue;
        }
        const T ax = f(x + i * p.hx, y), ay = f(x, y + i * p.hy);
        out.fx += s.d1[i + m] * ax;
        out.fy += s.d1[i + m] * ay;
        if (second) {
            out.fxx += s.d2[i + m] * ax;
            out.fyy += s.d2[i + m] * ay;
        }
    }
    out.fx /= p.hx;
    out.fy /= p.hy;
    out.fxx /= p.hx * p.hx;
    out.fyy /= p.hy * p.hy;
    return out;
}

}  // namespace detail

// K_k = iy d/dx + y d/dy + k/2
inline ScalarField maass_K(ScalarField f, int k, const GridPatch& p)
{
    return [f = std::move(f), k, p](double x, double y) {
        const auto d = detail::partials<cplx>(f, x, y, p, false);
        return I * y * d.fx + y * d.fy + 0.5 * k * d.f;
    };
}

// Lambda_k = iy d/dx - y d/dy + k/2
inline ScalarField maass_Lambda(ScalarField f, int k, const GridPatch& p)
{
    return [f = std::move(f), k, p](double x, double y) {
        const auto d = detail::partials<cplx>(f, x, y, p, false);
        return I * y * d.fx - y * d.fy + 0.5 * k * d.f;
    };
}

// Delta_k = y^2 (d^2/dx^2 + d^2/dy^2) - iky d/dx
inline ScalarField maass_laplacian(ScalarField f, int k, const GridPatch& p)
{
    return [f = std::move(f), k, p](double x, double y) {
        const auto d = detail::partials<cplx>(f, x, y, p, true);
        return y * y * (d.fxx + d.fyy) - I * double(k) * y * d.fx;
    };
}

// D_k = i (0, K_{k-2}; -Lambda_k, 0)
inline SpinorField dirac(SpinorField F, int k, const GridPatch& p)
{
    return [F = std::move(F), k, p](double x, double y) {
        const auto d = detail::partials<Vec2c>(F, x, y, p, false);
        const cplx K2 = I * y * d.fx(1) + y * d.fy(1) + 0.5 * (k - 2) * d.f(1);
        const cplx L1 = I * y * d.fx(0) - y * d.fy(0) + 0.5 * k * d.f(0);
        return Vec2c(I * K2, -I * L1);
    };
}

enum class OperatorKind { K, Lambda, Laplacian, Dirac };

struct Operator {
    OperatorKind kind;
    int k;
};

inline Field apply_operator(const Field& f, Operator op, const GridPatch& p)
{
    p.validate();
    const bool spinor = std::holds_alternative<SpinorField>(f);
    if (spinor != (op.kind == OperatorKind::Dirac))
        throw ContractError(spinor ? "operators: Maass operators act on scalar fields"
                                   : "operators: the Dirac operator acts on spinor fields");
    switch (op.kind) {
    case OperatorKind::K: return maass_K(std::get<ScalarField>(f), op.k, p);
    case OperatorKind::Lambda: return maass_Lambda(std::get<ScalarField>(f), op.k, p);
    case OperatorKind::Laplacian: return maass_laplacian(std::get<ScalarField>(f), op.k, p);
    case OperatorKind::Dirac: return dirac(std::get<SpinorField>(f), op.k, p);
    }
    return f;
}

inline ScalarField component(const SpinorField& F, int i)
{
    return [F, i](double x, double y) { return F(x, y)(i); };
}

inline SpinorField spinor(ScalarField a, ScalarField b)
{
    return [a = std::move(a), b = std::move(b)](double x, double y) { return Vec2c(a(x, y), b(x, y)); };
}

inline double max_residual(const SpinorField& a, const SpinorField& b, const std::vector<Point>& pts)
{
    double r = 0.0;
    for (const auto& z : pts) r = std::max(r, (a(z.x(), z.y()) - b(z.x(), z.y())).cwiseAbs().maxCoeff());
    return r;
}

inline double max_residual(const ScalarField& a, const ScalarField& b, const std::vector<Point>& pts)
{
    double r = 0.0;
    for (const auto& z : pts) r = std::max(r, std::abs(a(z.x(), z.y()) - b(z.x(), z.y())));
    return r;
}

// Anti-linear time reversal T = i sigma_2 C: (psi1, psi2) -> (conj psi2, -conj psi1).
inline SpinorField time_reversal(SpinorField F)
{
    return [F = std::move(F)](double x, double y) {
        const Vec2c v = F(x, y);
        return Vec2c(std::conj(v(1)), -std::conj(v(0)));
    };
}

inline ScalarField conjugate(ScalarField f)
{
    return [f = std::move(f)](double x, double y) { return std::conj(f(x, y)); };
}

// ---- analytic families ----

// y^s e^{i w x} times a smooth bump centred at (xc, 1).
inline ScalarField analytic_family(cplx s, double w, double xc = 0.0, double width = 0.7)
{
    return [=](double x, double y) {
        const double ly = std::log(y);
        return std::exp(s * ly + I * w * x) * std::exp(-((x - xc) * (x - xc) + ly * ly) / (width * width));
    };
}

inline SpinorField analytic_spinor_family(cplx s1 = {1.5, 0.0}, double w1 = 2.0, cplx s2 = {0.5, 1.0},
                                          double w2 = -1.0)
{
    return spinor(analytic_family(s1, w1, 0.1), analytic_family(s2, w2, -0.2, 0.8));
}

// s with s(1 - s) = lambda, Re s >= 1/2.
inline cplx s_for_eigenvalue(double lambda) { return 0.5 + std::sqrt(cplx(0.25 - lambda)); }

// Eigenfunction of -Delta_k with eigenvalue s(1 - s): Im(gz)^s / j_g(z, k).
inline ScalarField planted_maass(int k, cplx s, const GroupElement& g = GroupElement::identity())
{
    return [=](double x, double y) {
        const Point z(x, y);
        const Point gz = moebius_act(g, z);
        return std::pow(gz.y(), s) / factor_j(g, z, Weight{k});
    };
}

// ---- identity checks ----

inline double square_identity_check(const SpinorField& F, int k, const GridPatch& p)
{
    const double c = 0.5 * k * (1.0 - 0.5 * k);
    const SpinorField lhs = dirac(dirac(F, k, p), k, p);
    const ScalarField r1 = maass_laplacian(component(F, 0), k, p);
    const ScalarField r2 = maass_laplacian(component(F, 1), k - 2, p);
    const SpinorField rhs = [&](double x, double y) {
        const Vec2c f = F(x, y);
        return Vec2c(-r1(x, y) - c * f(0), -r2(x, y) - c * f(1));
    };
    return max_residual(lhs, rhs, p.check_points());
}

// (D_k F)(gz) against J_g(z,k) D_k [J_g^{-1}(., k) F(g .)](z) on points z with z and gz interior.
inline double transformation_check(const SpinorField& F, const GroupElement& g, int k, const GridPatch& p)
{
    const SpinorField DF = dirac(F, k, p);
    const SpinorField pulled = [&](double x, double y) {
        const Point z(x, y);
        const Point gz = moebius_act(g, z);
        const Vec2c v = F(gz.x(), gz.y());
        return Vec2c(v(0) / factor_j(g, z, Weight{k}), v(1) / factor_j(g, z, Weight{k - 2}));
    };
    const SpinorField D_pulled = dirac(pulled, k, p);
    double r = 0.0;
    std::size_t used = 0;
    for (const auto& z : p.check_points()) {
        const Point gz = moebius_act(g, z);
        if (!p.interior(gz)) continue;
        ++used;
        const Vec2c a = DF(gz.x(), gz.y());
        const Vec2c b = D_pulled(z.x(), z.y());
        const Vec2c rhs(factor_j(g, z, Weight{k}) * b(0), factor_j(g, z, Weight{k - 2}) * b(1));
        r = std::max(r, (a - rhs).cwiseAbs().maxCoeff());
    }
    if (used == 0) throw ContractError("operators: no assertion point of the patch is mapped into the patch");
    return r;
}

// D_k(g5 F) + g5 D_k F with g5 = diag(1, -1); `shift` adds shift * Id to D_k as a control.
inline double chiral_check(const SpinorField& F, int k, const GridPatch& p, double shift = 0.0)
{
    const SpinorField g5F = [&](double x, double y) {
        const Vec2c v = F(x, y);
        return Vec2c(v(0), -v(1));
    };
    const SpinorField a = dirac(g5F, k, p), b = dirac(F, k, p);
    const SpinorField sum = [&](double x, double y) {
        const Vec2c u = a(x, y) + shift * g5F(x, y), v = b(x, y) + shift * F(x, y);
        return Vec2c(u(0) + v(0), u(1) - v(1));
    };
    const SpinorField zero = [](double, double) { return Vec2c::Zero().eval(); };
    return max_residual(sum, zero, p.check_points());
}

// T D_k F - D_{2-k} T F
inline double time_reversal_check(const SpinorField& F, int k, const GridPatch& p)
{
    return max_residual(time_reversal(dirac(F, k, p)), dirac(time_reversal(F), 2 - k, p), p.check_points());
}

struct LadderResiduals {
    double forward = 0.0;    // (D_k + rho) Psi for Psi = (rho psi, i Lambda_k psi)
    double roundtrip = 0.0;  // (-Delta_k - lambda) psi_1 / rho
    double ladder = 0.0;     // (D_{k+2} + rho') A_k^dagger Psi
};

inline double rho_prime(double rho, int k)
{
    const double r2 = rho * rho + k;
    if (r2 < 0.0) throw DomainError("operators: rho^2 + k must be non-negative");
    return std::copysign(std::sqrt(r2), rho);
}

// A_k^dagger = (rho' K_k, 0; i k, rho K_{k-2})
inline SpinorField raise_spinor(SpinorField F, int k, double rho, const GridPatch& p)
{
    const double rp = rho_prime(rho, k);
    return [F = std::move(F), k, rho, rp, p](double x, double y) {
        const auto d = detail::partials<Vec2c>(F, x, y, p, false);
        const cplx K1 = I * y * d.fx(0) + y * d.fy(0) + 0.5 * k * d.f(0);
        const cplx K2 = I * y * d.fx(1) + y * d.fy(1) + 0.5 * (k - 2) * d.f(1);
        return Vec2c(rp * K1, I * double(k) * d.f(0) + rho * K2);
    };
}

// A_{k+2} = -(rho' Lambda_{k+2}, i k; 0, rho Lambda_k), acting on weight k + 2.
inline SpinorField lower_spinor(SpinorField F, int k, double rho, const GridPatch& p)
{
    const double rp = rho_prime(rho, k);
    return [F = std::move(F), k, rho, rp, p](double x, double y) {
        const auto d = detail::partials<Vec2c>(F, x, y, p, false);
        const cplx L1 = I * y * d.fx(0) - y * d.fy(0) + 0.5 * (k + 2) * d.f(0);
        const cplx L2 = I * y * d.fx(1) - y * d.fy(1) + 0.5 * k * d.f(1);
        return Vec2c(-(rp * L1 + I * double(k) * d.f(1)), -rho * L2);
    };
}

inline SpinorField spinor_from_maass(const ScalarField& psi, int k, double rho, const GridPatch& p)
{
    return spinor([psi, rho](double x, double y) { return rho * psi(x, y); },
                  [L = maass_Lambda(psi, k, p)](double x, double y) { return I * L(x, y); });
}

inline LadderResiduals ladder_check(const ScalarField& psi, int k, double rho, const GridPatch& p)
{
    if (rho == 0.0) throw DomainError("operators: the ladder needs rho != 0");
    const auto pts = p.check_points();
    const double lambda = rho * rho + 0.5 * k * (1.0 - 0.5 * k);
    const SpinorField Psi = spinor_from_maass(psi, k, rho, p);
    LadderResiduals r;
    const SpinorField DPsi = dirac(Psi, k, p);
    r.forward = max_residual(DPsi, [&](double x, double y) { return (-rho * Psi(x, y)).eval(); }, pts);
    const ScalarField psi1 = [&](double x, double y) { return Psi(x, y)(0) / rho; };
    r.roundtrip = max_residual(maass_laplacian(psi1, k, p),
                               [&](double x, double y) { return -lambda * psi1(x, y); }, pts);
    const double rp = rho_prime(rho, k);
    const SpinorField A = raise_spinor(Psi, k, rho, p);
    r.ladder = max_residual(dirac(A, k + 2, p), [&](double x, double y) { return (-rp * A(x, y)).eval(); }, pts);
    return r;
}

// S_{2m+1} = B^dagger_{2m-1} ... B^dagger_1 T C_3 ... C_{2m+1} with B^dagger_k = A^dagger_k / rho_k and
// C_k = A_k / rho_k, where rho is the spectral parameter at weight 1 and rho_{w+2}^2 = rho_w^2 + w.
inline SpinorField s_operator_composed(SpinorField F, int m, double rho, const GridPatch& p)
{
    if (m < 1) throw ContractError("operators: S_{2m+1} needs m >= 1");
    if (rho == 0.0) throw DomainError("operators: S_{2m+1} in composed form needs rho != 0");
    std::vector<double> r(m + 1);  // r[i] = rho at weight 2i + 1
    r[0] = rho;
    for (int i = 1; i <= m; ++i) r[i] = rho_prime(r[i - 1], 2 * i - 1);
    SpinorField G = std::move(F);
    for (int i = m; i >= 1; --i) {
        const double scale = 1.0 / r[i];
        G = [L = lower_spinor(G, 2 * i - 1, r[i - 1], p), scale](double x, double y) { return (scale * L(x, y)).eval(); };
    }
    G = time_reversal(G);
    for (int i = 0; i < m; ++i) {
        const double scale = 1.0 / r[i];
        G = [A = raise_spinor(G, 2 * i + 1, r[i], p), scale](double x, double y) { return (scale * A(x, y)).eval(); };
    }
    return G;
}

// T diag(Lambda_{-2m+3} ... Lambda_{2m+1}, Lambda_{-2m+1} ... Lambda_{2m-1})
inline SpinorField s_operator_explicit(const SpinorField& F, int m, const GridPatch& p)
{
    ScalarField a = component(F, 0), b = component(F, 1);
    for (int w = 2 * m + 1; w >= -2 * m + 3; w -= 2) a = maass_Lambda(a, w, p);
    for (int w = 2 * m - 1; w >= -2 * m + 1; w -= 2) b = maass_Lambda(b, w, p);
    return time_reversal(spinor(a, b));
}

// Scalar analogue C Lambda_{-2m+1} ... Lambda_{2m+1}.
inline ScalarField scalar_s_operator(ScalarField f, int m, const GridPatch& p)
{
    for (int w = 2 * m + 1; w >= -2 * m + 1; w -= 2) f = maass_Lambda(f, w, p);
    return conjugate(f);
}

inline double s_operator_check(const SpinorField& F, int m, double rho1, double rho2, const GridPatch& p)
{
    const auto pts = p.check_points();
    const SpinorField a = s_operator_composed(F, m, rho1, p), b = s_operator_composed(F, m, rho2, p);
    const SpinorField e = s_operator_explicit(F, m, p);
    return std::max({max_residual(a, b, pts), max_residual(a, e, pts), max_residual(b, e, pts)});
}

struct WeightShiftResiduals {
    double raised = 0.0;    // (-Delta_{k+2} - lambda) K_k psi
    double returned = 0.0;  // (-Delta_k - lambda) Lambda_{k+2} K_k psi
};

inline WeightShiftResiduals weight_shift_check(const ScalarField& psi, int k, double lambda, const GridPatch& p)
{
    const auto pts = p.check_points();
    const ScalarField up = maass_K(psi, k, p);
    const ScalarField back = maass_Lambda(up, k + 2, p);
    WeightShiftResiduals r;
    r.raised = max_residual(maass_laplacian(up, k + 2, p), [&](double x, double y) { return -lambda * up(x, y); }, pts);
    r.returned =
        max_residual(maass_laplacian(back, k, p), [&](double x, double y) { return -lambda * back(x, y); }, pts);
    return r;
}

struct KramersPair {
    cplx inner;           // <T Psi, Psi> over the patch
    double gram = 0.0;    // Gram determinant of (Psi, T Psi)
};

// Midpoint quadrature over the assertion grid with the measure dx dy / y^2.
inline KramersPair kramers_check(const SpinorField& Psi, const GridPatch& p)
{
    const SpinorField TPsi = time_reversal(Psi);
    const auto pts = p.check_points();
    cplx ip = 0.0;
    double n1 = 0.0, n2 = 0.0;
    for (const auto& z : pts) {
        const Vec2c a = TPsi(z.x(), z.y()), b = Psi(z.x(), z.y());
        const double w = 1.0 / (z.y() * z.y());
        ip += w * a.dot(b);
        n1 += w * b.squaredNorm();
        n2 += w * a.squaredNorm();
    }
    return {ip, n1 * n2 - std::norm(ip)};
}

struct SpecialEigenvalue {
    long num = 0, den = 1;  // lambda = num / den in lowest terms
    long multiplicity = 0;
    double value() const { return double(num) / double(den); }
};

inline std::vector<SpecialEigenvalue> special_eigenvalues(int k, int genus)
{
    if (k < 2) throw DomainError("operators: special eigenvalues exist for k >= 2");
    if (genus < 2) throw DomainError("operators: genus must be at least 2");
    std::vector<SpecialEigenvalue> out;
    for (int j = 0; j <= (k - 1) / 2; ++j) {
        const long n = k - 2 * j;
        long num = n * (2 - n), den = 4;
        if (n == 1) break;  // multiplicity (g - 1)(n - 1) vanishes
        const long g = std::gcd(std::abs(num), den);
        num /= g;
        den /= g;
        out.push_back({num, den, long(genus - 1) * (n - 1)});
    }
    return out;
}

// Field strength (k - 1) / 2e in units e = 1.
inline double magnetic_field(int k) { return 0.5 * (k - 1); }

struct IdentityResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed() const { return residual < tolerance; }
};

// Fields planted for the identity suite and the tests.
inline double planted_rho() { return 1.3; }
inline double planted_lambda(int k, double rho) { return rho * rho + 0.5 * k * (1.0 - 0.5 * k); }

// Nested compositions of three or more stencils lose ~eps/h^depth to rounding at the default spacing, so
// they run on an 8th-order stencil at h = 0.02, with fewer assertion points since the cost grows like
// (order + 1)^depth per point.
inline GridPatch deep_patch(const GridPatch& p = {})
{
    GridPatch q = p;
    q.order = 8;
    q.hx = q.hy = 0.02;
    q.samples = std::min(p.samples, 9);
    return q;
}

// Default patch for single and double compositions, deep_patch for the rest.
inline std::vector<IdentityResult> identity_suite(const GridPatch& p = {})
{
    std::vector<IdentityResult> out;
    const SpinorField F = analytic_spinor_family();
    const GridPatch deep = deep_patch(p);
    for (int k : {1, 3}) out.push_back({"square k=" + std::to_string(k), square_identity_check(F, k, p), 1e-7});
    for (int k : {1, 3}) out.push_back({"chiral k=" + std::to_string(k), chiral_check(F, k, p), 1e-12});
    for (int k : {1, 3})
        out.push_back({"time reversal k=" + std::to_string(k), time_reversal_check(F, k, p), 1e-10});
    out.push_back({"transformation boost k=1", transformation_check(F, GroupElement::boost(0.3), 1, p), 1e-6});
    out.push_back({"transformation rotation k=3", transformation_check(F, GroupElement::rotation(pi / 4), 3, p), 1e-6});
    out.push_back({"S_3 rho independence", s_operator_check(F, 1, 1.0, 1.7, p), 1e-7});
    out.push_back({"S_5 rho independence", s_operator_check(F, 2, 1.0, 1.7, deep), 1e-7});
    for (int k : {1, 3}) {
        const double rho = planted_rho(), lambda = planted_lambda(k, rho);
        const cplx s = s_for_eigenvalue(lambda);
        const ScalarField psi = planted_maass(k, s, GroupElement::rotation(0.4));
        const std::string tag = " k=" + std::to_string(k);
        const LadderResiduals l = ladder_check(psi, k, rho, p);
        out.push_back({"eigenform map" + tag, l.forward, 1e-7});
        out.push_back({"eigenform round trip" + tag, l.roundtrip, 1e-6});
        out.push_back({"ladder" + tag, ladder_check(psi, k, rho, deep).ladder, 1e-6});
        out.push_back({"weight raise" + tag, weight_shift_check(psi, k, lambda, deep).raised, 1e-7});
        out.push_back({"weight return" + tag, weight_shift_check(planted_maass(k, s), k, lambda, deep).returned, 1e-7});
    }
    return out;
}

}  // namespace selberg
