#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"
#include "moebius.hpp"
#include "quadrature.hpp"

namespace selberg {

enum class Family { gaussian, peaked_pair, resolvent_difference };

inline std::string to_string(Family f)
{
    switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::peaked_pair: return "peaked_pair";
    case Family::resolvent_difference: return "resolvent_difference";
    }
    return "?";
}

inline Family parse_family(const std::string& s)
{
    if (s == "gaussian") return Family::gaussian;
    if (s == "peaked_pair") return Family::peaked_pair;
    if (s == "resolvent_difference" || s == "resolvent") return Family::resolvent_difference;
    throw ConfigError("testfn: unknown family '" + s + "'");
}

inline constexpr double pole_clearance = 1e-3;

class TestFunction {
public:
    static TestFunction gaussian(double t)
    {
        if (!(t > 0.0)) throw ConfigError("testfn: gaussian width t must be positive");
        TestFunction h(Family::gaussian);
        h.t_ = t;
        return h;
    }

    static TestFunction peaked_pair(double a, double eps = 0.05)
    {
        if (!(a >= 0.0)) throw ConfigError("testfn: peaked_pair center a must be >= 0");
        if (!(eps > 0.0)) throw ConfigError("testfn: peaked_pair width eps must be positive");
        TestFunction h(Family::peaked_pair);
        h.a_ = a;
        h.eps_ = eps;
        return h;
    }

    static TestFunction resolvent_difference(double s, double sigma)
    {
        if (!(s > 1.0) || !(sigma > 1.0))
            throw ConfigError("testfn: resolvent_difference needs s > 1 and sigma > 1");
        TestFunction h(Family::resolvent_difference);
        h.s_ = s;
        h.sigma_ = sigma;
        h.delta_ = 2.0;
        h.beta_ = std::min(s, sigma) - 0.5 - pole_clearance;
        return h;
    }

    Family family() const { return family_; }
    double t() const { return t_; }
    double a() const { return a_; }
    double eps() const { return eps_; }
    double s() const { return s_; }
    double sigma() const { return sigma_; }
    double beta() const { return beta_; }
    double delta() const { return delta_; }

    // Half-width of the analyticity strip; infinite for entire families.
    double pole_distance() const
    {
        if (family_ == Family::resolvent_difference) return std::min(s_, sigma_) - 0.5;
        return std::numeric_limits<double>::infinity();
    }

    cplx operator()(cplx rho) const
    {
        switch (family_) {
        case Family::gaussian: return std::exp(-t_ * rho * rho);
        case Family::peaked_pair: {
            const double e2 = eps_ * eps_;
            return std::exp(-(rho - a_) * (rho - a_) / e2) + std::exp(-(rho + a_) * (rho + a_) / e2);
        }
        case Family::resolvent_difference: {
            const double p = s_ - 0.5, q = sigma_ - 0.5;
            return 1.0 / (rho * rho + p * p) - 1.0 / (rho * rho + q * q);
        }
        }
        return 0.0;
    }

    double operator()(double rho) const { return (*this)(cplx(rho, 0.0)).real(); }

    double g(double u) const
    {
        const double au = std::abs(u);
        switch (family_) {
        case Family::gaussian: return std::exp(-u * u / (4.0 * t_)) / (2.0 * std::sqrt(pi * t_));
        case Family::peaked_pair:
            return eps_ / (2.0 * std::sqrt(pi)) * std::exp(-eps_ * eps_ * u * u / 4.0) * 2.0 * std::cos(a_ * u);
        case Family::resolvent_difference:
            return std::exp(-(s_ - 0.5) * au) / (2.0 * s_ - 1.0) -
                   std::exp(-(sigma_ - 0.5) * au) / (2.0 * sigma_ - 1.0);
        }
        return 0.0;
    }

    // Nonincreasing bound on |g| over [u, inf) for u >= 0.
    double g_envelope(double u) const
    {
        u = std::abs(u);
        switch (family_) {
        case Family::gaussian: return g(u);
        case Family::peaked_pair: return eps_ / std::sqrt(pi) * std::exp(-eps_ * eps_ * u * u / 4.0);
        case Family::resolvent_difference:
            return std::exp(-(s_ - 0.5) * u) / (2.0 * s_ - 1.0) + std::exp(-(sigma_ - 0.5) * u) / (2.0 * sigma_ - 1.0);
        }
        return 0.0;
    }

    // Points where h has its structure on the real line and the length scale there.
    std::vector<double> features() const
    {
        if (family_ == Family::peaked_pair && a_ > 0.0) return {-a_, a_};
        return {0.0};
    }

    double scale() const
    {
        switch (family_) {
        case Family::gaussian: return 1.0 / std::sqrt(t_);
        case Family::peaked_pair: return eps_;
        case Family::resolvent_difference: return std::min(s_, sigma_) - 0.5;
        }
        return 1.0;
    }

    // Beyond this radius |h| on the real line is below rel * |h|_max; for the algebraically
    // decaying family the radius is where the remaining integral of |h| drops below rel.
    double support_radius(double rel = 1e-300) const
    {
        const double lr = -std::log(rel);
        switch (family_) {
        case Family::gaussian: return std::sqrt(lr / t_);
        case Family::peaked_pair: return a_ + eps_ * std::sqrt(lr);
        case Family::resolvent_difference: {
            const double p = s_ - 0.5, q = sigma_ - 0.5;
            return std::min(5e3 * std::max(1.0, sigma_ + s_), std::cbrt((q * q - p * p) / (3.0 * std::max(rel, 1e-30))));
        }
        }
        return 1.0;
    }

    std::string describe() const
    {
        char buf[160];
        switch (family_) {
        case Family::gaussian: std::snprintf(buf, sizeof buf, "gaussian(t=%.17g)", t_); break;
        case Family::peaked_pair: std::snprintf(buf, sizeof buf, "peaked_pair(a=%.17g, eps=%.17g)", a_, eps_); break;
        case Family::resolvent_difference:
            std::snprintf(buf, sizeof buf, "resolvent_difference(s=%.17g, sigma=%.17g)", s_, sigma_);
            break;
        }
        return buf;
    }

private:
    explicit TestFunction(Family f) : family_(f) {}

    Family family_;
    double t_ = 1.0, a_ = 0.0, eps_ = 0.05, s_ = 2.0, sigma_ = 3.0;
    double beta_ = 1.0, delta_ = 1.0;
};

// Integral of f(x) over [lo, hi] (by default the whole line out to where h is negligible),
// split at the features of h so that narrow peaks are resolved, on panels that grow
// geometrically away from them. f must decay at least like h.
template <class F>
auto integrate_line(const TestFunction& h, F&& f, double rel_tol = 1e-13,
                    double lo = -std::numeric_limits<double>::infinity(),
                    double hi = std::numeric_limits<double>::infinity())
{
    using T = decltype(f(0.0));
    const double reach = h.support_radius();
    lo = std::max(lo, -reach);
    hi = std::min(hi, reach);
    std::vector<double> pts{lo, hi};
    const double sc = h.scale();
    std::vector<double> seeds;
    for (double c : h.features())
        for (int k = -8; k <= 8; ++k) seeds.push_back(c + k * sc);
    std::sort(seeds.begin(), seeds.end());
    pts.insert(pts.end(), seeds.begin(), seeds.end());
    for (double x = seeds.back(), w = sc; x < reach; w *= 2.0) {
        x = std::min(reach, x + w);
        pts.push_back(x);
    }
    for (double x = seeds.front(), w = sc; x > -reach; w *= 2.0) {
        x = std::max(-reach, x - w);
        pts.push_back(x);
    }
    std::erase_if(pts, [&](double x) { return x < lo || x > hi; });
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 2) return quad::Result<T>{T{}, 0.0};
    // a coarse pass fixes the overall magnitude, so panels that contribute nothing are not refined
    std::vector<double> coarse(pts.size() - 1);
    double magnitude = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        coarse[i] = std::abs(quad::adaptive(f, pts[i], pts[i + 1], 1.0, 0).value);
        magnitude += coarse[i];
    }
    T total{};
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double tol = std::min(0.1, rel_tol * std::max(1.0, magnitude / std::max(coarse[i], 1e-300)));
        const auto r = quad::adaptive(f, pts[i], pts[i + 1], tol, 15);
        total += r.value;
        err += r.error;
    }
    return quad::Result<T>{total, err};
}

struct FourierPair {
    TestFunction h;
    double g(double u) const { return h.g(u); }
    double g0() const { return h.g(0.0); }
};

inline FourierPair fourier_g(const TestFunction& h) { return FourierPair{h}; }

// (1/2pi) int h(rho) e^{-i rho u} d rho by quadrature; the independent check of the closed forms.
inline double fourier_by_quadrature(const TestFunction& h, double u)
{
    auto f = [&](double x) { return h(x) * std::cos(x * u); };
    return integrate_line(h, f, 1e-14).value / (2.0 * pi);
}

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<std::string> failures;
    double beta = 0.0;
    double delta = 0.0;
    double C = 0.0;
};

// Samples the clauses of admissibility for an arbitrary function on the strip |Im rho| <= beta.
inline AdmissibilityReport validate_admissible(const std::function<cplx(cplx)>& h, double beta, double delta,
                                               double margin = 1e-3)
{
    AdmissibilityReport rep;
    rep.beta = beta;
    rep.delta = delta;
    auto fail = [&](const std::string& why) {
        rep.admissible = false;
        rep.failures.push_back(why);
    };
    if (!(beta >= 0.5 + margin))
        fail("analyticity: certified strip half-width beta = " + std::to_string(beta) + " is below 1/2 + margin");
    if (!(delta > 0.0)) fail("decay: exponent delta must be positive");

    const double ys[] = {0.0, 0.5, 1.0};
    double worst_odd = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double x = 0.15 * i;
        for (double fy : ys)
            for (double sgn : {-1.0, 1.0}) {
                const cplx r(x, sgn * fy * beta);
                const cplx a = h(r), b = h(-r);
                const double sc = std::max({std::abs(a), std::abs(b), 1e-300});
                if (std::abs(a) + std::abs(b) > 1e-250) worst_odd = std::max(worst_odd, std::abs(a - b) / sc);
            }
    }
    if (worst_odd > 1e-12) fail("evenness: |h(rho) - h(-rho)| / |h| reaches " + std::to_string(worst_odd));

    // fit C on [0, 20], then require the bound to hold out to 400
    auto weighted = [&](double x, double y) { return std::abs(h(cplx(x, y))) * std::pow(1.0 + x, 2.0 + delta); };
    double C = 0.0;
    for (int i = 0; i <= 400; ++i)
        for (double fy : ys)
            for (double sgn : {-1.0, 1.0}) C = std::max(C, weighted(0.05 * i, sgn * fy * beta));
    rep.C = C;
    bool finite = std::isfinite(C);
    double excess = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double x = 20.0 + 1.9 * i;
        for (double fy : ys)
            for (double sgn : {-1.0, 1.0}) {
                const double w = weighted(x, sgn * fy * beta);
                if (!std::isfinite(w)) finite = false;
                excess = std::max(excess, w / C);
            }
    }
    if (!finite) fail("decay: h is not finite on the sampled strip");
    else if (excess > 1.0 + 1e-9)
        fail("decay: |h| (1 + |Re rho|)^(2 + delta) grows beyond the fitted constant by a factor " +
             std::to_string(excess));
    return rep;
}

inline AdmissibilityReport validate_admissible(const TestFunction& h)
{
    auto rep = validate_admissible([&](cplx r) { return h(r); }, h.beta(), h.delta());
    if (h.beta() >= h.pole_distance())
        rep.admissible = false, rep.failures.push_back("analyticity: strip reaches a pole of h");
    return rep;
}

// Lambda(rho) = (1/(pi i)) int_{Im rho' = -beta} h(rho') / (rho' - rho) d rho'
inline cplx hs_eigenvalue(const TestFunction& h, double rho, double beta)
{
    if (!(beta > 0.0) || !(beta < h.pole_distance()))
        throw DomainError("testfn: the contour Im rho' = -beta must lie inside the analyticity strip");
    auto f = [&](double x) {
        const cplx r(x, -beta);
        return h(r) / (r - rho);
    };
    const auto res = integrate_line(h, f, 1e-13);
    if (!std::isfinite(res.value.real()) || !std::isfinite(res.value.imag()) ||
        res.error > 1e-9 * std::max(1.0, std::abs(res.value)))
        throw ContractError("testfn: contour quadrature for Lambda did not converge");
    return res.value / (pi * I);
}

inline cplx hs_eigenvalue(const TestFunction& h, double rho) { return hs_eigenvalue(h, rho, h.beta()); }

}  // namespace selberg
