#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "fuchsian.hpp"
#include "moebius.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"
#include "testfn.hpp"

namespace selberg {

struct PhiValue {
    cplx phi1, phi2;

    Mat2c matrix() const
    {
        Mat2c m;
        m << phi1, phi2, phi2, phi1;
        return m;
    }
    double max_abs() const { return std::max(std::abs(phi1), std::abs(phi2)); }
};

struct PointPairOptions {
    double contour_shift = 0.1;
    bool symmetrize = true;
    double max_panel = 1.0;
    double max_reach = 200.0;
    std::size_t cache_limit = 1u << 20;
};

// Phi(sigma) = (1/pi) int H(sigma; rho) h(rho) d rho along Im rho = -shift. The nodes of a
// composite Gauss-Legendre rule on the contour are prepared once; values are memoized by sigma.
// With symmetrization only Re rho >= 0 is sampled and the mirror node -conj(rho) is folded in
// through H(sigma; -conj rho) h(-conj rho) = -conj(H(sigma; rho) h(rho)).
class PointPairKernel {
public:
    explicit PointPairKernel(const TestFunction& h, PointPairOptions opt = {}) : h_(h), opt_(opt)
    {
        const double eps = opt.contour_shift;
        if (!(eps > 0.0) || !(eps < h.pole_distance()))
            throw DomainError("kernels: the contour shift must lie inside the analyticity strip of h");
        reach_ = std::min(h.support_radius(1e-18) + 1.0, opt.max_reach);
        std::vector<double> cuts{0.0, reach_};
        const double sc = std::min(opt.max_panel, h.scale());
        for (double c : h.features())
            for (int k = -8; k <= 8; ++k)
                if (double x = std::abs(c) + k * sc; x > 0.0 && x < reach_) cuts.push_back(x);
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> panels;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i], b = cuts[i + 1];
            if (b - a < 1e-12) continue;
            const int m = std::max(1, int(std::ceil((b - a) / opt.max_panel)));
            for (int j = 0; j < m; ++j) panels.push_back(a + (b - a) * j / m);
        }
        panels.push_back(reach_);
        static const quad::Rule base = quad::gauss_legendre<20>();
        auto add_panel = [&](double a, double b, double sign) {
            const auto r = quad::composite(base, a, b, 1);
            for (std::size_t i = 0; i < r.x.size(); ++i) {
                const cplx rho(sign * r.x[i], -eps);
                nodes_.push_back({KernelNode(rho), r.w[i] * h(rho) / pi});
            }
        };
        for (std::size_t i = 0; i + 1 < panels.size(); ++i) {
            add_panel(panels[i], panels[i + 1], 1.0);
            if (!opt.symmetrize) add_panel(panels[i], panels[i + 1], -1.0);
        }
        // |H| grows at most like |rho|^{1/2} on the contour
        auto tail = [&](double x) { return std::abs(h(cplx(x, -eps))) * std::sqrt(1.0 + x); };
        tail_ = 2.0 / pi * quad::adaptive(tail, reach_, std::numeric_limits<double>::infinity(), 1e-6).value;
    }

    const TestFunction& test_function() const { return h_; }
    const PointPairOptions& options() const { return opt_; }
    std::size_t node_count() const { return nodes_.size(); }
    double contour_reach() const { return reach_; }
    // Estimate of the part of the contour integral beyond the last node.
    double truncation() const { return tail_; }

    PhiValue phi_uncached(double sigma) const
    {
        cplx p1 = 0.0, p2 = 0.0;
        for (const auto& n : nodes_) {
            const GreenKernel H = n.node.eval(sigma);
            p1 += n.weight * H.H1;
            p2 += n.weight * H.H2;
        }
        if (opt_.symmetrize) {
            p1 = 2.0 * I * p1.imag();
            p2 = 2.0 * I * p2.imag();
        }
        return {p1, p2};
    }

    PhiValue phi(double sigma) const
    {
        {
            std::shared_lock lock(mu_);
            if (auto it = cache_.find(sigma); it != cache_.end()) return it->second;
        }
        const PhiValue v = phi_uncached(sigma);
        std::unique_lock lock(mu_);
        if (cache_.size() >= opt_.cache_limit) cache_.clear();
        cache_.emplace(sigma, v);
        return v;
    }

    std::size_t cache_size() const
    {
        std::shared_lock lock(mu_);
        return cache_.size();
    }

private:
    struct Node {
        KernelNode node;
        cplx weight;
    };

    TestFunction h_;
    PointPairOptions opt_;
    std::vector<Node> nodes_;
    double reach_ = 0.0, tail_ = 0.0;
    mutable std::shared_mutex mu_;
    mutable std::unordered_map<double, PhiValue> cache_;
};

inline PointPairKernel build_point_pair(const TestFunction& h, PointPairOptions opt = {})
{
    return PointPairKernel(h, opt);
}

struct DecayFit {
    double slope = 0.0;    // least-squares slope of log|Phi_i| against log sigma
    double epsilon = 0.0;  // certified: |Phi_i| <= C sigma^{-1-epsilon} on the fit range
    double C = 0.0;
};

// Fits the power-law decay of the component (0: Phi1, 1: Phi2) on sigma in [lo, hi].
inline DecayFit fit_phi_decay(const PointPairKernel& K, int component, double lo = 2.0, double hi = 100.0,
                              int samples = 24)
{
    std::vector<double> xs, ys;
    for (int i = 0; i < samples; ++i) {
        const double s = lo * std::pow(hi / lo, double(i) / (samples - 1));
        const PhiValue v = K.phi(s);
        const double a = std::abs(component == 0 ? v.phi1 : v.phi2);
        xs.push_back(std::log(s));
        ys.push_back(std::log(std::max(a, 1e-300)));
    }
    double mx = 0, my = 0;
    for (int i = 0; i < samples; ++i) mx += xs[i], my += ys[i];
    mx /= samples;
    my /= samples;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < samples; ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    DecayFit f;
    f.slope = sxy / sxx;
    f.epsilon = -1.0 - f.slope;
    for (int i = 0; i < samples; ++i) f.C = std::max(f.C, std::exp(ys[i] + (1.0 + f.epsilon) * xs[i]));
    return f;
}

// K(z', z) = -i A Phi(sigma) B
inline Mat2c kernel_eval(const PointPairKernel& K, const Point& z1, const Point& z2)
{
    const PairPhases ph = pair_phases(z1, z2);
    return -I * sandwich(ph, K.phi(sigma_invariant(z1, z2)).matrix());
}

// int_{-inf}^{inf} rho h(rho) coth(pi rho) d rho; quadrature on [0, 1], the series
// coth = 1 + 2 sum e^{-2 pi n rho} above 1, and the exact first-moment tail of h at the end.
inline double coth_integral(const TestFunction& h)
{
    auto near = [&](double r) {
        if (r < 1e-8) return h(r) / pi;
        return r / std::tanh(pi * r) * h(r);
    };
    auto far = [&](double r) {
        double c = 1.0;
        for (int n = 1;; ++n) {
            const double t = 2.0 * std::exp(-2.0 * pi * n * r);
            c += t;
            if (t < 1e-18) break;
        }
        return r * c * h(r);
    };
    const double R = h.support_radius();
    const double a = integrate_line(h, near, 1e-14, 0.0, 1.0).value;
    const double b = R > 1.0 ? integrate_line(h, far, 1e-14, 1.0, R).value : 0.0;
    double tail = 0.0;
    switch (h.family()) {
    case Family::gaussian: tail = std::exp(-h.t() * R * R) / (2.0 * h.t()); break;
    case Family::peaked_pair:
        for (double c : {h.a(), -h.a()}) {
            const double e = h.eps();
            tail += 0.5 * e * e * std::exp(-(R - c) * (R - c) / (e * e)) +
                    c * 0.5 * e * std::sqrt(pi) * std::erfc((R - c) / e);
        }
        break;
    case Family::resolvent_difference: {
        const double p = h.s() - 0.5, q = h.sigma() - 0.5;
        tail = 0.5 * std::log1p((q * q - p * p) / (R * R + p * p));
        break;
    }
    }
    return 2.0 * (a + b + tail);
}

// tr K(z, z) = (1/2pi) int rho h(rho) coth(pi rho) d rho
inline double kernel_diagonal_trace(const TestFunction& h) { return coth_integral(h) / (2.0 * pi); }

namespace detail {

// e^{x^2} erfc(x) for x >= 0, and 1 - sqrt(pi) x e^{x^2} erfc(x) without cancellation for large x.
inline double one_minus_scaled_erfc(double x)
{
    if (x < 4.0) return 1.0 - std::sqrt(pi) * x * std::exp(x * x) * std::erfc(x);
    // sqrt(pi) e^{x^2} erfc(x) = 1/f, f = x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))
    double f = x;
    for (int k = 400; k >= 2; --k) f = x + 0.5 * k / f;
    const double r = 0.5 / f;
    return r / (x + r);
}

}  // namespace detail

// The diagonal trace for the gaussian h = e^{-t rho^2}, summing coth = 1 + 2 sum e^{-2 pi n rho}
// termwise: int_0^inf rho e^{-t rho^2 - 2 pi n rho} = (1 - sqrt(pi) x erfcx(x)) / 2t, x = pi n / sqrt t.
inline double diagonal_trace_gaussian_series(double t)
{
    const int N = 4000;
    double s = 0.0;
    for (int n = N; n >= 1; --n) s += detail::one_minus_scaled_erfc(pi * n / std::sqrt(t));
    // tail n > N from the asymptotic expansion in 1/x^2 and Euler-Maclaurin sums of n^{-p}
    const double c[] = {0.5, -0.75, 1.875, -6.5625};
    auto zeta_tail = [&](double p) {
        const double n = N;
        return std::pow(n, 1 - p) / (p - 1) - 0.5 * std::pow(n, -p) + p / 12.0 * std::pow(n, -p - 1) -
               p * (p + 1) * (p + 2) / 720.0 * std::pow(n, -p - 3);
    };
    for (int k = 1; k <= 4; ++k) s += c[k - 1] * std::pow(t / (pi * pi), k) * zeta_tail(2.0 * k);
    const double integral = 2.0 * (1.0 / (2.0 * t) + 2.0 * s / (2.0 * t));
    return integral / (2.0 * pi);
}

// Precomputed orbit of the base point i, grown on demand, shared by Poincare series.
class PoincareSum {
public:
    PoincareSum(const SurfacePresentation& p, const MultiplierSystem& ms, std::size_t budget = 50'000'000)
        : F_(dirichlet_domain(p)), ms_(ms), budget_(budget)
    {
    }

    const DirichletDomain& domain() const { return F_; }
    const MultiplierSystem& multiplier() const { return ms_; }
    double area() const { return F_.area; }

    const std::vector<OrbitElement>& within(double radius)
    {
        if (radius > radius_) {
            elements_ = elements_within(F_, radius, budget_);
            radius_ = radius;
        }
        return elements_;
    }

    // Calls f(lift, chi(lift), gamma z2) for both SL lifts of every group element with
    // d(z1, gamma z2) <= ball.
    template <class F>
    std::size_t for_each_lift(const Point& z1, const Point& z2, double ball, F&& f)
    {
        const Point o(0.0, 1.0);
        const double R = ball + hyperbolic_distance(o, z1) + hyperbolic_distance(o, z2);
        std::size_t n = 0;
        for (const auto& e : within(R)) {
            const Point gz = moebius_act(e.g, z2);
            if (hyperbolic_distance(z1, gz) > ball) continue;
            const int chi = ms_.chi_parity(e.parity);
            f(e.g, chi, gz);
            f(-e.g, chi * ms_.chi_minus_identity(), gz);
            ++n;
        }
        return n;
    }

private:
    DirichletDomain F_;
    MultiplierSystem ms_;
    std::size_t budget_;
    double radius_ = -1.0;
    std::vector<OrbitElement> elements_;
};

struct PoincareValue {
    Mat2c value;
    double tail = 0.0;
    std::size_t terms = 0;
};

namespace detail {

// Expected number of orbit points gamma z with d(z', gamma z) in [D, D + 1].
inline double shell_count(double area, double D)
{
    return 2.0 * pi / area * (std::cosh(D + 1.0) - std::cosh(D));
}

}  // namespace detail

// K_Gamma(z', z) = 1/2 sum over both lifts of K(z', gamma z) chi(gamma) J_gamma(z, 1), truncated
// at d(z', gamma z) <= ball. The tail estimate sums |Phi| over unit shells weighted by the
// expected shell population.
inline PoincareValue automorphic_kernel(const PointPairKernel& K, const Point& z1, const Point& z2,
                                        PoincareSum& P, double ball, double tolerance = 0.0)
{
    PoincareValue out{Mat2c::Zero(), 0.0, 0};
    out.terms = P.for_each_lift(z1, z2, ball, [&](const GroupElement& g, int chi, const Point& gz) {
        out.value += 0.5 * double(chi) * kernel_eval(K, z1, gz) * factor_J(g, z2, Weight{1});
    });
    // Far shells see only roundoff in Phi times an exponentially growing population; stop once the
    // shell contributions stop decreasing.
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 40; ++j) {
        const double D = ball + j;
        const double s = std::cosh(D / 2) * std::cosh(D / 2);
        const double term = detail::shell_count(P.area(), D) * K.phi(s).max_abs();
        if (term >= prev) break;
        out.tail += term;
        prev = term;
    }
    if (tolerance > 0.0 && out.tail > tolerance)
        throw TailTooLarge("kernels: Poincare series tail " + std::to_string(out.tail) +
                               " exceeds the tolerance; raise the ball radius",
                           out.tail);
    return out;
}

inline PoincareValue automorphic_kernel(const PointPairKernel& K, const Point& z1, const Point& z2,
                                        const SurfacePresentation& p, const MultiplierSystem& ms, double ball)
{
    PoincareSum P(p, ms);
    return automorphic_kernel(K, z1, z2, P, ball);
}

// Constant c in |G_i| <= c |rho| e^{-(1/2 - Im rho) d}, fitted on d in [3, 10].
inline double green_bound_constant(cplx rho)
{
    const double alpha = 0.5 - rho.imag();
    const KernelNode node(rho);
    double c = 0.0;
    for (double d = 3.0; d <= 10.0 + 1e-12; d += 0.25) {
        const double s = std::cosh(d / 2) * std::cosh(d / 2);
        const GreenKernel H = node.eval(s);
        c = std::max(c, std::max(std::abs(H.H1), std::abs(H.H2)) * std::exp(alpha * d) / std::abs(rho));
    }
    return c;
}

// G_Gamma(z', z; rho) = 1/2 sum over both lifts of G(z', gamma z; rho) chi(gamma) J_gamma(z, 1).
inline PoincareValue green_automorphic(const Point& z1, const Point& z2, cplx rho, PoincareSum& P, double ball,
                                       double tolerance = 0.0)
{
    if (!(rho.imag() < -0.5))
        throw DomainError("kernels: the automorphic Green's function needs Im rho < -1/2");
    const KernelNode node(rho);
    PoincareValue out{Mat2c::Zero(), 0.0, 0};
    out.terms = P.for_each_lift(z1, z2, ball, [&](const GroupElement& g, int chi, const Point& gz) {
        const Mat2c G = sandwich(pair_phases(z1, gz), node.eval(sigma_invariant(z1, gz)).matrix());
        out.value += 0.5 * double(chi) * G * factor_J(g, z2, Weight{1});
    });
    const double alpha = 0.5 - rho.imag();
    out.tail = green_bound_constant(rho) * std::abs(rho) * pi / P.area() * std::exp(-(alpha - 1.0) * ball) /
               (alpha - 1.0);
    if (tolerance > 0.0 && out.tail > tolerance)
        throw TailTooLarge("kernels: Green's function tail " + std::to_string(out.tail) +
                               " exceeds the tolerance; raise the ball radius",
                           out.tail);
    return out;
}

struct OrbitalIntegral {
    double quadrature = 0.0;
    double closed_form = 0.0;
    double x_cut = 0.0;  // the strip integral is truncated at |x / y| <= x_cut
};

inline double orbital_closed_form(const TestFunction& h, double l, int n)
{
    return l * h.g(n * l) / std::sinh(n * l / 2.0);
}

// tr int_1^{e^l} int_R K(z, gamma^n z) J_{gamma^n}(z, 1) dx dy / y^2 for gamma = diag(e^{l/2}, e^{-l/2}),
// by product quadrature: Gauss-Legendre in log y and adaptive Gauss-Kronrod in x.
inline OrbitalIntegral orbital_integral(const PointPairKernel& K, double l, int n, double rel_tol = 1e-11)
{
    if (!(l > 0.0) || n < 1) throw DomainError("kernels: the orbital integral needs l > 0 and n >= 1");
    OrbitalIntegral out;
    out.closed_form = orbital_closed_form(K.test_function(), l, n);
    const GroupElement g = GroupElement::boost(n * l);
    const double L = n * l;
    // sigma as a function of x / y; the cut is where Phi has decayed by 1e-15
    auto sigma_of = [&](double r) {
        const double cd = 1.0 + std::pow(std::expm1(L), 2) * (1.0 + r * r) / (2.0 * std::exp(L));
        return 0.5 * (cd + 1.0);
    };
    const double peak = K.phi(sigma_of(0.0)).max_abs();
    // Phi is a sum of O(|Phi(2)|) terms, so values below ~1e-15 |Phi(2)| are rounding noise
    const double noise = 1e-15 * K.phi(2.0).max_abs();
    const double floor = std::max(1e-15 * peak, noise);
    double X = 1.0;
    while (X < 1e8 && K.phi(sigma_of(X)).max_abs() > floor) X *= 1.5;
    out.x_cut = X;
    if (peak == 0.0 || sigma_of(0.0) > 1e300) return out;

    auto inner = [&](double y) {
        auto f = [&](double x) {
            const Point z(x, y);
            const Point gz = moebius_act(g, z);
            return (kernel_eval(K, z, gz) * factor_J(g, z, Weight{1})).trace().real();
        };
        std::vector<double> cuts{0.0};
        for (double c = 0.25; c < X; c *= 2.0) cuts.push_back(c * y);
        cuts.push_back(X * y);
        // panels are refined only to the accuracy the whole integral needs, and not below the
        // rounding level of Phi
        const std::size_t m = cuts.size() - 1;
        std::vector<double> coarse(2 * m);
        double magnitude = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            coarse[2 * i] = std::abs(quad::adaptive(f, cuts[i], cuts[i + 1], 1.0, 0).value);
            coarse[2 * i + 1] = std::abs(quad::adaptive(f, -cuts[i + 1], -cuts[i], 1.0, 0).value);
            magnitude += coarse[2 * i] + coarse[2 * i + 1];
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (int side = 0; side < 2; ++side) {
                const double lo = side == 0 ? cuts[i] : -cuts[i + 1], hi = side == 0 ? cuts[i + 1] : -cuts[i];
                const double target = rel_tol * magnitude + 2.0 * noise * (hi - lo);
                const double c = coarse[2 * i + side];
                if (c <= target) {
                    sum += quad::adaptive(f, lo, hi, 1.0, 0).value;
                    continue;
                }
                sum += quad::adaptive(f, lo, hi, std::max(rel_tol, target / c), 20).value;
            }
        return sum;
    };
    static const quad::Rule rule = quad::gauss_legendre<12>();
    const auto r = quad::composite(rule, 0.0, l, 1);
    double total = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double y = std::exp(r.x[i]);
        total += r.w[i] * inner(y) / y;  // dy / y^2 = e^{-s} ds
    }
    out.quadrature = total;
    return out;
}

inline OrbitalIntegral orbital_integral(const TestFunction& h, double l, int n)
{
    return orbital_integral(PointPairKernel(h), l, n);
}

}  // namespace selberg
