#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "selberg/error.hpp"
#include "selberg/moebius.hpp"
#include "selberg/quadrature.hpp"

namespace selberg {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

namespace detail {

inline constexpr double zeta_prime_at_minus_one = -0.16542114370045092921391966024278064;

// B_2, B_4, ..., B_24
inline constexpr double bernoulli_even[] = {
    1.0 / 6,           -1.0 / 30,          1.0 / 42,        -1.0 / 30,
    5.0 / 66,          -691.0 / 2730,      7.0 / 6,         -3617.0 / 510,
    43867.0 / 798,     -174611.0 / 330,    854513.0 / 138,  -236364091.0 / 2730};

inline bool is_nonpositive_integer(cplx z)
{
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

}  // namespace detail

// A logarithm of Gamma(z). The branch is that of a sum of principal logarithms,
// so exp() of it is exact but it may differ from the principal log Gamma by 2 pi i n.
inline cplx log_gamma(cplx z)
{
    if (detail::is_nonpositive_integer(z))
        throw DomainError("specfun: Gamma has a pole at z = " + std::to_string(z.real()));
    cplx shift = 0.0;
    while (z.real() < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    const cplx iz = 1.0 / z, iz2 = iz * iz;
    cplx s = 0.0, p = iz;
    for (int k = 1; k <= 10; ++k) {
        s += detail::bernoulli_even[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * p;
        p *= iz2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi) + s - shift;
}

inline cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

inline cplx rgamma(cplx z)
{
    if (detail::is_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

inline cplx digamma(cplx z)
{
    if (detail::is_nonpositive_integer(z))
        throw DomainError("specfun: digamma has a pole at z = " + std::to_string(z.real()));
    cplx acc = 0.0;
    while (z.real() < 15.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    const cplx iz = 1.0 / z, iz2 = iz * iz;
    cplx s = 0.0, p = iz2;
    for (int k = 1; k <= 10; ++k) {
        s += detail::bernoulli_even[k - 1] / (2.0 * k) * p;
        p *= iz2;
    }
    return std::log(z) - 0.5 * iz - s + acc;
}

inline double digamma(double x) { return digamma(cplx(x, 0.0)).real(); }

// Order of the zero of Barnes G at z (0 when G(z) != 0).
inline int barnes_g_zero_order(cplx z)
{
    if (!detail::is_nonpositive_integer(z)) return 0;
    return 1 - static_cast<int>(z.real());
}

// Barnes G via the asymptotic series of log G(w+1) and G(z+1) = Gamma(z) G(z).
inline cplx barnes_g(cplx z)
{
    if (barnes_g_zero_order(z) > 0) return 0.0;
    cplx factor = 1.0;
    cplx zz = z;
    while (zz.real() < 12.0) {
        factor *= rgamma(zz);
        zz += 1.0;
    }
    const cplx w = zz - 1.0;
    const cplx lw = std::log(w);
    const cplx iw2 = 1.0 / (w * w);
    cplx s = 0.0, p = iw2;
    for (int k = 1; k <= 8; ++k) {
        s += detail::bernoulli_even[k] / (4.0 * k * (k + 1.0)) * p;
        p *= iw2;
    }
    const cplx lg = 0.5 * w * w * lw - 0.75 * w * w + 0.5 * w * std::log(2.0 * pi) - lw / 12.0 +
                    detail::zeta_prime_at_minus_one + s;
    return std::exp(lg) * factor;
}

// Gauss hypergeometric series for |z| < 1.
inline cplx gauss_2f1(cplx a, cplx b, cplx c, cplx z)
{
    if (detail::is_nonpositive_integer(c))
        throw DomainError("specfun: 2F1 parameter c is a non-positive integer");
    if (std::abs(z) >= 1.0 - 1e-6)
        throw ContractError("specfun: 2F1 series does not converge for |z| >= 1 - 1e-6; use the integral representation");
    cplx term = 1.0, sum = 1.0;
    const double hump = std::abs(a) + std::abs(b) + std::abs(c) + 2.0;
    for (int n = 0; n < 2000000; ++n) {
        const cplx an = a + double(n), bn = b + double(n);
        if (an == 0.0 || bn == 0.0) return sum;
        term *= an * bn / ((c + double(n)) * (n + 1.0)) * z;
        sum += term;
        if (n > hump) {
            const double r = std::abs((an + 1.0) * (bn + 1.0) / ((c + (n + 1.0)) * (n + 2.0)) * z);
            if (r < 1.0 && std::abs(term) * r / (1.0 - r) <= 1e-17 * std::abs(sum)) return sum;
        }
    }
    throw ContractError("specfun: 2F1 series did not converge");
}

// The kernel H(sigma; rho): H1 = H4 on the diagonal, H2 = H3 off the diagonal.
struct GreenKernel {
    cplx H1, H2;

    Mat2c matrix() const
    {
        Mat2c m;
        m << H1, H2, H2, H1;
        return m;
    }
};

enum class KernelRepresentation { hypergeometric, integral };

// Evaluates H(sigma; rho) at fixed rho for many sigma. For sigma >= 2 the series in
// 1/sigma is summed; closer to sigma = 1 the logarithmic connection formula around
// 1/sigma = 1 is used, which converges in powers of (sigma - 1)/sigma.
class KernelNode {
public:
    explicit KernelNode(cplx rho) : rho_(rho), a_(I * rho)
    {
        if (detail::is_nonpositive_integer(a_) || detail::is_nonpositive_integer(2.0 * a_ + 1.0))
            throw DomainError("specfun: kernel parameter rho hits a Gamma pole");
        pre1_ = -rho_ / (4.0 * pi) * std::exp(log_gamma(a_) + log_gamma(a_ + 1.0) - log_gamma(2.0 * a_ + 1.0));
        pre2_ = -I / (4.0 * pi) * std::exp(2.0 * log_gamma(a_ + 1.0) - log_gamma(2.0 * a_ + 1.0));
        psi_a_ = digamma(a_);
    }

    cplx rho() const { return rho_; }

    GreenKernel eval(double sigma) const
    {
        if (!(sigma > 1.0))
            throw DomainError("specfun: the kernel H(sigma) is singular at sigma = 1 and undefined below");
        return sigma >= 2.0 ? far(sigma) : near(sigma);
    }

private:
    GreenKernel far(double sigma) const
    {
        const double x = 1.0 / sigma;
        const double ls = std::log(sigma);
        const cplx f1 = gauss_2f1(a_, a_ + 1.0, 2.0 * a_ + 1.0, x);
        const cplx f2 = gauss_2f1(a_ + 1.0, a_ + 1.0, 2.0 * a_ + 1.0, x);
        const cplx H1 = pre1_ * std::exp((-0.5 - a_) * ls) * f1;
        const cplx H2 = pre2_ * std::exp((-1.0 - a_) * ls) * std::sqrt(sigma - 1.0) * f2;
        return {H1, H2};
    }

    GreenKernel near(double sigma) const
    {
        const double y = (sigma - 1.0) / sigma;
        const double ly = std::log(y);
        const double ls = std::log(sigma);
        const double hump = std::abs(a_) + 3.0;

        // F(a, a+1; 2a+1; 1-y), logarithmic case c = a + b
        cplx s1 = 0.0, c = 1.0, psi_n = psi_a_, psi_n1 = psi_a_ + 1.0 / a_;
        double psi_k = -euler_gamma, yn = 1.0;
        for (int n = 0; n < 5000; ++n) {
            const cplx t = c * (2.0 * psi_k - psi_n - psi_n1 - ly) * yn;
            s1 += t;
            if (n > hump && std::abs(t) <= 1e-17 * std::abs(s1)) break;
            const cplx an = a_ + double(n);
            c *= an * (an + 1.0) / ((n + 1.0) * (n + 1.0));
            psi_n += 1.0 / an;
            psi_n1 += 1.0 / (an + 1.0);
            psi_k += 1.0 / (n + 1.0);
            yn *= y;
        }
        // F(a+1, a+1; 2a+1; 1-y), logarithmic case c = a + b - 1
        cplx s2 = 0.0, d = 1.0, psi_b = psi_a_ + 1.0 / a_;
        double p1 = -euler_gamma, p2 = 1.0 - euler_gamma;
        yn = 1.0;
        for (int n = 0; n < 5000; ++n) {
            const cplx t = d * (ly - p1 - p2 + 2.0 * psi_b) * yn;
            s2 += t;
            if (n > hump && std::abs(t) <= 1e-17 * std::abs(s2)) break;
            const cplx bn = a_ + 1.0 + double(n);
            d *= bn * bn / ((n + 1.0) * (n + 2.0));
            psi_b += 1.0 / bn;
            p1 += 1.0 / (n + 1.0);
            p2 += 1.0 / (n + 2.0);
            yn *= y;
        }
        const cplx H1 = -rho_ / (4.0 * pi) * std::exp((-0.5 - a_) * ls) * s1;
        const cplx H2 = std::exp((-1.0 - a_) * ls) * std::sqrt(sigma - 1.0) * (-I / (4.0 * pi)) *
                        (1.0 / y + a_ * a_ * s2);
        return {H1, H2};
    }

    cplx rho_, a_, pre1_, pre2_, psi_a_;
};

namespace detail {

// Euler integrals for H1, H2; needs Re(i rho) > 0.
inline GreenKernel kernel_by_integral(double sigma, cplx rho)
{
    const cplx a = I * rho;
    if (!(a.real() > 0.0))
        throw DomainError("specfun: the Euler integral for H diverges unless Im rho < 0");
    const int m = std::max(2, int(std::ceil(3.0 / a.real())));
    auto integrand = [&](double t, double one_minus_t, double jac, bool second) -> cplx {
        const cplx base = std::exp(a * std::log(t) + (a - 1.0) * std::log(one_minus_t)) * jac;
        const double st = sigma - t;
        return second ? base * std::exp((-a - 1.0) * std::log(st)) : base * std::exp(-a * std::log(st));
    };
    auto integrate = [&](bool second) {
        // t = v^3 on [0, 1/2]
        auto f_low = [&](double v) -> cplx {
            if (v <= 0.0) return 0.0;
            const double t = v * v * v;
            return integrand(t, 1.0 - t, 3.0 * v * v, second);
        };
        // 1 - t = u^m on [1/2, 1]; the factor (1-t)^(a-1) dt becomes m u^(m a - 1) du
        auto f_high = [&](double u) -> cplx {
            if (u <= 0.0) return 0.0;
            const double omt = std::pow(u, m);
            const double t = 1.0 - omt;
            const cplx base = std::exp(a * std::log(t) + (double(m) * a - 1.0) * std::log(u)) * double(m);
            const double st = sigma - t;
            return second ? base * std::exp((-a - 1.0) * std::log(st)) : base * std::exp(-a * std::log(st));
        };
        const cplx lo = quad::adaptive(f_low, 0.0, std::cbrt(0.5), 1e-14).value;
        const cplx hi = quad::adaptive(f_high, 0.0, std::pow(0.5, 1.0 / m), 1e-14).value;
        return lo + hi;
    };
    const cplx H1 = -rho / (4.0 * pi) / std::sqrt(sigma) * integrate(false);
    const cplx H2 = rho / (4.0 * pi) * std::sqrt(sigma - 1.0) * integrate(true);
    return {H1, H2};
}

}  // namespace detail

inline GreenKernel h_kernel(double sigma, cplx rho,
                            KernelRepresentation rep = KernelRepresentation::hypergeometric)
{
    if (!(sigma >= 1.0)) throw DomainError("specfun: h_kernel needs sigma >= 1");
    if (rep == KernelRepresentation::integral) {
        if (!(sigma > 1.0))
            throw DomainError("specfun: the kernel H(sigma) is singular at sigma = 1");
        return detail::kernel_by_integral(sigma, rho);
    }
    return KernelNode(rho).eval(sigma);
}

using KernelFunction = std::function<GreenKernel(double)>;

// Max entrywise residual of the first-order system satisfied by H, relative to max(|H1|, |H2|),
// with derivatives taken by the 4th-order central stencil of the given step.
inline double greenh_residual(double sigma, cplx rho, double step, const KernelFunction& H)
{
    if (!(sigma - 2.0 * step > 1.0) || !(step > 0.0))
        throw DomainError("specfun: greenh_residual needs sigma - 2 step > 1");
    const GreenKernel m2 = H(sigma - 2 * step), m1 = H(sigma - step), p1 = H(sigma + step),
                      p2 = H(sigma + 2 * step), c = H(sigma);
    auto deriv = [&](cplx GreenKernel::*f) {
        return (m2.*f - 8.0 * (m1.*f) + 8.0 * (p1.*f) - p2.*f) / (12.0 * step);
    };
    const double r = std::sqrt(sigma * (sigma - 1.0));
    const double w = 0.5 * std::sqrt((sigma - 1.0) / sigma);
    const double q = 0.5 / r;
    const cplx LH1 = r * deriv(&GreenKernel::H1) + w * c.H1;
    const cplx LH2 = r * deriv(&GreenKernel::H2) + w * c.H2;
    // [[rho, iL], [iL, rho]] H = -i diag(q H3, q H2), with H3 = H2 and H4 = H1
    const cplx e11 = rho * c.H1 + I * LH2 + I * q * c.H2;
    const cplx e12 = rho * c.H2 + I * LH1;
    const cplx e21 = I * LH1 + rho * c.H2;
    const cplx e22 = I * LH2 + rho * c.H1 + I * q * c.H2;
    const double scale = std::max(std::abs(c.H1), std::abs(c.H2));
    return std::max({std::abs(e11), std::abs(e12), std::abs(e21), std::abs(e22)}) / scale;
}

inline double greenh_residual(double sigma, cplx rho, double step = 1e-4)
{
    const KernelNode node(rho);
    return greenh_residual(sigma, rho, step, [&](double s) { return node.eval(s); });
}

// Free Green's function G = A H B of the resolvent (D + rho)^{-1} on the plane.
inline Mat2c green_free(const Point& z1, const Point& z2, cplx rho)
{
    if (!(rho.imag() < 0.0)) throw DomainError("specfun: the free resolvent needs Im rho < 0");
    const PairPhases ph = pair_phases(z1, z2);
    return sandwich(ph, h_kernel(sigma_invariant(z1, z2), rho).matrix());
}

}  // namespace selberg
