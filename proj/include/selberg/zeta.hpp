#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "selberg/fuchsian.hpp"
#include "selberg/specfun.hpp"
#include "selberg/traceformula.hpp"

namespace selberg {

struct ZetaOptions {
    double margin = 0.05;  // Re s > 1 + margin
    double tolerance = std::numeric_limits<double>::infinity();
    // Sum exactly the records with n l <= L instead of closing the power sum of each primitive class.
    bool shared_truncation = false;
};

struct ZetaEvaluation {
    cplx s;
    cplx log_z;
    double tail = 0.0;
    std::string fingerprint;
};

namespace detail {

inline void check_half_plane(cplx s, const ZetaOptions& opt)
{
    if (!(s.real() > 1.0 + opt.margin))
        throw DomainError("zeta: the Euler product needs Re s > " + std::to_string(1.0 + opt.margin) + ", got " +
                          std::to_string(s.real()));
}

// Primitive classes beyond the cutoff, each bounded by its leading term.
inline double zeta_tail(const LengthSpectrum& sp, double re_s, double weight_power)
{
    const double c = class_growth_constant(sp);
    if (c == 0.0) return 0.0;
    auto f = [&](double u) {
        return c * std::pow(u, weight_power - 1.0) * std::exp(u * (1.0 - re_s)) / (1.0 - std::exp(-u));
    };
    return quad::adaptive(f, sp.cutoff, std::numeric_limits<double>::infinity(), 1e-6).value;
}

}  // namespace detail

inline ZetaEvaluation log_zeta_euler(cplx s, const LengthSpectrum& sp, const ZetaOptions& opt = {})
{
    detail::check_half_plane(s, opt);
    ZetaEvaluation out{s, 0.0, 0.0, sp.group_fingerprint};
    for (const auto& c : sp.classes) {
        if (c.power != 1) continue;
        const double l = c.primitive_length;
        cplx sum = 0.0;
        for (int k = 0;; ++k) {
            if (std::exp(-l * (k + s.real())) < 1e-18) break;
            sum += std::log(1.0 - double(c.chi_value) * std::exp(-l * (double(k) + s)));
        }
        out.log_z += double(c.multiplicity) * sum;
    }
    out.tail = detail::zeta_tail(sp, s.real(), 0.0);
    if (out.tail > opt.tolerance)
        throw TailTooLarge("zeta: Euler product tail " + std::to_string(out.tail) + " exceeds the tolerance; raise L",
                           out.tail);
    return out;
}

inline cplx zeta_log_deriv(cplx s, const LengthSpectrum& sp, const ZetaOptions& opt = {})
{
    detail::check_half_plane(s, opt);
    cplx out = 0.0;
    for (const auto& c : sp.classes) {
        const double l = c.primitive_length;
        if (opt.shared_truncation) {
            const double u = c.length();
            out += double(c.multiplicity * c.chi_value) * l * std::exp(-u * s) / (1.0 - std::exp(-u));
            continue;
        }
        if (c.power != 1) continue;
        cplx sum = 0.0;
        double chi_n = 1.0;
        for (int n = 1; std::exp(-n * l * s.real()) >= 1e-18; ++n) {
            chi_n *= c.chi_value;
            sum += chi_n * l * std::exp(-double(n) * l * s) / (1.0 - std::exp(-n * l));
        }
        out += double(c.multiplicity) * sum;
    }
    const double tail = detail::zeta_tail(sp, s.real(), 1.0);
    if (tail > opt.tolerance)
        throw TailTooLarge("zeta: log-derivative tail " + std::to_string(tail) + " exceeds the tolerance; raise L",
                           tail);
    return out;
}

struct ResolventConsistency {
    double geometric = 0.0;      // geometric side of the trace formula for the resolvent difference
    double zeta_side = 0.0;      // Z'/Z(s)/(2s-1) - Z'/Z(sigma)/(2sigma-1)
    double geometric_residual = 0.0;
    double identity = 0.0;       // identity term for the resolvent difference
    double digamma_side = 0.0;   // -(A/2pi)(psi(s-1/2) - psi(sigma-1/2)) + (A/4pi)(1/(sigma-1/2) - 1/(s-1/2))
    double identity_residual = 0.0;
};

inline double resolvent_digamma_side(double s, double sigma, double area)
{
    return -area / (2.0 * pi) * (digamma(s - 0.5) - digamma(sigma - 0.5)) +
           area / (4.0 * pi) * (1.0 / (sigma - 0.5) - 1.0 / (s - 0.5));
}

inline ResolventConsistency resolvent_consistency(double s, double sigma, const LengthSpectrum& sp, double area,
                                                  bool shared_truncation = true)
{
    ResolventConsistency r;
    ZetaOptions opt;
    opt.shared_truncation = shared_truncation;
    r.zeta_side = (zeta_log_deriv(s, sp, opt) / (2.0 * s - 1.0) - zeta_log_deriv(sigma, sp, opt) / (2.0 * sigma - 1.0)).real();
    r.digamma_side = resolvent_digamma_side(s, sigma, area);
    if (s == sigma) return r;
    const auto h = TestFunction::resolvent_difference(s, sigma);
    r.geometric = geometric_term(h, sp).value;
    r.identity = identity_term(h, area);
    r.geometric_residual = std::abs(r.geometric - r.zeta_side);
    r.identity_residual = std::abs(r.identity - r.digamma_side);
    return r;
}

struct ProductConstants {
    std::optional<int> zero_modes_half;             // N
    std::optional<double> gamma_d;                  // generalised Euler constant
    std::optional<double> leading_coefficient;      // Z^(2N)(1/2) / (2N)!
    std::optional<int> product_start;               // first index in the eigenvalue product, N when unset
};

struct ProductValue {
    cplx value;
    double tail = 0.0;  // bound on |log| of the omitted eigenvalue factors
};

// Eigenvalues are listed from m = 0 and include half of the zero modes.
inline ProductValue zeta_product_rep(cplx s, const std::vector<double>& eigenvalues, const ProductConstants& k,
                                     double area)
{
    if (!k.zero_modes_half || !k.gamma_d || !k.leading_coefficient)
        throw ConfigError("zeta: the product representation needs N, gamma_D and Z^(2N)(1/2)/(2N)! in the config");
    const int N = *k.zero_modes_half;
    if (N < 0) throw ConfigError("zeta: N must be non-negative");
    const int start = k.product_start.value_or(N);
    const double m = area / (2.0 * pi);
    const long mi = std::lround(m);
    if (std::abs(m - double(mi)) > 1e-9) throw ContractError("zeta: A/2pi must be an integer for a closed surface");
    const cplx w = s - 0.5;
    cplx bracket = std::pow(2.0 * pi, -w) * std::exp(s * s - 0.25);
    const cplx G = barnes_g(s + 0.5);
    bracket *= G * G;
    cplx v = *k.leading_coefficient * std::pow(w, 2 * N) * std::exp(w * w * *k.gamma_d) * std::exp(w * m);
    for (long i = 0; i < mi; ++i) v *= bracket;
    double rho_last = 0.0;
    for (std::size_t i = std::size_t(std::max(start, 0)); i < eigenvalues.size(); ++i) {
        const double r = eigenvalues[i];
        if (r == 0.0) throw ContractError("zeta: a zero eigenvalue lies inside the product range");
        const cplx x = w * w / (r * r);
        v *= (1.0 + x) * std::exp(-x);
        rho_last = std::max(rho_last, std::abs(r));
    }
    ProductValue out{v, 0.0};
    if (rho_last > 0.0) out.tail = m * std::pow(std::abs(w), 4) / (4.0 * rho_last * rho_last);
    return out;
}

// Order of the zero of f at s0 from the slope of log|f| along the real direction.
template <class F>
double measured_zero_order(F&& f, cplx s0, double d1 = 1e-3, double d2 = 1e-4)
{
    const double a = std::log(std::abs(f(s0 + d1))), b = std::log(std::abs(f(s0 + d2)));
    return (a - b) / (std::log(d1) - std::log(d2));
}

}  // namespace selberg
