#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "selberg/fuchsian.hpp"
#include "selberg/kernels.hpp"
#include "selberg/quadrature.hpp"
#include "selberg/testfn.hpp"

namespace selberg {

namespace detail {

inline double pairwise_sum(const double* v, std::size_t n)
{
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t m = n / 2;
    return pairwise_sum(v, m) + pairwise_sum(v + m, n - m);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace detail

// Classes of total length <= L, with the same fingerprint.
inline LengthSpectrum truncate(const LengthSpectrum& s, double L)
{
    if (L > s.cutoff * (1 + 1e-12))
        throw ContractError("traceformula: cannot extend a spectrum enumerated to " + std::to_string(s.cutoff) +
                            " up to " + std::to_string(L));
    LengthSpectrum out = s;
    out.cutoff = L;
    out.classes.clear();
    for (const auto& c : s.classes)
        if (c.length() <= L * (1 + 1e-12)) out.classes.push_back(c);
    return out;
}

inline double identity_term(const TestFunction& h, double area) { return area / (4.0 * pi) * coth_integral(h); }

// c in N(u) <= c e^u / u, the largest ratio seen over the upper half of the enumerated range.
inline double class_growth_constant(const LengthSpectrum& s)
{
    double c = 0.0, count = 0.0;
    for (const auto& cl : s.classes) {
        count += double(cl.multiplicity);
        const double u = cl.length();
        if (u >= s.cutoff / 2) c = std::max(c, count * u * std::exp(-u));
    }
    return c;
}

// Bound on the classes beyond the cutoff: density c e^u / u against the weight u |g| / (2 sinh(u/2)).
inline double geometric_tail(const TestFunction& h, const LengthSpectrum& s)
{
    const double c = class_growth_constant(s);
    if (c == 0.0) return 0.0;
    auto f = [&](double u) {
        const double e = h.g_envelope(u);
        return e == 0.0 ? 0.0 : c * e * std::exp(u / 2) / (1.0 - std::exp(-u));
    };
    return quad::adaptive(f, s.cutoff, std::numeric_limits<double>::infinity(), 1e-6).value;
}

struct ClassContribution {
    double primitive_length;
    int power;
    int chi;
    long multiplicity;
    double value;
};

struct GeometricTerm {
    double value = 0.0;
    double tail = 0.0;
    std::vector<ClassContribution> per_class;
};

inline GeometricTerm geometric_term(const TestFunction& h, const LengthSpectrum& s,
                                    double tolerance = std::numeric_limits<double>::infinity())
{
    GeometricTerm out;
    std::vector<double> terms;
    terms.reserve(s.classes.size());
    for (const auto& c : s.classes) {
        const double u = c.length();
        const double v =
            double(c.multiplicity) * c.chi_value * c.primitive_length * h.g(u) / (2.0 * std::sinh(u / 2.0));
        out.per_class.push_back({c.primitive_length, c.power, c.chi_value, c.multiplicity, v});
        terms.push_back(v);
    }
    out.value = detail::pairwise_sum(terms);
    out.tail = geometric_tail(h, s);
    if (out.tail > tolerance)
        throw TailTooLarge("traceformula: geometric tail bound " + std::to_string(out.tail) + " at L = " +
                               std::to_string(s.cutoff) + " exceeds the tolerance; raise L",
                           out.tail);
    return out;
}

struct TraceEvaluation {
    double identity_term = 0.0;
    double geometric_term = 0.0;
    double total = 0.0;
    double tail = 0.0;
    std::vector<ClassContribution> per_class;
    std::string test_function;
    double cutoff = 0.0;
    double area = 0.0;
    std::string group_fingerprint;
};

inline TraceEvaluation trace_rhs(const TestFunction& h, const LengthSpectrum& s, double area,
                                 double tolerance = std::numeric_limits<double>::infinity())
{
    TraceEvaluation e;
    e.identity_term = identity_term(h, area);
    GeometricTerm g = geometric_term(h, s, tolerance);
    e.geometric_term = g.value;
    e.tail = g.tail;
    e.per_class = std::move(g.per_class);
    e.total = e.identity_term + e.geometric_term;
    e.test_function = h.describe();
    e.cutoff = s.cutoff;
    e.area = area;
    e.group_fingerprint = s.group_fingerprint;
    return e;
}

struct EigenvalueEstimate {
    double rho = 0.0;
    double height = 0.0;
    double stability = 0.0;
};

struct ScanOptions {
    double threshold = 0.5;       // minimal peak response
    double grid_fraction = 0.25;  // grid step in units of eps
    double tail_tolerance = 0.1;  // bound on the neglected geometric sum, in units of one eigenvalue
};

struct Peak {
    double a;
    double height;
};

// Local maxima of response(a) on a grid over (0, rho_max], refined by Brent's method.
inline std::vector<Peak> find_peaks(const std::function<double(double)>& response, double rho_max, double eps,
                                    const ScanOptions& opt = {})
{
    const double step = opt.grid_fraction * eps;
    const int n = int(std::ceil(rho_max / step));
    std::vector<double> a(n + 2), r(n + 2);
    for (int i = 0; i < n + 2; ++i) {
        a[i] = i * step;
        r[i] = response(a[i]);
    }
    std::vector<Peak> out;
    for (int i = 1; i <= n; ++i) {
        if (!(r[i] >= r[i - 1] && r[i] > r[i + 1]) || r[i] < opt.threshold) continue;
        const auto m = boost::math::tools::brent_find_minima([&](double x) { return -response(x); }, a[i - 1],
                                                             a[i + 1], 40);
        if (m.first <= rho_max) out.push_back({m.first, -m.second});
    }
    return out;
}

struct EigenvalueScan {
    std::vector<EigenvalueEstimate> estimates;
    std::vector<EigenvalueEstimate> discarded;
    double zero_response = 0.0;  // response of the centred pair, twice the zero-mode weight
    double cutoff = 0.0;
    double eps = 0.0;
    double tail = 0.0;
};

// The tail bound of the peaked pair at resolution eps does not depend on its centre.
inline double scan_tail(const LengthSpectrum& s, double eps)
{
    return geometric_tail(TestFunction::peaked_pair(0.0, eps), s);
}

// Scan at L = spectrum.cutoff - dL and compare with the full spectrum at L + dL.
inline EigenvalueScan eigenvalue_scan(const LengthSpectrum& spectrum, double area, double rho_max, double eps,
                                      double dL, const ScanOptions& opt = {})
{
    if (!(dL > 0.0) || !(spectrum.cutoff - dL > 0.0))
        throw ContractError("traceformula: the scan needs a spectrum enumerated to L + dL with L > 0");
    const LengthSpectrum base = truncate(spectrum, spectrum.cutoff - dL);
    EigenvalueScan out;
    out.cutoff = base.cutoff;
    out.eps = eps;
    out.tail = scan_tail(base, eps);
    if (out.tail > opt.tail_tolerance)
        throw TailTooLarge("traceformula: L = " + std::to_string(base.cutoff) + " is insufficient for eps = " +
                               std::to_string(eps) + " (tail bound " + std::to_string(out.tail) + ")",
                           out.tail);
    auto response = [&](const LengthSpectrum& s) {
        return [&area, &s, eps](double a) { return trace_rhs(TestFunction::peaked_pair(a, eps), s, area).total; };
    };
    out.zero_response = response(base)(0.0);
    const auto p0 = find_peaks(response(base), rho_max, eps, opt);
    const auto p1 = find_peaks(response(spectrum), rho_max + 5 * eps, eps, opt);
    for (const auto& p : p0) {
        double shift = std::numeric_limits<double>::infinity();
        for (const auto& q : p1) shift = std::min(shift, std::abs(q.a - p.a));
        const EigenvalueEstimate e{p.a, p.height, shift};
        (shift > 5 * eps ? out.discarded : out.estimates).push_back(e);
    }
    return out;
}

// Smallest eps on a geometric grid whose scan tail passes at the spectrum's cutoff.
inline double attainable_resolution(const LengthSpectrum& s, const ScanOptions& opt = {})
{
    for (double eps = 0.01; eps < 100.0; eps *= 1.05)
        if (scan_tail(s, eps) <= opt.tail_tolerance) return eps;
    return std::numeric_limits<double>::infinity();
}

struct WeylReport {
    double coefficient = 0.0;  // fitted c in N(rho) ~ c rho^2
    double expected = 0.0;     // A / 4 pi
    double max_relative_deviation = 0.0;
    double count_at_max = 0.0;
};

inline WeylReport weyl_check(const std::vector<EigenvalueEstimate>& est, double area, double rho_max)
{
    std::vector<EigenvalueEstimate> e = est;
    std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.rho < b.rho; });
    WeylReport r;
    r.expected = area / (4.0 * pi);
    double count = 0.0, num = 0.0, den = 0.0;
    for (const auto& x : e) {
        if (x.rho > rho_max) break;
        count += std::max(1.0, std::round(x.height));
        if (x.rho < rho_max / 2 || x.rho <= 0.0) continue;
        const double r2 = x.rho * x.rho;
        num += count * r2;
        den += r2 * r2;
        r.max_relative_deviation = std::max(r.max_relative_deviation, std::abs(count - r.expected * r2) / (r.expected * r2));
    }
    r.count_at_max = count;
    r.coefficient = den > 0.0 ? num / den : 0.0;
    return r;
}

}  // namespace selberg
