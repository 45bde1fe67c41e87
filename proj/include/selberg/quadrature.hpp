#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace selberg::quad {

template <class T>
struct Result {
    T value;
    double error;
};

// Adaptive Gauss-Kronrod (G30/K61) on [a, b]; infinite limits are allowed.
template <class F>
auto adaptive(F&& f, double a, double b, double rel_tol = 1e-13, unsigned max_depth = 25)
{
    using T = decltype(f(a));
    double err = 0.0;
    T v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, rel_tol, &err);
    return Result<T>{v, err};
}

// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct Rule {
    std::vector<double> x, w;
};

template <unsigned N>
Rule gauss_legendre()
{
    using G = boost::math::quadrature::gauss<double, N>;
    Rule r;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < ab.size(); ++i) {
        if (ab[i] == 0.0) {
            r.x.push_back(0.0);
            r.w.push_back(wt[i]);
            continue;
        }
        r.x.push_back(-ab[i]);
        r.w.push_back(wt[i]);
        r.x.push_back(ab[i]);
        r.w.push_back(wt[i]);
    }
    return r;
}

// Composite Gauss-Legendre rule with `panels` equal panels on [a, b].
inline Rule composite(const Rule& base, double a, double b, int panels)
{
    Rule r;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (std::size_t i = 0; i < base.x.size(); ++i) {
            r.x.push_back(lo + 0.5 * h * (base.x[i] + 1.0));
            r.w.push_back(0.5 * h * base.w[i]);
        }
    }
    return r;
}

template <class F>
auto apply(const Rule& r, F&& f)
{
    using T = decltype(f(0.0));
    T s{};
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(r.x[i]);
    return s;
}

}  // namespace selberg::quad
