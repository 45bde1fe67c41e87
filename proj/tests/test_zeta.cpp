#include <gtest/gtest.h>

#include "selberg/zeta.hpp"

using namespace selberg;

namespace {

LengthSpectrum single_class(double l, int chi, double L)
{
    LengthSpectrum s;
    s.cutoff = L;
    for (int n = 1; n * l <= L; ++n) {
        GeodesicClass c;
        c.primitive_length = l;
        c.power = n;
        c.chi_value = n % 2 ? chi : 1;
        s.classes.push_back(c);
    }
    return s;
}

}  // namespace

TEST(EulerProduct, EmptyAndSingleClass)
{
    LengthSpectrum empty;
    empty.cutoff = 5.0;
    EXPECT_EQ(log_zeta_euler(2.0, empty).log_z, cplx(0.0));
    EXPECT_EQ(zeta_log_deriv(2.0, empty), cplx(0.0));

    const auto s = single_class(2.0, -1, 2.0);
    double direct = 0.0;
    for (int k = 0; k < 40; ++k) direct += std::log1p(std::exp(-2.0 * (k + 2.0)));
    EXPECT_NEAR(log_zeta_euler(2.0, s).log_z.real(), direct, 1e-15);
    EXPECT_EQ(log_zeta_euler(2.0, s).log_z.imag(), 0.0);
}

TEST(EulerProduct, DomainMargin)
{
    LengthSpectrum empty;
    EXPECT_THROW(log_zeta_euler(1.02, empty), DomainError);
    EXPECT_THROW(zeta_log_deriv(cplx(0.9, 3.0), empty), DomainError);
    EXPECT_NO_THROW(log_zeta_euler(1.06, empty));
}

TEST(LogDerivative, SingleClassGeometricSeries)
{
    const double l = 2.0;
    for (int chi : {1, -1}) {
        const auto s = single_class(l, chi, l);
        const cplx z(1.7, 0.4);
        cplx direct = 0.0;
        for (int k = 0; k < 60; ++k) {
            const cplx e = double(chi) * std::exp(-l * (double(k) + z));
            direct += l * e / (1.0 - e);
        }
        EXPECT_LT(std::abs(zeta_log_deriv(z, s) - direct), 1e-14);
    }
}

class BolzaZeta : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        const auto p = build_bolza();
        const auto ms = build_multiplier({1, -1, 1, -1}, Weight{1}, p);
        area_ = dirichlet_domain(p).area;
        EnumerationOptions opt;
        opt.budget = 50'000'000;
        s14_ = new LengthSpectrum(enumerate_geodesics(p, ms, 14.0, EnumerationMethod::pruned, opt));
        s12_ = new LengthSpectrum(truncate(*s14_, 12.0));
    }
    static void TearDownTestSuite()
    {
        delete s12_;
        delete s14_;
    }

    static inline double area_ = 0.0;
    static inline LengthSpectrum* s12_ = nullptr;
    static inline LengthSpectrum* s14_ = nullptr;
};

TEST_F(BolzaZeta, LogDerivativeMatchesFiniteDifference)
{
    const double h = 1e-5;
    for (cplx s : {cplx(2.0, 0.0), cplx(1.5, 0.7), cplx(3.0, -2.0)}) {
        const cplx fd = (log_zeta_euler(s + h, *s12_).log_z - log_zeta_euler(s - h, *s12_).log_z) / (2 * h);
        EXPECT_LT(std::abs(fd - zeta_log_deriv(s, *s12_)), 1e-8);
    }
}

TEST_F(BolzaZeta, HermitianSymmetry)
{
    const cplx s(1.4, 2.3);
    const cplx a = log_zeta_euler(s, *s12_).log_z, b = log_zeta_euler(std::conj(s), *s12_).log_z;
    EXPECT_LT(std::abs(b - std::conj(a)), 1e-12);
}

TEST_F(BolzaZeta, TruncationStability)
{
    const auto a = log_zeta_euler(2.0, *s12_), b = log_zeta_euler(2.0, *s14_);
    EXPECT_LT(std::abs(a.log_z - b.log_z), 1e-8);
    EXPECT_LT(std::abs(a.log_z - b.log_z), a.tail);
    EXPECT_LT(b.tail, a.tail);
}

TEST_F(BolzaZeta, ResolventConsistency)
{
    for (auto [s, sg] : {std::pair{2.0, 3.0}, std::pair{1.8, 2.6}}) {
        const auto shared = resolvent_consistency(s, sg, *s12_, area_);
        EXPECT_LT(shared.geometric_residual, 1e-10);
        const auto independent = resolvent_consistency(s, sg, *s12_, area_, false);
        EXPECT_LT(independent.geometric_residual, 1e-6);
        EXPECT_LT(shared.identity_residual, 1e-8);
    }
    const auto same = resolvent_consistency(2.0, 2.0, *s12_, area_);
    EXPECT_EQ(same.zeta_side, 0.0);
    EXPECT_EQ(same.digamma_side, 0.0);
}

TEST_F(BolzaZeta, FullResolventIdentity)
{
    for (auto [s, sg] : {std::pair{2.0, 3.0}, std::pair{1.8, 2.6}}) {
        const auto e = trace_rhs(TestFunction::resolvent_difference(s, sg), *s12_, area_);
        ZetaOptions opt;
        opt.shared_truncation = true;
        const double rhs = resolvent_digamma_side(s, sg, area_) +
                           (zeta_log_deriv(s, *s12_, opt) / (2 * s - 1) -
                            zeta_log_deriv(sg, *s12_, opt) / (2 * sg - 1)).real();
        EXPECT_NEAR(e.total, rhs, 1e-6);
    }
}

TEST(ResolventConsistency, IdentityHalfAtUnitArea)
{
    LengthSpectrum empty;
    const auto r = resolvent_consistency(2.0, 3.0, empty, 4 * pi);
    EXPECT_LT(r.identity_residual, 1e-8);
    EXPECT_EQ(r.geometric, 0.0);
}

TEST(ProductRep, RequiresConstants)
{
    ProductConstants k;
    EXPECT_THROW(zeta_product_rep(1.0, {1.0}, k, 8 * pi), ConfigError);
    k.zero_modes_half = 1;
    k.gamma_d = 0.3;
    EXPECT_THROW(zeta_product_rep(1.0, {1.0}, k, 8 * pi), ConfigError);
    k.leading_coefficient = 2.0;
    EXPECT_NO_THROW(zeta_product_rep(1.0, {0.0, 1.0}, k, 8 * pi));
    k.product_start = 0;
    EXPECT_THROW(zeta_product_rep(1.0, {0.0, 1.0}, k, 8 * pi), ContractError);
}

TEST(ProductRep, PlantedZeros)
{
    const double A = 4 * pi;
    ProductConstants k;
    k.zero_modes_half = 1;
    k.gamma_d = -0.4;
    k.leading_coefficient = 1.3;
    const std::vector<double> rho{0.0, 1.1, 2.37, 3.05, 3.9};
    auto Z = [&](cplx s) { return zeta_product_rep(s, rho, k, A).value; };
    for (double r : {2.37, 3.05})
        EXPECT_LT(std::abs(Z(cplx(0.5, r))), 1e-6 * std::abs(Z(cplx(0.5, r + 0.1))));
    EXPECT_EQ(Z(0.5), cplx(0.0));
    EXPECT_NEAR(measured_zero_order(Z, 0.5), 2.0, 1e-3);
    k.zero_modes_half = 2;
    EXPECT_NEAR(measured_zero_order(Z, 0.5), 4.0, 1e-3);
}

TEST(ProductRep, BarnesFactorAtThreeHalves)
{
    // G(2) = 1 leaves (2 pi)^{-1} e^2 in the bracket
    const double A = 8 * pi;
    ProductConstants k;
    k.zero_modes_half = 0;
    k.gamma_d = 0.25;
    k.leading_coefficient = 1.0;
    const cplx v = zeta_product_rep(1.5, {}, k, A).value;
    const double expected = std::exp(0.25) * std::exp(4.0) * std::pow(std::exp(2.0) / (2 * pi), 4);
    EXPECT_NEAR(v.real(), expected, 1e-12 * expected);
    EXPECT_EQ(v.imag(), 0.0);
}

TEST(ProductRep, TrivialZeroOrderFollowsBarnesFactor)
{
    const double A = 4 * pi;
    ProductConstants k;
    k.zero_modes_half = 0;
    k.gamma_d = 0.0;
    k.leading_coefficient = 1.0;
    auto Z = [&](cplx s) { return zeta_product_rep(s, {1.5, 2.5}, k, A).value; };
    for (int n : {0, 1, 2}) {
        const double order = measured_zero_order(Z, -0.5 - n);
        EXPECT_NEAR(order, 2.0 * (n + 1) * A / (2 * pi), 1e-2) << n;
    }
}

TEST(ProductRep, TruncationTail)
{
    ProductConstants k;
    k.zero_modes_half = 0;
    k.gamma_d = 0.0;
    k.leading_coefficient = 1.0;
    const auto v = zeta_product_rep(cplx(0.5, 1.0), {2.0, 4.0}, k, 4 * pi);
    EXPECT_NEAR(v.tail, 2.0 * 1.0 / (4.0 * 16.0), 1e-15);
}
