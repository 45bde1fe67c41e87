#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "selberg/kernels.hpp"

using namespace selberg;

namespace {

Point random_point(std::mt19937_64& rng, double spread = 0.6)
{
    std::uniform_real_distribution<double> U(-spread, spread);
    return Point(U(rng), std::exp(U(rng)));
}

GroupElement random_sl2(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    return GroupElement::rotation(U(rng)) * GroupElement::boost(U(rng)) * GroupElement::rotation(U(rng));
}

double max_abs(const Mat2c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(PointPair, PhiIsImaginaryAndSymmetric)
{
    const auto h = TestFunction::gaussian(1.0);
    PointPairOptions plain;
    plain.symmetrize = false;
    const PointPairKernel K(h), Kp(h, plain);
    for (double s : {1.2, 2.0, 3.5, 10.0, 40.0}) {
        const PhiValue a = K.phi(s), b = Kp.phi(s);
        EXPECT_LT(std::abs(b.phi1.real()), 1e-10);
        EXPECT_LT(std::abs(b.phi2.real()), 1e-10);
        EXPECT_LT(std::abs(a.phi1 - b.phi1), 1e-12);
        EXPECT_LT(std::abs(a.phi2 - b.phi2), 1e-12);
        const Mat2c m = a.matrix();
        EXPECT_EQ(m(0, 1), m(1, 0));
    }
}

TEST(PointPair, RefinementAndContourStability)
{
    const auto h = TestFunction::gaussian(1.0);
    PointPairOptions fine, shifted;
    fine.max_panel = 0.4;
    shifted.contour_shift = 0.25;
    const PointPairKernel K(h), Kf(h, fine), Ks(h, shifted);
    EXPECT_GT(Kf.node_count(), K.node_count());
    for (double s : {1.5, 2.0, 7.0}) {
        EXPECT_LT(std::abs(K.phi(s).phi1 - Kf.phi(s).phi1), 1e-9);
        EXPECT_LT(std::abs(K.phi(s).phi2 - Kf.phi(s).phi2), 1e-9);
        EXPECT_LT(std::abs(K.phi(s).phi1 - Ks.phi(s).phi1), 1e-9);
        EXPECT_LT(std::abs(K.phi(s).phi2 - Ks.phi(s).phi2), 1e-9);
    }
    EXPECT_LT(K.truncation(), 1e-15);
}

TEST(PointPair, OffDiagonalSingularityAtCoincidence)
{
    // (sigma - 1)^{1/2} Phi2 -> -(i / 2 pi) g(0)
    const auto h = TestFunction::gaussian(1.0);
    const PointPairKernel K(h);
    const double target = h.g(0.0) / (2.0 * pi);
    double prev = 1.0;
    for (double e : {1e-4, 1e-6, 1e-8}) {
        const cplx v = std::sqrt(e) * K.phi(1.0 + e).phi2;
        const double dev = std::abs(v - cplx(0.0, -target));
        EXPECT_LT(dev, prev);
        prev = dev;
    }
    EXPECT_LT(prev, 1e-3 * target);
    EXPECT_THROW(K.phi(1.0), DomainError);
}

TEST(PointPair, DecayFit)
{
    const PointPairKernel K(TestFunction::gaussian(1.0));
    const DecayFit f1 = fit_phi_decay(K, 0), f2 = fit_phi_decay(K, 1);
    EXPECT_GE(f1.epsilon, 0.4);
    EXPECT_GE(f2.epsilon, 0.4);
    for (double s = 2.0; s <= 100.0; s *= 1.3)
        EXPECT_LE(std::abs(K.phi(s).phi1), f1.C * std::pow(s, -1.0 - f1.epsilon) * (1 + 1e-12));
}

TEST(PointPair, CacheIsConsistentUnderThreads)
{
    const PointPairKernel K(TestFunction::gaussian(0.7));
    std::vector<double> sig;
    for (int i = 0; i < 64; ++i) sig.push_back(1.1 + 0.37 * i);
    std::vector<PhiValue> a(sig.size()), b(sig.size());
    std::thread t1([&] { for (std::size_t i = 0; i < sig.size(); ++i) a[i] = K.phi(sig[i]); });
    std::thread t2([&] { for (std::size_t i = sig.size(); i-- > 0;) b[i] = K.phi(sig[i]); });
    t1.join();
    t2.join();
    for (std::size_t i = 0; i < sig.size(); ++i) {
        EXPECT_EQ(a[i].phi1, b[i].phi1);
        EXPECT_EQ(a[i].phi1, K.phi_uncached(sig[i]).phi1);
    }
    EXPECT_EQ(K.cache_size(), sig.size());
}

TEST(KernelEval, Equivariance)
{
    const PointPairKernel K(TestFunction::gaussian(1.0));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        const Point z1 = random_point(rng), z2 = random_point(rng);
        const GroupElement g = random_sl2(rng);
        const Mat2c lhs = kernel_eval(K, moebius_act(g, z1), moebius_act(g, z2));
        const Mat2c rhs = factor_J(g, z1, Weight{1}) * kernel_eval(K, z1, z2) * factor_J(g, z2, Weight{1}).inverse();
        EXPECT_LT(max_abs(lhs - rhs), 1e-9);
    }
}

TEST(KernelEval, HermitianPairStructure)
{
    // Diagonal blocks satisfy K(z', z) = K(z, z')^dagger; the off-diagonal block is anti-hermitian.
    const PointPairKernel K(TestFunction::gaussian(1.0));
    std::mt19937_64 rng(6);
    for (int i = 0; i < 20; ++i) {
        const Point z1 = random_point(rng), z2 = random_point(rng);
        const Mat2c a = kernel_eval(K, z1, z2), b = kernel_eval(K, z2, z1).adjoint();
        EXPECT_LT(std::abs(a(0, 0) - b(0, 0)), 1e-10);
        EXPECT_LT(std::abs(a(1, 1) - b(1, 1)), 1e-10);
        EXPECT_LT(std::abs(a(0, 1) + b(0, 1)), 1e-10);
        EXPECT_LT(std::abs(a(1, 0) + b(1, 0)), 1e-10);
    }
}

TEST(KernelEval, ExponentialBound)
{
    const auto h = TestFunction::gaussian(1.0);
    const PointPairKernel K(h);
    const double rate = 0.5 + h.beta();
    const Point o(0.2, 1.3);
    auto at = [&](double d) { return max_abs(kernel_eval(K, o, Point(0.2, 1.3 * std::exp(d)))); };
    double C = 0.0;
    for (double d = 2.0; d <= 5.0; d += 0.25) C = std::max(C, at(d) * std::exp(rate * d));
    for (double d = 5.0; d <= 8.0; d += 0.25) EXPECT_LE(at(d), C * std::exp(-rate * d));
}

TEST(DiagonalTrace, GaussianSeries)
{
    // mpmath: (1/2pi) int rho e^{-rho^2} coth(pi rho) d rho
    EXPECT_NEAR(diagonal_trace_gaussian_series(1.0), 0.18350466345507957, 1e-13);
    for (double t : {0.2, 0.5, 1.0, 2.0})
        EXPECT_NEAR(kernel_diagonal_trace(TestFunction::gaussian(t)), diagonal_trace_gaussian_series(t), 1e-10);
    EXPECT_GT(kernel_diagonal_trace(TestFunction::gaussian(1.0)), 0.0);
    EXPECT_GT(kernel_diagonal_trace(TestFunction::peaked_pair(2.0, 0.05)), 0.0);
}

TEST(DiagonalTrace, CoincidenceLimit)
{
    const auto h = TestFunction::gaussian(1.0);
    const PointPairKernel K(h);
    const double target = kernel_diagonal_trace(h);
    const Point z(0.3, 1.2);
    const Mat2c M = kernel_eval(K, z, Point(0.3, 1.2 * std::exp(1e-3)));
    EXPECT_LT(std::abs(M.trace() - target), 1e-4);
    const Mat2c M2 = kernel_eval(K, z, Point(0.3 + 1.2 * 1e-5, 1.2));
    EXPECT_LT(std::abs(M2.trace() - target), 1e-6);
}

class AutomorphicTest : public ::testing::Test {
protected:
    AutomorphicTest()
        : p(build_bolza()), ms(build_multiplier({-1, 1, -1, 1}, Weight{1}, p)), P(p, ms),
          K(TestFunction::gaussian(0.25))
    {
    }

    std::pair<GroupElement, int> element(const std::vector<int>& signed_letters) const
    {
        const Word w = Word::from_signed(signed_letters);
        return {evaluate(p, w), evaluate_chi(ms, w)};
    }

    SurfacePresentation p;
    MultiplierSystem ms;
    PoincareSum P;
    PointPairKernel K;
};

TEST_F(AutomorphicTest, TwoSlotAutomorphy)
{
    const Point z1(0.1, 1.1), z2(-0.2, 0.8);
    const double ball = 6.0;
    const Mat2c base = automorphic_kernel(K, z1, z2, P, ball).value;
    EXPECT_GT(max_abs(base), 1e-3);
    const std::vector<std::vector<int>> words = {{}, {1}, {-2}, {3}, {-4}};
    for (const auto& w1 : words)
        for (const auto& w2 : words) {
            const auto [g1, c1] = element(w1);
            const auto [g2, c2] = element(w2);
            const Mat2c lhs = automorphic_kernel(K, moebius_act(g1, z1), moebius_act(g2, z2), P, ball).value;
            const Mat2c rhs =
                double(c1 * c2) * factor_J(g1, z1, Weight{1}) * base * factor_J(g2, z2, Weight{1}).inverse();
            EXPECT_LT(max_abs(lhs - rhs), 1e-7);
        }
}

TEST_F(AutomorphicTest, BallStability)
{
    const Point z1(0.1, 1.1), z2(0.3, 1.4);
    const PoincareValue a = automorphic_kernel(K, z1, z2, P, 6.0);
    const PoincareValue b = automorphic_kernel(K, z1, z2, P, 8.0);
    EXPECT_LT(max_abs(a.value - b.value), 1e-8);
    EXPECT_LT(a.tail, 1e-8);
    EXPECT_GT(b.terms, a.terms);
    EXPECT_THROW(automorphic_kernel(K, z1, z2, P, 1.0, 1e-12), TailTooLarge);
}

TEST_F(AutomorphicTest, CentralPairOnly)
{
    // A ball too small to reach any other orbit point keeps only +-Id.
    const Point z1(0.1, 1.1), z2(0.12, 1.05);
    const PoincareValue v = automorphic_kernel(K, z1, z2, P, 0.2);
    EXPECT_EQ(v.terms, 1u);
    EXPECT_LT(max_abs(v.value - kernel_eval(K, z1, z2)), 1e-15);
}

TEST_F(AutomorphicTest, GreenFunctionAutomorphy)
{
    const cplx rho(0.5, -3.0);
    EXPECT_THROW(green_automorphic(Point(0, 1), Point(0.1, 1.2), cplx(0.5, -0.2), P, 5.0), DomainError);
    const Point z1(0.1, 1.1), z2(-0.3, 0.9);
    const PoincareValue a = green_automorphic(z1, z2, rho, P, 8.0);
    const PoincareValue b = green_automorphic(z1, z2, rho, P, 10.0);
    EXPECT_LT(a.tail, 1e-8);
    EXPECT_LT(max_abs(a.value - b.value), 1e-8);
    for (const auto& w : std::vector<std::vector<int>>{{1}, {-3}, {2, 4}}) {
        const auto [g, c] = element(w);
        const Mat2c lhs = green_automorphic(moebius_act(g, z1), z2, rho, P, 8.0).value;
        const Mat2c rhs = double(c) * factor_J(g, z1, Weight{1}) * a.value;
        EXPECT_LT(max_abs(lhs - rhs), 1e-7);
    }
}

TEST(OrbitalIntegral, MatchesClosedFormAtSystole)
{
    const double l = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
    const auto h = TestFunction::gaussian(0.5);
    const PointPairKernel K(h);
    const OrbitalIntegral one = orbital_integral(K, l, 1);
    EXPECT_NEAR(one.quadrature, one.closed_form, 1e-6);
    EXPECT_NEAR(one.quadrature, one.closed_form, 1e-12);
    const OrbitalIntegral two = orbital_integral(K, l, 2);
    EXPECT_DOUBLE_EQ(two.closed_form, l * h.g(2 * l) / std::sinh(l));
    EXPECT_NEAR(two.quadrature, two.closed_form, 1e-12);
    const OrbitalIntegral far = orbital_integral(K, l, 7);
    EXPECT_LT(std::abs(far.closed_form), 1e-12);
    EXPECT_LT(std::abs(far.quadrature), 1e-12);
}

TEST(OrbitalIntegral, OtherLengths)
{
    const PointPairKernel K(TestFunction::gaussian(1.0));
    for (double l : {1.3, 2.4, 4.0}) {
        const OrbitalIntegral v = orbital_integral(K, l, 1);
        EXPECT_NEAR(v.quadrature, v.closed_form, 1e-10 + 1e-8 * std::abs(v.closed_form)) << l;
    }
}
