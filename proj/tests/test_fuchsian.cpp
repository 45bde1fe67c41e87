#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "selberg/fuchsian.hpp"

using namespace selberg;

namespace {

const double bolza_systole = 2.0 * std::acosh(1.0 + std::sqrt(2.0));

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const LengthSpectrum& bolza_spectrum(EnumerationMethod m)
{
    static std::map<EnumerationMethod, LengthSpectrum> cache;
    auto it = cache.find(m);
    if (it == cache.end()) {
        const auto p = build_bolza();
        const auto ms = build_multiplier({1, -1, 1, -1}, Weight{1}, p);
        it = cache.emplace(m, enumerate_geodesics(p, ms, 7.0, m)).first;
    }
    return it->second;
}

using Key = std::tuple<long long, int, int>;

std::map<Key, long> multiset(const LengthSpectrum& s)
{
    std::map<Key, long> m;
    for (const auto& c : s.classes) m[{std::llround(c.length() * 1e8), c.power, c.chi_value}] += c.multiplicity;
    return m;
}

}  // namespace

TEST(Word, FreeReductionAndParity)
{
    const Word w = Word::from_signed({1, 2, -2, 3, -3, -1});
    EXPECT_TRUE(w.empty());
    EXPECT_EQ(w.parity(), 0u);
    const Word u = Word::from_signed({1, -2, 3});
    EXPECT_EQ(u.parity(), 0b111u);
    EXPECT_EQ((u * u.inverse()).size(), 0u);
    EXPECT_EQ(u.power(2).parity(), 0u);
    EXPECT_EQ(Word::parse(u.to_string()), u);
    const Word c = Word::from_signed({2, 1, 3, -2});
    EXPECT_FALSE(c.cyclically_reduced());
    EXPECT_EQ(c.cyclic_reduction(), Word::from_signed({1, 3}));
    EXPECT_THROW(Word::from_signed({0}), ConfigError);
    EXPECT_THROW(Word::parse("1 x"), ConfigError);
}

TEST(Fuchsian, BolzaPresentation)
{
    const auto p = build_bolza();
    EXPECT_EQ(p.genus, 2);
    EXPECT_EQ(p.generators.size(), 4u);
    EXPECT_DOUBLE_EQ(p.area, 4.0 * pi);
    EXPECT_EQ(p.relator_sign, 1);
    const GroupElement r = evaluate(p, p.relator);
    EXPECT_LT(r.max_abs_diff_psl(GroupElement::identity()), 1e-8);
    for (const auto& g : p.generators) {
        EXPECT_NEAR(g.trace(), 2.0 * (1.0 + std::sqrt(2.0)), 1e-13);
        EXPECT_NEAR(translation_length(g), bolza_systole, 1e-12);
    }
}

TEST(Fuchsian, SystoleByWordEnumeration)
{
    const auto p = build_bolza();
    // all freely reduced words of length <= 6
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<GroupElement, int>> frontier{{GroupElement::identity(), -1}};
    for (int len = 1; len <= 6; ++len) {
        std::vector<std::pair<GroupElement, int>> next;
        for (const auto& [g, last] : frontier)
            for (int j = 0; j < 8; ++j) {
                if (last >= 0 && (j ^ 1) == last) continue;
                const GroupElement s = j % 2 == 0 ? p.generators[j / 2] : p.generators[j / 2].inverse();
                const GroupElement h = g * s;
                const auto c = classify_and_length(h);
                ASSERT_NE(c.kind, ElementClass::elliptic);
                ASSERT_NE(c.kind, ElementClass::parabolic);
                if (c.length) best = std::min(best, *c.length);
                next.push_back({h, j});
            }
        frontier.swap(next);
    }
    EXPECT_NEAR(best, bolza_systole, 1e-10);
    EXPECT_NEAR(bolza_systole, 3.05714183896199632254, 1e-14);
}

TEST(Fuchsian, DirichletDomainOfBolza)
{
    const auto F = dirichlet_domain(build_bolza());
    EXPECT_EQ(F.sides.size(), 8u);
    EXPECT_EQ(F.vertices.size(), 8u);
    EXPECT_NEAR(std::cosh(F.circumradius), 3.0 + 2.0 * std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(F.area, 4.0 * pi, 1e-9);
    for (const auto& s : F.pairings) EXPECT_EQ(s.word.size(), 1u);
}

TEST(Fuchsian, LoadPresentation)
{
    const auto bolza = build_bolza();
    const auto loaded = load_presentation(read_file(std::string(SELBERG_SOURCE_DIR) + "/configs/groups/bolza.group"));
    ASSERT_EQ(loaded.generators.size(), bolza.generators.size());
    for (std::size_t j = 0; j < loaded.generators.size(); ++j)
        EXPECT_LE(loaded.generators[j].max_abs_diff(bolza.generators[j]), 4e-15);
    EXPECT_EQ(loaded.relator, bolza.relator);
    EXPECT_EQ(loaded.area, bolza.area);
    EXPECT_EQ(load_presentation(presentation_to_config(bolza)).relator, bolza.relator);

    const auto g3 = load_presentation(read_file(std::string(SELBERG_SOURCE_DIR) + "/configs/groups/genus3.group"));
    EXPECT_EQ(g3.genus, 3);
    EXPECT_NEAR(g3.area, 8.0 * pi, 1e-15);
    EXPECT_NEAR(dirichlet_domain(g3).area, 8.0 * pi, 1e-8);

    std::string bad = presentation_to_config(bolza);
    const auto pos = bad.find("generator.2 = ");
    const auto eol = bad.find('\n', pos);
    bad.replace(pos, eol - pos, "generator.2 = 0.5 -1 1 0");
    try {
        load_presentation(bad);
        FAIL() << "elliptic generator accepted";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("generator 2 is elliptic"), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_presentation(presentation_to_config(bolza) + "area = 10\n"), ConfigError);
    EXPECT_THROW(load_presentation(presentation_to_config(bolza) + "colour = red\n"), ConfigError);
    EXPECT_THROW(load_presentation("genus = 2\nrelator = 1 -2 3 -4 -1 2 -3 4\n"), ConfigError);
    std::string wrong_relator = presentation_to_config(bolza);
    wrong_relator.replace(wrong_relator.find("relator = "), std::string::npos, "relator = 1 2 3 4 -1 -2 -3 -4\n");
    EXPECT_THROW(load_presentation(wrong_relator), ConfigError);
}

TEST(Fuchsian, Multiplier)
{
    const auto p = build_bolza();
    const auto trivial = build_multiplier({1, 1, 1, 1}, Weight{1}, p);
    EXPECT_EQ(evaluate_chi(trivial, Word()), 1);
    EXPECT_EQ(evaluate_chi(trivial, Word::from_signed({1, 3, -2})), 1);

    const auto ms = build_multiplier({1, -1, 1, 1}, Weight{1}, p);
    EXPECT_EQ(evaluate_chi(ms, Word()), 1);
    EXPECT_EQ(evaluate_chi(ms, Word::from_signed({1, 2})), -1);
    const Word w = Word::from_signed({2, 3, -4, 2, 1});
    EXPECT_EQ(evaluate_chi(ms, w.power(2)), 1);
    EXPECT_EQ(evaluate_chi(ms, w.inverse()), evaluate_chi(ms, w));

    EXPECT_NO_THROW(build_multiplier({1, -1, 1, -1}, Weight{1}, p));
    for (int k : {-1, 0, 1, 2, 3}) EXPECT_EQ(build_multiplier({1, 1, 1, 1}, Weight{k}, p).chi_minus_identity(), k % 2 ? -1 : 1);
    EXPECT_THROW(build_multiplier({1, 1, 1}, Weight{1}, p), ContractError);
    EXPECT_THROW(build_multiplier({1, 2, 1, 1}, Weight{1}, p), ContractError);

    SurfacePresentation flipped = p;
    flipped.relator_sign = -1;
    EXPECT_THROW(build_multiplier({1, 1, 1, 1}, Weight{1}, flipped), ContractError);
    EXPECT_NO_THROW(build_multiplier({1, 1, 1, 1}, Weight{2}, flipped));
}

TEST(Fuchsian, ShortCutoffs)
{
    const auto p = build_bolza();
    const auto ms = build_multiplier({1, 1, 1, 1}, Weight{1}, p);
    for (auto m : {EnumerationMethod::brute, EnumerationMethod::pruned}) {
        EXPECT_TRUE(enumerate_geodesics(p, ms, 3.0, m).classes.empty());
        const auto s = enumerate_geodesics(p, ms, 3.2, m);
        ASSERT_FALSE(s.classes.empty());
        EXPECT_NEAR(s.classes.front().length(), bolza_systole, 1e-10);
        EXPECT_EQ(s.class_count(), 24);
    }
    EXPECT_THROW(enumerate_geodesics(p, ms, 0.0, EnumerationMethod::pruned), ContractError);
}

TEST(Fuchsian, BruteMatchesPruned)
{
    const auto& a = bolza_spectrum(EnumerationMethod::brute);
    const auto& b = bolza_spectrum(EnumerationMethod::pruned);
    EXPECT_EQ(multiset(a), multiset(b));
    ASSERT_EQ(a.classes.size(), b.classes.size());
    for (std::size_t i = 0; i < a.classes.size(); ++i)
        EXPECT_NEAR(a.classes[i].length(), b.classes[i].length(), 1e-9);
    EXPECT_EQ(a.group_fingerprint, b.group_fingerprint);
}

TEST(Fuchsian, BruteMatchesPrunedGenus3)
{
    const auto p = build_genus3();
    const auto ms = build_multiplier({1, -1, 1, 1, -1, 1}, Weight{1}, p);
    const auto a = enumerate_geodesics(p, ms, 5.5, EnumerationMethod::brute);
    const auto b = enumerate_geodesics(p, ms, 5.5, EnumerationMethod::pruned);
    EXPECT_FALSE(a.classes.empty());
    EXPECT_EQ(multiset(a), multiset(b));
    // the regular 12-gon has geodesics shorter than its side pairings
    const double pairing = 2.0 * std::acosh(2.0 + std::sqrt(3.0));
    EXPECT_LT(b.classes.front().length(), pairing);
    EXPECT_TRUE(std::any_of(b.classes.begin(), b.classes.end(),
                            [&](const GeodesicClass& c) { return std::abs(c.length() - pairing) < 1e-10; }));
}

TEST(Fuchsian, SpectrumProperties)
{
    const auto p = build_bolza();
    const auto ms = build_multiplier({1, -1, 1, -1}, Weight{1}, p);
    const auto& s = bolza_spectrum(EnumerationMethod::pruned);
    const auto ms_map = multiset(s);
    for (std::size_t i = 0; i < s.classes.size(); ++i) {
        const auto& c = s.classes[i];
        EXPECT_GE(c.primitive_length, bolza_systole - 1e-10);
        EXPECT_LE(c.length(), s.cutoff);
        if (i) {
            EXPECT_LE(s.classes[i - 1].length(), c.length());
        }
        const GroupElement g = evaluate(p, c.representative);
        EXPECT_NEAR(translation_length(g), c.length(), 1e-10);
        EXPECT_EQ(ms.chi_class(c.representative.parity(), g.trace()), c.chi_value);
        // inverse closure
        const GroupElement gi = evaluate(p, c.representative.inverse());
        const int chi_inv = ms.chi_class(c.representative.inverse().parity(), gi.trace());
        EXPECT_EQ(chi_inv, c.chi_value);
        EXPECT_TRUE(ms_map.count({std::llround(translation_length(gi) * 1e8), c.power, chi_inv}));
        // chi(gamma^n) = chi(gamma)^n for the primitive root
        if (c.power > 1) {
            const auto d = primitive_decompose(p, c.representative);
            EXPECT_EQ(d.n, c.power);
            EXPECT_NEAR(d.primitive_length, c.primitive_length, 1e-10);
        }
    }
    // the primitive classes of the systole square to the n = 2 record
    long sys_classes = 0, squares = 0;
    for (const auto& c : s.classes) {
        if (c.power == 1 && std::abs(c.length() - bolza_systole) < 1e-9) sys_classes += c.multiplicity;
        if (c.power == 2 && std::abs(c.primitive_length - bolza_systole) < 1e-9) squares += c.multiplicity;
    }
    EXPECT_EQ(sys_classes, 24);
    EXPECT_EQ(squares, sys_classes);
}

TEST(Fuchsian, PrimitiveDecompose)
{
    const auto p = build_bolza();
    const Word sys = Word::from_signed({1});
    const auto one = primitive_decompose(p, sys);
    EXPECT_EQ(one.n, 1);
    EXPECT_NEAR(one.primitive_length, bolza_systole, 1e-12);
    const Word conj = Word::from_signed({2, -3}) * sys * Word::from_signed({3, -2});
    for (int n : {2, 3}) {
        const auto d = primitive_decompose(p, conj.power(n));
        EXPECT_EQ(d.n, n);
        EXPECT_NEAR(d.primitive_length, bolza_systole, 1e-10);
        EXPECT_NEAR(translation_length(evaluate(p, conj.power(n))), n * bolza_systole, 1e-10);
    }
    const Word w = Word::from_signed({1, -2, 3});
    const double l = translation_length(evaluate(p, w));
    EXPECT_EQ(primitive_decompose(p, w).n, 1);
    EXPECT_EQ(primitive_decompose(p, w.power(2)).n, 2);
    EXPECT_NEAR(translation_length(evaluate(p, w.power(4))), 4 * l, 1e-10);
}

TEST(Fuchsian, PrimeGeodesicGrowth)
{
    const auto p = build_bolza();
    const auto ms = build_multiplier({1, 1, 1, 1}, Weight{1}, p);
    const double L = 11.0;
    long primitive = 0;
    for (const auto& c : enumerate_geodesics(p, ms, L, EnumerationMethod::pruned).classes)
        if (c.power == 1) primitive += c.multiplicity;
    const double expected = std::exp(L) / L;
    EXPECT_GT(primitive, expected / 3);
    EXPECT_LT(primitive, expected * 3);
}

TEST(Fuchsian, ThreadedEnumerationIsDeterministic)
{
    const auto p = build_bolza();
    const auto ms = build_multiplier({1, -1, 1, -1}, Weight{1}, p);
    EnumerationOptions opt;
    opt.threads = 3;
    const auto a = enumerate_geodesics(p, ms, 9.0, EnumerationMethod::pruned, opt);
    opt.threads = 1;
    const auto b = enumerate_geodesics(p, ms, 9.0, EnumerationMethod::pruned, opt);
    std::ostringstream sa, sb;
    write_spectrum(sa, a);
    write_spectrum(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Fuchsian, Budget)
{
    const auto p = build_bolza();
    const auto ms = build_multiplier({1, 1, 1, 1}, Weight{1}, p);
    EnumerationOptions opt;
    opt.budget = 1000;
    EXPECT_THROW(enumerate_geodesics(p, ms, 10.0, EnumerationMethod::pruned, opt), BudgetExceeded);
    EXPECT_THROW(enumerate_geodesics(p, ms, 7.0, EnumerationMethod::brute, opt), BudgetExceeded);
}

TEST(Fuchsian, SpectrumCacheRoundTrip)
{
    const auto& s = bolza_spectrum(EnumerationMethod::pruned);
    std::stringstream io;
    write_spectrum(io, s);
    const std::string text = io.str();
    std::istringstream in(text);
    const LengthSpectrum r = read_spectrum(in, s.group_fingerprint);
    ASSERT_EQ(r.classes.size(), s.classes.size());
    EXPECT_EQ(r.cutoff, s.cutoff);
    EXPECT_EQ(r.method, s.method);
    for (std::size_t i = 0; i < r.classes.size(); ++i) {
        EXPECT_EQ(r.classes[i].primitive_length, s.classes[i].primitive_length);
        EXPECT_EQ(r.classes[i].power, s.classes[i].power);
        EXPECT_EQ(r.classes[i].chi_value, s.classes[i].chi_value);
        EXPECT_EQ(r.classes[i].multiplicity, s.classes[i].multiplicity);
        EXPECT_EQ(r.classes[i].representative, s.classes[i].representative);
    }
    std::ostringstream again;
    write_spectrum(again, r);
    EXPECT_EQ(again.str(), text);
    std::istringstream in2(text);
    EXPECT_THROW(read_spectrum(in2, "0000000000000000"), ConfigError);

    const auto p = build_bolza();
    EXPECT_NE(group_fingerprint(p, build_multiplier({1, 1, 1, 1}, Weight{1}, p)),
              group_fingerprint(p, build_multiplier({1, -1, 1, -1}, Weight{1}, p)));
}

TEST(Fuchsian, OrbitBall)
{
    const auto p = build_bolza();
    const auto F = dirichlet_domain(p);
    const double D = 7.0;
    const auto els = elements_within(F, D);
    // lattice point count ~ (cosh D - 1)/2 for area 4 pi
    EXPECT_NEAR(double(els.size()), (std::cosh(D) - 1.0) / 2.0, 0.15 * std::cosh(D) / 2.0);
    for (const auto& e : els) EXPECT_LE(e.g.cosh_displacement(), std::cosh(D) * (1 + 1e-10));
    // compare with a breadth-first closure over the generators
    std::vector<GroupElement> bfs{GroupElement::identity()};
    for (std::size_t h = 0; h < bfs.size(); ++h)
        for (int j = 0; j < 4; ++j)
            for (int e : {1, -1}) {
                const GroupElement g = bfs[h] * (e > 0 ? p.generators[j] : p.generators[j].inverse());
                if (g.cosh_displacement() > std::cosh(D)) continue;
                bool seen = false;
                for (const auto& x : bfs)
                    if (x.max_abs_diff_psl(g) < 1e-8) {
                        seen = true;
                        break;
                    }
                if (!seen) bfs.push_back(g);
            }
    EXPECT_EQ(bfs.size(), els.size());
}
