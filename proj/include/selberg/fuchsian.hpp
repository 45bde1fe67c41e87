#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "selberg/moebius.hpp"

namespace selberg {

struct Letter {
    int gen = 0;
    int exp = 1;
    bool operator==(const Letter&) const = default;
};

// Freely reduced word in the generators; parity() is the exponent-sum vector mod 2.
class Word {
public:
    Word() = default;
    explicit Word(const std::vector<Letter>& letters)
    {
        for (const Letter& l : letters) push(l);
    }

    // Signed 1-based generator indices, e.g. {1, -2} = g0 g1^-1.
    static Word from_signed(const std::vector<int>& s)
    {
        std::vector<Letter> l;
        for (int v : s) {
            if (v == 0) throw ConfigError("fuchsian: generator index 0 in a signed word (indices are 1-based)");
            l.push_back({std::abs(v) - 1, v > 0 ? 1 : -1});
        }
        return Word(l);
    }
    std::vector<int> to_signed() const
    {
        std::vector<int> s;
        for (const Letter& l : letters_) s.push_back(l.exp * (l.gen + 1));
        return s;
    }

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    std::uint64_t parity() const { return parity_; }

    bool cyclically_reduced() const
    {
        return letters_.size() < 2 || !cancels(letters_.front(), letters_.back());
    }
    Word cyclic_reduction() const
    {
        std::size_t i = 0, j = letters_.size();
        while (j - i >= 2 && cancels(letters_[i], letters_[j - 1])) {
            ++i;
            --j;
        }
        return Word(std::vector<Letter>(letters_.begin() + i, letters_.begin() + j));
    }

    Word inverse() const
    {
        Word w;
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.push({it->gen, -it->exp});
        return w;
    }
    Word power(int n) const
    {
        if (n < 0) return inverse().power(-n);
        Word w;
        for (int i = 0; i < n; ++i) w = w * *this;
        return w;
    }
    friend Word operator*(const Word& u, const Word& v)
    {
        Word w = u;
        for (const Letter& l : v.letters_) w.push(l);
        return w;
    }
    bool operator==(const Word& o) const { return letters_ == o.letters_; }

    std::string to_string() const
    {
        std::string s;
        for (int v : to_signed()) {
            if (!s.empty()) s += ' ';
            s += std::to_string(v);
        }
        return s;
    }
    static Word parse(const std::string& text)
    {
        std::istringstream in(text);
        std::vector<int> s;
        std::string tok;
        while (in >> tok) {
            try {
                std::size_t pos = 0;
                s.push_back(std::stoi(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError("fuchsian: bad word token '" + tok + "'");
            }
        }
        return from_signed(s);
    }

private:
    static bool cancels(const Letter& a, const Letter& b) { return a.gen == b.gen && a.exp == -b.exp; }
    void push(const Letter& l)
    {
        if (l.exp != 1 && l.exp != -1) throw ContractError("fuchsian: word exponents must be +-1");
        if (l.gen < 0 || l.gen >= 64) throw ContractError("fuchsian: generator index out of range");
        parity_ ^= std::uint64_t(1) << l.gen;
        if (!letters_.empty() && cancels(letters_.back(), l))
            letters_.pop_back();
        else
            letters_.push_back(l);
    }

    std::vector<Letter> letters_;
    std::uint64_t parity_ = 0;
};

struct SurfacePresentation {
    int genus = 0;
    std::vector<GroupElement> generators;
    Word relator;
    double area = 0.0;
    // The relator evaluated in SL(2,R) is relator_sign * Id.
    int relator_sign = 1;
};

inline GroupElement evaluate(const SurfacePresentation& p, const Word& w)
{
    GroupElement g;
    for (const Letter& l : w.letters()) {
        if (l.gen >= int(p.generators.size()))
            throw ContractError("fuchsian: word uses generator " + std::to_string(l.gen) + " of " +
                                std::to_string(p.generators.size()));
        const GroupElement& s = p.generators[l.gen];
        g = g * (l.exp > 0 ? s : s.inverse());
    }
    return g;
}

inline SurfacePresentation make_presentation(int genus, std::vector<GroupElement> generators, Word relator,
                                             std::optional<double> area = std::nullopt)
{
    if (genus < 2) throw ConfigError("fuchsian: genus must be at least 2, got " + std::to_string(genus));
    if (int(generators.size()) != 2 * genus)
        throw ConfigError("fuchsian: genus " + std::to_string(genus) + " needs " + std::to_string(2 * genus) +
                          " generators, got " + std::to_string(generators.size()));
    for (std::size_t j = 0; j < generators.size(); ++j) {
        const Classification c = classify_and_length(generators[j]);
        if (c.kind != ElementClass::hyperbolic)
            throw ConfigError("fuchsian: generator " + std::to_string(j) + " is " + to_string(c.kind) +
                              " (|tr| = " + std::to_string(std::abs(generators[j].trace())) + ")");
    }
    SurfacePresentation p;
    p.genus = genus;
    p.generators = std::move(generators);
    p.relator = std::move(relator);
    p.area = 4.0 * pi * (genus - 1);
    if (area && std::abs(*area - p.area) > 1e-9 * p.area)
        throw ConfigError("fuchsian: area " + std::to_string(*area) + " contradicts Gauss-Bonnet 4 pi (g-1) = " +
                          std::to_string(p.area));
    if (p.relator.empty()) throw ConfigError("fuchsian: empty relator");
    const GroupElement r = evaluate(p, p.relator);
    if (r.max_abs_diff(GroupElement::identity()) <= 1e-8)
        p.relator_sign = 1;
    else if (r.max_abs_diff(-GroupElement::identity()) <= 1e-8)
        p.relator_sign = -1;
    else
        throw ConfigError("fuchsian: relator does not evaluate to +-Id (deviation " +
                          std::to_string(r.max_abs_diff_psl(GroupElement::identity())) + ")");
    return p;
}

namespace detail {

// Surface group of the regular 4g-gon with interior angles 2 pi/(4g) and opposite sides paired.
inline SurfacePresentation regular_polygon_group(int genus, const std::vector<int>& relator)
{
    const int n = 4 * genus;
    const double half_trace = std::cos(pi / n) / std::sin(pi / n);
    const GroupElement T = GroupElement::boost(2.0 * std::acosh(half_trace));
    std::vector<GroupElement> gens;
    for (int j = 0; j < 2 * genus; ++j) {
        const GroupElement R = GroupElement::rotation(j * 2.0 * pi / n);
        gens.push_back(R * T * R.inverse());
    }
    return make_presentation(genus, gens, Word::from_signed(relator));
}

}  // namespace detail

// Bolza surface: regular octagon, g_j = R(j pi/4) T R(j pi/4)^-1 with tr T = 2(1 + sqrt 2).
inline SurfacePresentation build_bolza()
{
    return detail::regular_polygon_group(2, {1, -2, 3, -4, -1, 2, -3, 4});
}

// Genus-3 surface from the regular 12-gon.
inline SurfacePresentation build_genus3()
{
    return detail::regular_polygon_group(3, {1, -2, 3, -4, 5, -6, -1, 2, -3, 4, -5, 6});
}

struct PresentationConfig {
    SurfacePresentation presentation;
    std::optional<std::vector<int>> signs;
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<double> parse_numbers(const std::string& key, const std::string& v)
{
    std::istringstream in(v);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("fuchsian: key '" + key + "' has a non-numeric entry '" + tok + "'");
        }
    }
    return out;
}

}  // namespace detail

// Key-value presentation file:
//   genus = 2
//   generator.0 = a b c d      (row-major, one line per generator)
//   relator = 1 -2 3 -4 ...    (signed 1-based generator indices)
//   signs = 1 -1 1 -1          (optional character signs)
//   area = 12.566...           (optional, checked against Gauss-Bonnet)
struct RawPresentation {
    std::optional<int> genus;
    std::map<int, std::array<double, 4>> generators;
    std::optional<Word> relator;
    std::optional<double> area;
    std::optional<std::vector<int>> signs;
};

// Syntax only: no group-theoretic checks.
inline RawPresentation parse_presentation_text(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    RawPresentation raw;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("fuchsian: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key == "genus") {
            const auto v = detail::parse_numbers(key, val);
            if (v.size() != 1 || v[0] != std::floor(v[0])) throw ConfigError("fuchsian: genus must be an integer");
            raw.genus = int(v[0]);
        } else if (key.rfind("generator.", 0) == 0) {
            int idx = -1;
            try {
                idx = std::stoi(key.substr(10));
            } catch (const std::exception&) {
                throw ConfigError("fuchsian: bad generator key '" + key + "'");
            }
            const auto v = detail::parse_numbers(key, val);
            if (v.size() != 4) throw ConfigError("fuchsian: " + key + " needs 4 matrix entries");
            raw.generators.insert_or_assign(idx, std::array<double, 4>{v[0], v[1], v[2], v[3]});
        } else if (key == "relator") {
            raw.relator = Word::parse(val);
        } else if (key == "area") {
            const auto v = detail::parse_numbers(key, val);
            if (v.size() != 1) throw ConfigError("fuchsian: area must be a single number");
            raw.area = v[0];
        } else if (key == "signs") {
            std::vector<int> sg;
            for (double d : detail::parse_numbers(key, val)) {
                if (d != 1.0 && d != -1.0) throw ConfigError("fuchsian: character signs must be +1 or -1");
                sg.push_back(int(d));
            }
            raw.signs = sg;
        } else {
            throw ConfigError("fuchsian: unknown key '" + key + "'");
        }
    }
    if (!raw.genus) throw ConfigError("fuchsian: missing key 'genus'");
    if (!raw.relator) throw ConfigError("fuchsian: missing key 'relator'");
    return raw;
}

inline PresentationConfig build_presentation(const RawPresentation& raw)
{
    const int genus = *raw.genus;
    std::vector<GroupElement> list;
    for (int j = 0; j < 2 * genus; ++j) {
        auto it = raw.generators.find(j);
        if (it == raw.generators.end()) throw ConfigError("fuchsian: missing generator." + std::to_string(j));
        const auto& e = it->second;
        try {
            list.emplace_back(e[0], e[1], e[2], e[3]);
        } catch (const DomainError& err) {
            throw ConfigError("fuchsian: generator " + std::to_string(j) + ": " + err.what());
        }
    }
    if (int(raw.generators.size()) != 2 * genus) throw ConfigError("fuchsian: generator count does not match genus");
    return {make_presentation(genus, list, *raw.relator, raw.area), raw.signs};
}

inline PresentationConfig load_presentation_config(const std::string& text)
{
    return build_presentation(parse_presentation_text(text));
}

inline SurfacePresentation load_presentation(const std::string& text)
{
    return load_presentation_config(text).presentation;
}

inline std::string presentation_to_config(const SurfacePresentation& p)
{
    std::ostringstream out;
    out << std::setprecision(17);
    out << "genus = " << p.genus << "\n";
    for (std::size_t j = 0; j < p.generators.size(); ++j) {
        const GroupElement& g = p.generators[j];
        out << "generator." << j << " = " << g.a() << ' ' << g.b() << ' ' << g.c() << ' ' << g.d() << "\n";
    }
    out << "relator = " << p.relator.to_string() << "\n";
    return out.str();
}

struct MultiplierSystem {
    std::vector<int> signs;
    int weight_parity = 1;

    int chi_minus_identity() const { return weight_parity ? -1 : 1; }
    // Character of a word with the given exponent parity.
    int chi_parity(std::uint64_t parity) const
    {
        int c = 1;
        for (std::size_t i = 0; i < signs.size(); ++i)
            if ((parity >> i) & 1u) c *= signs[i];
        return c;
    }
    // Character of the PSL class with tr > 0 whose SL lift from the word has trace sign tr_sign.
    int chi_class(std::uint64_t parity, double tr_sign) const
    {
        return chi_parity(parity) * (tr_sign < 0.0 ? chi_minus_identity() : 1);
    }
};

inline MultiplierSystem build_multiplier(const std::vector<int>& signs, Weight k, const SurfacePresentation& p)
{
    if (signs.size() != p.generators.size())
        throw ContractError("fuchsian: " + std::to_string(p.generators.size()) + " character signs needed, got " +
                            std::to_string(signs.size()));
    for (int s : signs)
        if (s != 1 && s != -1) throw ContractError("fuchsian: character signs must be +1 or -1");
    MultiplierSystem ms{signs, ((k.k % 2) + 2) % 2};
    if (ms.chi_parity(p.relator.parity()) != 1)
        throw ContractError("fuchsian: character is not trivial on the relator");
    if (p.relator_sign == -1 && ms.weight_parity == 1)
        throw ContractError("fuchsian: relator lifts to -Id, inconsistent with odd weight");
    return ms;
}

inline int evaluate_chi(const MultiplierSystem& ms, const Word& w)
{
    return ms.chi_parity(w.parity());
}

// Dirichlet domain centred at o = i, stored in the Klein model (o at the origin).
struct DirichletDomain {
    struct Side {
        Eigen::Vector2d u;  // unit normal; the domain is x.u <= t
        double t;
        int pairing;
    };
    struct Pairing {
        GroupElement g;  // SL lift as a product of generators
        Word word;
        int inverse = -1;
    };
    std::vector<Eigen::Vector2d> vertices;  // counter-clockwise; side i joins vertex i and i+1
    std::vector<Side> sides;
    std::vector<Pairing> pairings;
    double circumradius = 0.0;
    double area = 0.0;
};

namespace detail {

inline Eigen::Vector2d klein_point(cplx z)
{
    const cplx w = (z - I) / (z + I);
    const double s = 2.0 / (1.0 + std::norm(w));
    return {s * w.real(), s * w.imag()};
}

inline double klein_cosh_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& q)
{
    return (1.0 - p.dot(q)) / std::sqrt((1.0 - p.squaredNorm()) * (1.0 - q.squaredNorm()));
}

// Accurate also for nearby points.
inline double klein_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& q)
{
    const double sp = 1.0 / std::sqrt(1.0 - p.squaredNorm()), sq = 1.0 / std::sqrt(1.0 - q.squaredNorm());
    const Eigen::Vector2d dx = sp * p - sq * q;
    const double q4 = dx.squaredNorm() - (sp - sq) * (sp - sq);
    return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, q4)));
}

struct HalfPlane {
    Eigen::Vector2d u;
    double t;
    int source;
};

// Sutherland-Hodgman clip of a convex polygon; src records which half-plane created each edge.
inline void clip(std::vector<Eigen::Vector2d>& poly, std::vector<int>& src, const HalfPlane& h)
{
    std::vector<Eigen::Vector2d> out;
    std::vector<int> osrc;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d& a = poly[i];
        const Eigen::Vector2d& b = poly[(i + 1) % n];
        const double fa = a.dot(h.u) - h.t, fb = b.dot(h.u) - h.t;
        if (fa <= 0.0) {
            out.push_back(a);
            osrc.push_back(src[i]);
        }
        if ((fa <= 0.0) != (fb <= 0.0)) {
            const double s = fa / (fa - fb);
            out.push_back(a + s * (b - a));
            osrc.push_back(fa <= 0.0 ? h.source : src[i]);
        }
    }
    poly.swap(out);
    src.swap(osrc);
}

struct RawElement {
    GroupElement g;
    Word word;
};

// Elements with d(o, g o) <= D reachable by paths that stay within D + slack.
inline std::vector<RawElement> ball_by_generators(const SurfacePresentation& p, double D)
{
    double slack = 0.0;
    for (const auto& g : p.generators) slack = std::max(slack, std::acosh(g.cosh_displacement()));
    const double outer = std::cosh(D + slack);
    std::multimap<double, std::size_t> index;
    std::vector<RawElement> all{{GroupElement::identity(), Word()}};
    index.emplace(1.0, 0);
    auto find = [&](const GroupElement& g) {
        const double key = g.cosh_displacement();
        for (auto it = index.lower_bound(key * (1 - 1e-9)); it != index.end() && it->first <= key * (1 + 1e-9); ++it)
            if (all[it->second].g.max_abs_diff_psl(g) <= 1e-8 * key) return true;
        return false;
    };
    for (std::size_t head = 0; head < all.size(); ++head) {
        for (int j = 0; j < int(p.generators.size()); ++j)
            for (int e : {1, -1}) {
                const GroupElement h = all[head].g * (e > 0 ? p.generators[j] : p.generators[j].inverse());
                if (h.cosh_displacement() > outer || find(h)) continue;
                index.emplace(h.cosh_displacement(), all.size());
                all.push_back({h, all[head].word * Word({{j, e}})});
                if (all.size() > 2'000'000) throw BudgetExceeded("fuchsian: Dirichlet domain search too large");
            }
    }
    std::vector<RawElement> in;
    for (auto& e : all)
        if (e.g.cosh_displacement() <= std::cosh(D)) in.push_back(std::move(e));
    return in;
}

inline double vertex_angle(const Eigen::Vector2d& prev, const Eigen::Vector2d& v, const Eigen::Vector2d& next)
{
    const double b = klein_distance(v, prev), c = klein_distance(v, next);
    const double ca = klein_cosh_distance(prev, next);
    const double cosA = (std::cosh(b) * std::cosh(c) - ca) / (std::sinh(b) * std::sinh(c));
    return std::acos(std::clamp(cosA, -1.0, 1.0));
}

}  // namespace detail

inline DirichletDomain dirichlet_domain(const SurfacePresentation& p)
{
    double D = 0.0;
    for (const auto& g : p.generators) D = std::max(D, std::acosh(g.cosh_displacement()));
    D = 2.0 * D + 1.0;
    for (int attempt = 0; attempt < 8; ++attempt, D *= 1.5) {
        const auto ball = detail::ball_by_generators(p, D);
        std::vector<detail::HalfPlane> hs;
        for (std::size_t i = 0; i < ball.size(); ++i) {
            const Eigen::Vector2d k = detail::klein_point(moebius_act(ball[i].g, Point(0.0, 1.0)).z());
            const double n = k.norm();
            if (n < 1e-12) continue;
            const double r = std::acosh(ball[i].g.cosh_displacement());
            hs.push_back({k / n, std::tanh(r / 2), int(i)});
        }
        std::sort(hs.begin(), hs.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
        std::vector<Eigen::Vector2d> poly{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
        std::vector<int> src(4, -1);
        for (const auto& h : hs) detail::clip(poly, src, h);

        bool compact = !poly.empty();
        double R = 0.0;
        for (std::size_t i = 0; i < poly.size() && compact; ++i) {
            if (poly[i].squaredNorm() >= 1.0 - 1e-14 || src[i] < 0) compact = false;
            else R = std::max(R, std::acosh(1.0 / std::sqrt(1.0 - poly[i].squaredNorm())));
        }
        if (!compact || 2.0 * R + 1e-6 > D) {
            if (compact) D = std::max(D, (2.0 * R + 0.5) / 1.5);
            continue;
        }

        // merge nearly coincident vertices left by clipping through existing vertices
        DirichletDomain F;
        std::vector<int> side_src;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Eigen::Vector2d& a = poly[i];
            const Eigen::Vector2d& b = poly[(i + 1) % poly.size()];
            if ((a - b).norm() < 1e-10) continue;
            F.vertices.push_back(a);
            side_src.push_back(src[i]);
        }
        std::map<int, int> pairing_of;
        for (int s : side_src)
            if (!pairing_of.count(s)) {
                pairing_of[s] = int(F.pairings.size());
                F.pairings.push_back({ball[s].g, ball[s].word, -1});
            }
        for (std::size_t i = 0; i < side_src.size(); ++i) {
            const auto& h = *std::find_if(hs.begin(), hs.end(), [&](const auto& x) { return x.source == side_src[i]; });
            F.sides.push_back({h.u, h.t, pairing_of[side_src[i]]});
        }
        for (auto& a : F.pairings)
            for (std::size_t j = 0; j < F.pairings.size(); ++j)
                if (F.pairings[j].g.max_abs_diff_psl(a.g.inverse()) < 1e-8) a.inverse = int(j);
        for (const auto& a : F.pairings)
            if (a.inverse < 0) throw Error("fuchsian: Dirichlet side pairings are not closed under inversion");
        if (F.pairings.size() != F.sides.size())
            throw Error("fuchsian: a Dirichlet side pairing contributes more than one side");

        F.circumradius = R;
        const std::size_t n = F.vertices.size();
        double angle_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            angle_sum += detail::vertex_angle(F.vertices[(i + n - 1) % n], F.vertices[i], F.vertices[(i + 1) % n]);
        F.area = (double(n) - 2.0) * pi - angle_sum;
        if (std::abs(F.area - p.area) > 1e-6 * p.area)
            throw Error("fuchsian: Dirichlet domain area " + std::to_string(F.area) + " differs from " +
                        std::to_string(p.area));
        return F;
    }
    throw Error("fuchsian: could not determine a compact Dirichlet domain");
}

namespace detail {

struct M2 {
    double a, b, c, d;
    double trace() const { return a + d; }
    double cosh_disp() const { return 0.5 * (a * a + b * b + c * c + d * d); }
    friend M2 operator*(const M2& x, const M2& y)
    {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
};

inline M2 to_m2(const GroupElement& g) { return {g.a(), g.b(), g.c(), g.d()}; }

// Coefficients of |g s|_F^2 = q0 (g^T g)_11 + 2 q1 (g^T g)_12 + q2 (g^T g)_22.
struct NeighbourForm {
    double q0, q1, q2;
    explicit NeighbourForm(const M2& s)
        : q0(s.a * s.a + s.b * s.b), q1(s.a * s.c + s.b * s.d), q2(s.c * s.c + s.d * s.d)
    {
    }
};

// Side-pairing generated traversal of {g : cosh d(o, g o) <= cosh_bound}. Every element
// other than Id has a unique parent g s with strictly smaller displacement, so the
// search tree is walked depth first without a visited set.
class ReverseSearch {
public:
    ReverseSearch(const DirichletDomain& F, double cosh_bound, std::size_t budget)
        : bound_(cosh_bound), budget_(budget)
    {
        for (const auto& p : F.pairings) {
            gens_.push_back(to_m2(p.g));
            forms_.emplace_back(gens_.back());
            inverse_.push_back(p.inverse);
            parity_.push_back(p.word.parity());
        }
    }

    // Index of the pairing s that leads from h to its parent h s.
    int parent_step(const M2& h) const
    {
        const double m11 = h.a * h.a + h.c * h.c, m12 = h.a * h.b + h.c * h.d, m22 = h.b * h.b + h.d * h.d;
        int best = -1;
        double bv = 0.0;
        for (std::size_t t = 0; t < forms_.size(); ++t) {
            const auto& f = forms_[t];
            const double v = f.q0 * m11 + 2.0 * f.q1 * m12 + f.q2 * m22;
            if (best < 0 || v < bv * (1.0 - 1e-12)) {
                best = int(t);
                bv = v;
            }
        }
        return best;
    }

    // visit(M2 g, parity, path) for every element except Id; path lists pairing indices.
    template <class Visit>
    void run(Visit&& visit, unsigned threads = 1)
    {
        std::vector<int> roots;
        for (std::size_t s = 0; s < gens_.size(); ++s)
            if (gens_[s].cosh_disp() <= bound_) roots.push_back(int(s));
        threads = std::max(1u, std::min<unsigned>(threads, unsigned(roots.size())));
        if (threads == 1) {
            for (int s : roots) walk_from(s, visit);
            return;
        }
        std::vector<std::thread> pool;
        std::exception_ptr err;
        std::mutex err_mutex;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < roots.size(); i += threads) walk_from(roots[i], visit);
                } catch (...) {
                    std::lock_guard lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        if (err) std::rethrow_exception(err);
    }

    std::size_t visited() const { return count_.load(); }

private:
    template <class Visit>
    void walk_from(int s0, Visit& visit)
    {
        struct Frame {
            M2 g;
            std::uint64_t parity;
            int next;
        };
        std::vector<Frame> stack;
        std::string path;
        auto enter = [&](const M2& g, std::uint64_t par, int s) {
            if (count_.fetch_add(1) + 1 > budget_)
                throw BudgetExceeded("fuchsian: enumeration exceeded the budget of " + std::to_string(budget_) +
                                     " group elements");
            path.push_back(char(s));
            visit(g, par, path);
            stack.push_back({g, par, 0});
        };
        enter(gens_[s0], parity_[s0], s0);
        const int n = int(gens_.size());
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next == n) {
                stack.pop_back();
                path.pop_back();
                continue;
            }
            const int s = f.next++;
            if (inverse_[s] == path.back()) continue;
            const M2 h = f.g * gens_[s];
            if (h.cosh_disp() > bound_) continue;
            if (parent_step(h) != inverse_[s]) continue;
            enter(h, f.parity ^ parity_[s], s);
        }
    }

    std::vector<M2> gens_;
    std::vector<NeighbourForm> forms_;
    std::vector<int> inverse_;
    std::vector<std::uint64_t> parity_;
    double bound_;
    std::size_t budget_;
    std::atomic<std::size_t> count_{0};
};

// Reduce g by pairings while the displacement drops; g is in the group iff this ends at +-Id.
inline bool in_group(const DirichletDomain& F, M2 g)
{
    std::vector<M2> gens;
    for (const auto& p : F.pairings) gens.push_back(to_m2(p.g));
    for (int it = 0; it < 10000; ++it) {
        const double cur = g.cosh_disp();
        int best = -1;
        double bv = cur;
        for (std::size_t s = 0; s < gens.size(); ++s) {
            const double v = (g * gens[s]).cosh_disp();
            if (v < bv * (1.0 - 1e-12)) {
                bv = v;
                best = int(s);
            }
        }
        if (best < 0) break;
        g = g * gens[best];
    }
    const double tol = 1e-7;
    const bool plus = std::abs(g.a - 1) < tol && std::abs(g.b) < tol && std::abs(g.c) < tol && std::abs(g.d - 1) < tol;
    const bool minus = std::abs(g.a + 1) < tol && std::abs(g.b) < tol && std::abs(g.c) < tol && std::abs(g.d + 1) < tol;
    return plus || minus;
}

// delta with the same axis as g, translation length l/n and delta^n = g in PSL.
inline M2 nth_root(const M2& g, int n)
{
    const double s = g.trace() < 0 ? -1.0 : 1.0;
    const double l = 2.0 * std::acosh(std::abs(g.trace()) / 2.0);
    const double th = l / (2.0 * n);
    const double u1 = std::sinh(n * th) / std::sinh(th);
    const double u2 = std::sinh((n - 1) * th) / std::sinh(th);
    return {(s * g.a + u2) / u1, s * g.b / u1, s * g.c / u1, (s * g.d + u2) / u1};
}

// Length of axis(g) inside F, with weight 1/2 when the axis runs along a side.
inline double axis_length_in_domain(const DirichletDomain& F, const M2& g)
{
    // fixed points of g on the real line, mapped to the unit circle
    const double A = g.c, B = g.d - g.a, C = -g.b;
    const double disc = std::sqrt(std::max(0.0, B * B - 4 * A * C));
    const double q = -0.5 * (B + (B >= 0 ? disc : -disc));
    auto boundary = [](double x, bool inf) -> Eigen::Vector2d {
        if (inf) return {1.0, 0.0};
        const double x2 = x * x;
        return {(x2 - 1.0) / (x2 + 1.0), -2.0 * x / (x2 + 1.0)};
    };
    const Eigen::Vector2d P = boundary(C / q, false);
    const Eigen::Vector2d Q = A == 0.0 ? boundary(0.0, true) : boundary(q / A, false);

    const std::size_t n = F.sides.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = F.sides[i];
        if (std::abs(P.dot(s.u) - s.t) < 1e-9 && std::abs(Q.dot(s.u) - s.t) < 1e-9)
            return 0.5 * detail::klein_distance(F.vertices[i], F.vertices[(i + 1) % n]);
    }
    double t0 = 0.0, t1 = 1.0;
    const Eigen::Vector2d dPQ = Q - P;
    for (const auto& s : F.sides) {
        const double f0 = P.dot(s.u) - s.t, df = dPQ.dot(s.u);
        if (df == 0.0) {
            if (f0 > 0.0) return 0.0;
            continue;
        }
        const double tc = -f0 / df;
        if (df > 0.0)
            t1 = std::min(t1, tc);
        else
            t0 = std::max(t0, tc);
        if (t0 >= t1) return 0.0;
    }
    return detail::klein_distance(P + t0 * dPQ, P + t1 * dPQ);
}

inline Word path_word(const DirichletDomain& F, const std::string& path)
{
    Word w;
    for (char c : path) w = w * F.pairings[std::size_t(c)].word;
    return w;
}

}  // namespace detail

struct GeodesicClass {
    double primitive_length = 0.0;
    int power = 1;
    int chi_value = 1;
    long multiplicity = 1;
    Word representative;

    double length() const { return power * primitive_length; }
};

enum class EnumerationMethod { brute, pruned };

inline std::string to_string(EnumerationMethod m) { return m == EnumerationMethod::brute ? "brute" : "pruned"; }

struct LengthSpectrum {
    double cutoff = 0.0;
    std::vector<GeodesicClass> classes;
    std::string group_fingerprint;
    std::string method = "pruned";

    long class_count() const
    {
        long n = 0;
        for (const auto& c : classes) n += c.multiplicity;
        return n;
    }
};

struct EnumerationOptions {
    std::size_t budget = 10'000'000;
    unsigned threads = 1;
};

inline std::string group_fingerprint(const SurfacePresentation& p, const MultiplierSystem& ms)
{
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const void* data, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    mix(&p.genus, sizeof p.genus);
    for (const auto& g : p.generators) {
        const double e[4] = {g.a(), g.b(), g.c(), g.d()};
        mix(e, sizeof e);
    }
    for (int v : p.relator.to_signed()) mix(&v, sizeof v);
    for (int s : ms.signs) mix(&s, sizeof s);
    mix(&ms.weight_parity, sizeof ms.weight_parity);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

struct Hit {
    double length;
    int n;
    int chi;
    double weight;  // count of classes contributed, already divided by the primitive length
    Word word;
};

inline bool shorter(const Word& a, const Word& b)
{
    if (a.size() != b.size()) return a.size() < b.size();
    return a.to_signed() < b.to_signed();
}

// Collapse hits with equal (length, n, chi) into records.
inline std::vector<GeodesicClass> aggregate(std::vector<Hit> hits, bool weighted)
{
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.length != b.length) return a.length < b.length;
        if (a.n != b.n) return a.n < b.n;
        return a.chi < b.chi;
    });
    std::vector<GeodesicClass> out;
    std::size_t i = 0;
    while (i < hits.size()) {
        const double l0 = hits[i].length;
        std::size_t j = i;
        while (j < hits.size() && hits[j].length - l0 <= 1e-9 * std::max(1.0, l0)) ++j;
        std::map<std::pair<int, int>, std::pair<double, std::size_t>> groups;
        for (std::size_t k = i; k < j; ++k) {
            auto& e = groups[{hits[k].n, hits[k].chi}];
            if (e.first == 0.0 || shorter(hits[k].word, hits[e.second].word)) e.second = k;
            e.first += weighted ? hits[k].weight : 1.0;
        }
        for (const auto& [key, val] : groups) {
            const long m = std::lround(val.first);
            if (std::abs(val.first - double(m)) > 1e-5)
                throw Error("fuchsian: class weights at length " + std::to_string(l0) + " sum to " +
                            std::to_string(val.first) + ", not an integer");
            if (m == 0) continue;
            GeodesicClass c;
            c.power = key.first;
            c.primitive_length = l0 / key.first;
            c.chi_value = key.second;
            c.multiplicity = m;
            c.representative = hits[val.second].word;
            out.push_back(c);
        }
        i = j;
    }
    std::stable_sort(out.begin(), out.end(), [](const GeodesicClass& a, const GeodesicClass& b) {
        if (a.length() != b.length()) return a.length() < b.length();
        if (a.chi_value != b.chi_value) return a.chi_value < b.chi_value;
        return a.power < b.power;
    });
    return out;
}

inline int power_by_root(const DirichletDomain& F, const M2& g, double length, double systole_guess)
{
    const int nmax = int(std::floor(length / systole_guess + 1e-9));
    for (int n = nmax; n >= 2; --n)
        if (in_group(F, nth_root(g, n))) return n;
    return 1;
}

inline double shortest_pairing_length(const DirichletDomain& F)
{
    double s = std::numeric_limits<double>::infinity();
    for (const auto& p : F.pairings) s = std::min(s, translation_length(p.g));
    return s;
}

inline std::vector<GeodesicClass> enumerate_pruned(const DirichletDomain& F, const MultiplierSystem& ms, double L,
                                                  const EnumerationOptions& opt)
{
    const double coshR = std::cosh(F.circumradius);
    const double sh = std::sinh(L / 2) * coshR * (1 + 1e-9);
    const double cosh_bound = 1.0 + 2.0 * sh * sh;
    const double max_trace = 2.0 * std::cosh(L / 2) * (1 + 1e-12);
    ReverseSearch rs(F, cosh_bound, opt.budget);
    struct Raw {
        M2 g;
        double length;
        int chi;
        double axis;
        std::string path;
    };
    std::vector<Raw> raw;
    std::mutex mx;
    rs.run(
        [&](const M2& g, std::uint64_t parity, const std::string& path) {
            const double tr = g.trace();
            if (std::abs(tr) > max_trace) return;
            const double l = 2.0 * std::acosh(std::abs(tr) / 2.0);
            const double shd = std::sqrt(std::max(0.0, (g.cosh_disp() - 1.0) / 2.0));
            if (shd > std::sinh(l / 2) * coshR * (1 + 1e-9)) return;
            const double a = axis_length_in_domain(F, g);
            if (a <= 0.0) return;
            std::lock_guard lock(mx);
            raw.push_back({g, l, ms.chi_class(parity, tr), a, path});
        },
        opt.threads);
    double systole = std::numeric_limits<double>::infinity();
    for (const auto& r : raw) systole = std::min(systole, r.length);
    std::vector<Hit> hits;
    hits.reserve(raw.size());
    for (const auto& r : raw) {
        const int n = power_by_root(F, r.g, r.length, systole);
        hits.push_back({r.length, n, r.chi, r.axis * n / r.length, path_word(F, r.path)});
    }
    return aggregate(std::move(hits), true);
}

inline std::vector<GeodesicClass> enumerate_brute(const SurfacePresentation& p, const DirichletDomain& F,
                                                 const MultiplierSystem& ms, double L, const EnumerationOptions& opt)
{
    const double R = F.circumradius;
    // conservative ball: every class has a representative whose axis passes within R of o
    const double D = 2.0 * std::acosh(std::cosh(L / 2) * std::cosh(R));
    const double Dh = 2.0 * R + L / 2;
    // breadth-first over generator words; elements keyed by displacement for lookup
    double slack = 0.0;
    for (const auto& g : p.generators) slack = std::max(slack, std::acosh(g.cosh_displacement()));
    const double outer = std::cosh(std::max(D, Dh) + slack);
    struct Node {
        GroupElement g;
        Word word;
    };
    std::vector<Node> all{{GroupElement::identity(), Word()}};
    std::multimap<double, std::size_t> index{{1.0, 0}};
    auto find = [&](const GroupElement& g) -> long {
        const double key = g.cosh_displacement();
        for (auto it = index.lower_bound(key * (1 - 1e-9)); it != index.end() && it->first <= key * (1 + 1e-9); ++it)
            if (all[it->second].g.max_abs_diff_psl(g) <= 1e-7 * key) return long(it->second);
        return -1;
    };
    for (std::size_t head = 0; head < all.size(); ++head)
        for (int j = 0; j < int(p.generators.size()); ++j)
            for (int e : {1, -1}) {
                const GroupElement h = all[head].g * (e > 0 ? p.generators[j] : p.generators[j].inverse());
                if (h.cosh_displacement() > outer || find(h) >= 0) continue;
                if (all.size() >= opt.budget)
                    throw BudgetExceeded("fuchsian: enumeration exceeded the budget of " + std::to_string(opt.budget) +
                                         " group elements");
                index.emplace(h.cosh_displacement(), all.size());
                all.push_back({h, all[head].word * Word({{j, e}})});
            }

    // candidates: hyperbolic elements of length <= L with axis within R of o
    std::vector<std::size_t> cand;
    std::multimap<double, std::size_t> cand_index;
    for (std::size_t i = 1; i < all.size(); ++i) {
        const GroupElement& g = all[i].g;
        if (g.cosh_displacement() > std::cosh(D)) continue;
        const double l = translation_length(g);
        if (l > L * (1 + 1e-12)) continue;
        const double shd = std::sqrt((g.cosh_displacement() - 1.0) / 2.0);
        if (shd > std::sinh(l / 2) * std::cosh(R) * (1 + 1e-9)) continue;
        cand_index.emplace(g.cosh_displacement(), cand.size());
        cand.push_back(i);
    }
    auto find_cand = [&](const GroupElement& g) -> long {
        const double key = g.cosh_displacement();
        for (auto it = cand_index.lower_bound(key * (1 - 1e-9));
             it != cand_index.end() && it->first <= key * (1 + 1e-9); ++it)
            if (all[cand[it->second]].g.max_abs_diff_psl(g) <= 1e-7 * key) return long(it->second);
        return -1;
    };
    std::vector<std::size_t> conj;
    for (std::size_t i = 1; i < all.size(); ++i)
        if (all[i].g.cosh_displacement() <= std::cosh(Dh)) conj.push_back(i);

    std::vector<std::size_t> parent(cand.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t c = 0; c < cand.size(); ++c) {
        const GroupElement& g = all[cand[c]].g;
        for (std::size_t h : conj) {
            const GroupElement& x = all[h].g;
            const long k = find_cand(x * g * x.inverse());
            if (k >= 0) parent[root(std::size_t(k))] = root(c);
        }
    }

    double systole = std::numeric_limits<double>::infinity();
    for (std::size_t c : cand) systole = std::min(systole, translation_length(all[c].g));
    std::map<std::size_t, std::vector<std::size_t>> classes;
    for (std::size_t c = 0; c < cand.size(); ++c) classes[root(c)].push_back(c);
    std::vector<Hit> hits;
    for (const auto& [r, members] : classes) {
        std::size_t best = members.front();
        std::set<int> chis;
        for (std::size_t m : members) {
            const auto& node = all[cand[m]];
            chis.insert(ms.chi_class(node.word.parity(), node.g.trace()));
            if (shorter(node.word, all[cand[best]].word)) best = m;
        }
        if (chis.size() != 1) throw Error("fuchsian: character is not a class function on a conjugacy class");
        const auto& node = all[cand[best]];
        const double l = translation_length(node.g);
        int n = 1;
        for (int k = int(std::floor(l / systole + 1e-9)); k >= 2 && n == 1; --k) {
            const M2 d = nth_root(to_m2(node.g), k);
            if (std::abs(d.a * d.d - d.b * d.c - 1.0) > 1e-8) continue;
            if (find(GroupElement(d.a, d.b, d.c, d.d)) >= 0) n = k;
        }
        hits.push_back({l, n, *chis.begin(), 1.0, node.word});
    }
    return aggregate(std::move(hits), false);
}

}  // namespace detail

inline LengthSpectrum enumerate_geodesics(const SurfacePresentation& p, const MultiplierSystem& ms, double L,
                                          EnumerationMethod method, const EnumerationOptions& opt = {})
{
    if (!(L > 0.0)) throw ContractError("fuchsian: length cutoff must be positive");
    const DirichletDomain F = dirichlet_domain(p);
    LengthSpectrum s;
    s.cutoff = L;
    s.group_fingerprint = group_fingerprint(p, ms);
    s.method = to_string(method);
    s.classes = method == EnumerationMethod::pruned ? detail::enumerate_pruned(F, ms, L, opt)
                                                    : detail::enumerate_brute(p, F, ms, L, opt);
    return s;
}

struct PrimitiveDecomposition {
    double primitive_length;
    int n;
};

// Largest n such that the element of w is an n-th power in the group.
inline PrimitiveDecomposition primitive_decompose(const SurfacePresentation& p, const Word& w)
{
    const GroupElement g = evaluate(p, w);
    const double l = translation_length(g);
    const DirichletDomain F = dirichlet_domain(p);
    const int n = detail::power_by_root(F, detail::to_m2(g), l, detail::shortest_pairing_length(F) * 0.25);
    return {l / n, n};
}

// Group elements with d(o, g o) <= D, including the identity; SL lifts with word parity.
struct OrbitElement {
    GroupElement g;
    std::uint64_t parity;
};

inline std::vector<OrbitElement> elements_within(const DirichletDomain& F, double D,
                                                 std::size_t budget = 10'000'000)
{
    std::vector<OrbitElement> out{{GroupElement::identity(), 0}};
    detail::ReverseSearch rs(F, std::cosh(D) * (1 + 1e-12), budget);
    rs.run([&](const detail::M2& g, std::uint64_t parity, const std::string&) {
        out.push_back({GroupElement(g.a, g.b, g.c, g.d), parity});
    });
    return out;
}

// CSV cache of a length spectrum; refuses to load under a different fingerprint.
inline void write_spectrum(std::ostream& out, const LengthSpectrum& s)
{
    out << "# selberg length spectrum\n";
    out << "format_version,1\n";
    out << "fingerprint," << s.group_fingerprint << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", s.cutoff);
    out << "cutoff," << buf << "\n";
    out << "method," << s.method << "\n";
    out << "primitive_length,n,chi,multiplicity,representative\n";
    for (const auto& c : s.classes) {
        std::snprintf(buf, sizeof buf, "%.17g", c.primitive_length);
        out << buf << ',' << c.power << ',' << c.chi_value << ',' << c.multiplicity << ','
            << c.representative.to_string() << "\n";
    }
}

inline LengthSpectrum read_spectrum(std::istream& in, const std::string& expected_fingerprint)
{
    LengthSpectrum s;
    std::string line;
    auto expect = [&](const std::string& key) {
        if (!std::getline(in, line) || line.rfind(key + ",", 0) != 0)
            throw ConfigError("fuchsian: spectrum cache is missing '" + key + "'");
        return line.substr(key.size() + 1);
    };
    if (!std::getline(in, line) || line.rfind("#", 0) != 0) throw ConfigError("fuchsian: not a spectrum cache");
    if (expect("format_version") != "1") throw ConfigError("fuchsian: unsupported spectrum cache version");
    s.group_fingerprint = expect("fingerprint");
    if (s.group_fingerprint != expected_fingerprint)
        throw ConfigError("fuchsian: spectrum cache fingerprint " + s.group_fingerprint + " does not match " +
                          expected_fingerprint);
    s.cutoff = std::strtod(expect("cutoff").c_str(), nullptr);
    s.method = expect("method");
    if (!std::getline(in, line)) throw ConfigError("fuchsian: spectrum cache has no column header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string f[5];
        for (int i = 0; i < 5; ++i)
            if (!std::getline(row, f[i], i < 4 ? ',' : '\n'))
                throw ConfigError("fuchsian: malformed spectrum record '" + line + "'");
        GeodesicClass c;
        c.primitive_length = std::strtod(f[0].c_str(), nullptr);
        c.power = std::stoi(f[1]);
        c.chi_value = std::stoi(f[2]);
        c.multiplicity = std::stol(f[3]);
        c.representative = Word::parse(f[4]);
        s.classes.push_back(c);
    }
    return s;
}

struct PresentationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct PresentationVerification {
    std::vector<PresentationCheck> checks;
    std::optional<SurfacePresentation> presentation;
    std::optional<MultiplierSystem> multiplier;
    double domain_area = 0.0;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
};

// Runs the presentation checks in order and stops at the first failure, so that the Dirichlet
// domain is only built for a consistent group.
inline PresentationVerification verify_presentation(const RawPresentation& raw, const std::vector<int>& signs, Weight k)
{
    PresentationVerification v;
    auto add = [&](const std::string& name, bool ok, const std::string& detail) {
        v.checks.push_back({name, ok, detail});
        return ok;
    };
    const int genus = raw.genus.value_or(0);
    if (!add("genus", genus >= 2, "genus " + std::to_string(genus))) return v;
    bool complete = int(raw.generators.size()) == 2 * genus;
    for (int j = 0; j < 2 * genus; ++j) complete = complete && raw.generators.count(j);
    if (!add("generator count", complete,
             std::to_string(raw.generators.size()) + " generators for " + std::to_string(2 * genus) + " slots"))
        return v;
    std::vector<GroupElement> gens;
    std::string bad;
    for (const auto& [j, e] : raw.generators) {
        try {
            gens.emplace_back(e[0], e[1], e[2], e[3]);
        } catch (const DomainError&) {
            bad += (bad.empty() ? "" : ", ") + std::to_string(j) + " (det " + std::to_string(e[0] * e[3] - e[1] * e[2]) + ")";
        }
    }
    if (!add("determinant", bad.empty(), bad.empty() ? "all generators in SL(2,R)" : "generator " + bad)) return v;
    for (std::size_t j = 0; j < gens.size(); ++j) {
        const Classification c = classify_and_length(gens[j]);
        if (c.kind != ElementClass::hyperbolic)
            bad += (bad.empty() ? "" : ", ") + std::to_string(j) + " is " + to_string(c.kind);
    }
    if (!add("hyperbolic generators", bad.empty(), bad.empty() ? "all hyperbolic" : "generator " + bad)) return v;
    SurfacePresentation p;
    try {
        p = make_presentation(genus, gens, *raw.relator, raw.area);
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        add(what.find("area") != std::string::npos ? "area" : "relator", false, what);
        return v;
    }
    add("relator", true, p.relator_sign == 1 ? "evaluates to Id" : "evaluates to -Id");
    add("area", true, "4 pi (g - 1) = " + std::to_string(p.area));
    try {
        v.multiplier = build_multiplier(signs, k, p);
    } catch (const ContractError& e) {
        const std::string what = e.what();
        if (what.find("odd weight") != std::string::npos)
            add("spin structure", false, "inconsistent spin structure: relator lifts to -Id at odd weight " + std::to_string(k.k));
        else
            add("character", false, what);
        return v;
    }
    add("character", true, "trivial on the relator");
    add("spin structure", true, "weight " + std::to_string(k.k) + " consistent with the relator lift");
    try {
        v.domain_area = dirichlet_domain(p).area;
    } catch (const Error& e) {
        add("fundamental domain", false, e.what());
        return v;
    }
    add("fundamental domain", std::abs(v.domain_area - p.area) < 1e-8 * p.area,
        "Dirichlet domain area " + std::to_string(v.domain_area));
    v.presentation = p;
    return v;
}

}  // namespace selberg
