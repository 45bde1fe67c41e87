#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "selberg/fuchsian.hpp"
#include "selberg/kernels.hpp"
#include "selberg/operators.hpp"
#include "selberg/specfun.hpp"
#include "selberg/testfn.hpp"
#include "selberg/traceformula.hpp"
#include "selberg/zeta.hpp"

namespace selberg::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* report_schema = "selberg.report/1";
inline constexpr const char* cache_env = "SELBERG_CACHE_DIR";

enum Exit { ok = 0, contract_failure = 1, config_error = 2, budget_exceeded = 3 };

// Keys accepted in config files and as --key flags, with their defaults.
inline const std::vector<std::pair<std::string, std::string>>& config_keys()
{
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"group.source", "bolza"},
        {"group.signs", ""},
        {"group.weight", "1"},
        {"testfn.family", "gaussian"},
        {"testfn.t", "0.5"},
        {"testfn.a", "1"},
        {"testfn.eps", "0.1"},
        {"testfn.s", "2"},
        {"testfn.sigma", "3"},
        {"cutoffs.L", "12"},
        {"cutoffs.ball", "6"},
        {"cutoffs.rho_max", "4"},
        {"cutoffs.eps", "0.1"},
        {"cutoffs.dL", "2"},
        {"enumeration.method", "pruned"},
        {"enumeration.budget", "50000000"},
        {"tolerances.trace_tail", "0.5"},
        {"tolerances.scan_tail", "0.1"},
        {"tolerances.resolvent", "1e-6"},
        {"zeta.s", "2"},
        {"zeta.sigma", "3"},
        {"output.json", ""},
        {"output.csv", ""},
        {"output.spectrum", ""},
        {"cache.dir", ".selberg_cache"},
    };
    return keys;
}

struct RunConfig {
    std::string group_source = "bolza";
    std::optional<std::vector<int>> signs;
    int weight = 1;
    Family family = Family::gaussian;
    double t = 0.5, a = 1.0, h_eps = 0.1, h_s = 2.0, h_sigma = 3.0;
    double L = 12.0, ball = 6.0, rho_max = 4.0, eps = 0.1, dL = 2.0;
    EnumerationMethod method = EnumerationMethod::pruned;
    std::size_t budget = 50'000'000;
    double trace_tail = 0.5, scan_tail = 0.1, resolvent_tol = 1e-6;
    cplx zeta_s = 2.0;
    double zeta_sigma = 3.0;
    std::string json_path, csv_path, spectrum_path;
    std::string cache_dir = ".selberg_cache";
    unsigned threads = 1;

    TestFunction test_function() const
    {
        switch (family) {
        case Family::gaussian: return TestFunction::gaussian(t);
        case Family::peaked_pair: return TestFunction::peaked_pair(a, h_eps);
        case Family::resolvent_difference: return TestFunction::resolvent_difference(h_s, h_sigma);
        }
        return TestFunction::gaussian(t);
    }
};

namespace detail {

inline std::string trim(const std::string& s) { return selberg::detail::trim(s); }

inline double number(const std::string& key, const std::string& v)
{
    const auto n = selberg::detail::parse_numbers(key, v);
    if (n.size() != 1) throw ConfigError("cli: key '" + key + "' needs a single number, got '" + v + "'");
    return n[0];
}

inline double positive(const std::string& key, const std::string& v)
{
    const double x = number(key, v);
    if (!(x > 0.0)) throw ConfigError("cli: cutoff '" + key + "' must be positive, got " + v);
    return x;
}

inline double tolerance(const std::string& key, const std::string& v)
{
    const double x = number(key, v);
    if (!(x > 0.0 && x < 1.0)) throw ConfigError("cli: tolerance '" + key + "' must lie in (0, 1), got " + v);
    return x;
}

inline std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string short_fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cli: cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace detail

// Flat 'key = value' text with '#' comments.
inline std::map<std::string, std::string> parse_config_text(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("cli: config line " + std::to_string(lineno) + " is not 'key = value'");
        kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }
    return kv;
}

inline RunConfig make_config(const std::map<std::string, std::string>& kv)
{
    std::map<std::string, std::string> v;
    for (const auto& [k, d] : config_keys()) v[k] = d;
    for (const auto& [k, val] : kv) {
        if (!v.count(k)) throw ConfigError("cli: unknown config key '" + k + "'");
        v[k] = val;
    }
    RunConfig c;
    c.group_source = v["group.source"];
    if (!v["group.signs"].empty()) {
        std::vector<int> s;
        for (double d : selberg::detail::parse_numbers("group.signs", v["group.signs"])) {
            if (d != 1.0 && d != -1.0) throw ConfigError("cli: group.signs entries must be +1 or -1");
            s.push_back(int(d));
        }
        c.signs = s;
    }
    const double w = detail::number("group.weight", v["group.weight"]);
    if (w != std::floor(w)) throw ConfigError("cli: group.weight must be an integer");
    c.weight = int(w);
    try {
        c.family = parse_family(v["testfn.family"]);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    c.t = detail::positive("testfn.t", v["testfn.t"]);
    c.a = detail::number("testfn.a", v["testfn.a"]);
    c.h_eps = detail::positive("testfn.eps", v["testfn.eps"]);
    c.h_s = detail::number("testfn.s", v["testfn.s"]);
    c.h_sigma = detail::number("testfn.sigma", v["testfn.sigma"]);
    c.L = detail::positive("cutoffs.L", v["cutoffs.L"]);
    c.ball = detail::positive("cutoffs.ball", v["cutoffs.ball"]);
    c.rho_max = detail::positive("cutoffs.rho_max", v["cutoffs.rho_max"]);
    c.eps = detail::positive("cutoffs.eps", v["cutoffs.eps"]);
    c.dL = detail::positive("cutoffs.dL", v["cutoffs.dL"]);
    if (v["enumeration.method"] == "pruned")
        c.method = EnumerationMethod::pruned;
    else if (v["enumeration.method"] == "brute")
        c.method = EnumerationMethod::brute;
    else
        throw ConfigError("cli: enumeration.method must be 'pruned' or 'brute'");
    c.budget = std::size_t(detail::positive("enumeration.budget", v["enumeration.budget"]));
    c.trace_tail = detail::tolerance("tolerances.trace_tail", v["tolerances.trace_tail"]);
    c.scan_tail = detail::tolerance("tolerances.scan_tail", v["tolerances.scan_tail"]);
    c.resolvent_tol = detail::tolerance("tolerances.resolvent", v["tolerances.resolvent"]);
    const auto zs = selberg::detail::parse_numbers("zeta.s", v["zeta.s"]);
    if (zs.empty() || zs.size() > 2) throw ConfigError("cli: zeta.s is 're' or 're im'");
    c.zeta_s = cplx(zs[0], zs.size() == 2 ? zs[1] : 0.0);
    c.zeta_sigma = detail::number("zeta.sigma", v["zeta.sigma"]);
    c.json_path = v["output.json"];
    c.csv_path = v["output.csv"];
    c.spectrum_path = v["output.spectrum"];
    c.cache_dir = v["cache.dir"];
    if (const char* env = std::getenv(cache_env); env && *env) c.cache_dir = env;
    return c;
}

struct Group {
    SurfacePresentation presentation;
    MultiplierSystem multiplier;
    RawPresentation raw;
    std::vector<int> signs;
    double area = 0.0;
};

inline RawPresentation raw_group(const RunConfig& c)
{
    if (c.group_source == "bolza") return parse_presentation_text(presentation_to_config(build_bolza()));
    if (c.group_source == "genus3") return parse_presentation_text(presentation_to_config(build_genus3()));
    return parse_presentation_text(detail::read_file(c.group_source));
}

// Alternating +-1 unless given in the config or the presentation file.
inline std::vector<int> group_signs(const RunConfig& c, const RawPresentation& raw)
{
    if (c.signs) return *c.signs;
    if (raw.signs) return *raw.signs;
    std::vector<int> s;
    for (int j = 0; j < 2 * raw.genus.value_or(0); ++j) s.push_back(j % 2 ? -1 : 1);
    return s;
}

inline Group load_group(const RunConfig& c)
{
    Group g;
    g.raw = raw_group(c);
    g.signs = group_signs(c, g.raw);
    g.presentation = build_presentation(g.raw).presentation;
    g.multiplier = build_multiplier(g.signs, Weight{c.weight}, g.presentation);
    g.area = g.presentation.area;
    return g;
}

struct CachedSpectrum {
    LengthSpectrum spectrum;
    std::string path;
    bool hit = false;
};

inline std::string cache_name(const std::string& fingerprint, EnumerationMethod m, double L)
{
    return "spectrum-" + fingerprint + "-" + to_string(m) + "-L" + detail::fmt(L) + ".csv";
}

// Serves the smallest cached cutoff >= L, truncated to L, or enumerates and stores the result.
inline CachedSpectrum obtain_spectrum(const RunConfig& c, const Group& g, double L)
{
    namespace fs = std::filesystem;
    const std::string fp = group_fingerprint(g.presentation, g.multiplier);
    const std::string prefix = "spectrum-" + fp + "-" + to_string(c.method) + "-L";
    CachedSpectrum out;
    std::error_code ec;
    fs::create_directories(c.cache_dir, ec);
    if (ec) throw ConfigError("cli: cannot create cache directory '" + c.cache_dir + "': " + ec.message());
    double best = std::numeric_limits<double>::infinity();
    fs::path best_path;
    for (const auto& e : fs::directory_iterator(c.cache_dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind(prefix, 0) != 0 || e.path().extension() != ".csv") continue;
        const double cut = std::strtod(name.substr(prefix.size()).c_str(), nullptr);
        if (cut >= L * (1 - 1e-12) && cut < best) {
            best = cut;
            best_path = e.path();
        }
    }
    if (!best_path.empty()) {
        std::ifstream in(best_path);
        LengthSpectrum s = read_spectrum(in, fp);
        out.spectrum = s.cutoff > L ? truncate(s, L) : s;
        out.path = best_path.string();
        out.hit = true;
        return out;
    }
    EnumerationOptions opt;
    opt.budget = c.budget;
    opt.threads = c.threads;
    out.spectrum = enumerate_geodesics(g.presentation, g.multiplier, L, c.method, opt);
    const fs::path target = fs::path(c.cache_dir) / cache_name(fp, c.method, L);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp);
        write_spectrum(f, out.spectrum);
        if (!f) throw ConfigError("cli: cannot write cache file '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
    out.path = target.string();
    return out;
}

struct Report {
    json data;
    int status = ok;
};

inline void emit(const RunConfig& c, const Report& r, bool json_stdout, std::ostream& out)
{
    if (json_stdout) out << r.data.dump(2) << "\n";
    if (!c.json_path.empty()) {
        std::ofstream f(c.json_path);
        if (!f) throw ConfigError("cli: cannot write '" + c.json_path + "'");
        f << r.data.dump(2) << "\n";
    }
}

inline json header(const std::string& command)
{
    json j;
    j["schema"] = report_schema;
    j["command"] = command;
    return j;
}

inline json spectrum_summary(const LengthSpectrum& s)
{
    json j;
    double systole = 0.0;
    long primitive = 0;
    for (const auto& cl : s.classes) {
        if (cl.power != 1) continue;
        primitive += cl.multiplicity;
        if (systole == 0.0 || cl.primitive_length < systole) systole = cl.primitive_length;
    }
    j["cutoff"] = s.cutoff;
    j["fingerprint"] = s.group_fingerprint;
    j["method"] = s.method;
    j["records"] = s.classes.size();
    j["classes"] = s.class_count();
    j["primitive_classes"] = primitive;
    j["systole"] = systole;
    j["growth_constant"] = class_growth_constant(s);
    return j;
}

// ---- commands ----

inline Report cmd_group_verify(const RunConfig& c, std::ostream& out)
{
    Report r{header("group-verify")};
    const RawPresentation raw = raw_group(c);
    const auto v = verify_presentation(raw, group_signs(c, raw), Weight{c.weight});
    out << "group " << c.group_source << ", weight " << c.weight << "\n";
    json checks = json::array();
    for (const auto& ch : v.checks) {
        out << "  " << std::left << std::setw(24) << ch.name << (ch.passed ? "PASS  " : "FAIL  ") << ch.detail << "\n";
        checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    }
    r.data["group"] = c.group_source;
    r.data["weight"] = c.weight;
    r.data["checks"] = checks;
    r.data["area"] = v.domain_area;
    r.data["passed"] = v.passed();
    out << (v.passed() ? "presentation verified" : "presentation check failed: " + v.checks.back().name) << "\n";
    r.status = v.passed() ? ok : contract_failure;
    return r;
}

inline Report cmd_geodesics(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    Report r{header("geodesics")};
    const Group g = load_group(c);
    const CachedSpectrum cs = obtain_spectrum(c, g, c.L);
    const json sum = spectrum_summary(cs.spectrum);
    r.data["spectrum"] = sum;
    r.data["cache"] = {{"path", cs.path}, {"hit", cs.hit}};
    if (!c.spectrum_path.empty()) {
        std::ofstream f(c.spectrum_path);
        if (!f) throw ConfigError("cli: cannot write '" + c.spectrum_path + "'");
        write_spectrum(f, cs.spectrum);
    }
    out << "geodesics up to L = " << c.L << " (" << to_string(c.method) << ")\n";
    out << "  records            " << cs.spectrum.classes.size() << "\n";
    out << "  classes            " << cs.spectrum.class_count() << "\n";
    out << "  primitive classes  " << sum["primitive_classes"].get<long>() << "\n";
    out << "  systole            " << detail::fmt(sum["systole"].get<double>()) << "\n";
    out << "  growth constant    " << detail::short_fmt(sum["growth_constant"].get<double>()) << "  (N(u) <= c e^u / u)\n";
    out << "  cache              " << (cs.hit ? "hit " : "stored ") << cs.path << "\n";
    if (cs.spectrum.classes.empty()) {
        err << "warning: empty spectrum, no closed geodesic of length <= " << c.L << "\n";
        r.data["warning"] = "empty spectrum";
    }
    return r;
}

inline Report cmd_trace(const RunConfig& c, std::ostream& out)
{
    Report r{header("trace")};
    const Group g = load_group(c);
    const CachedSpectrum cs = obtain_spectrum(c, g, c.L);
    const TestFunction h = c.test_function();
    const TraceEvaluation e = trace_rhs(h, cs.spectrum, g.area, c.trace_tail);
    r.data["test_function"] = e.test_function;
    r.data["cutoff"] = e.cutoff;
    r.data["area"] = e.area;
    r.data["fingerprint"] = e.group_fingerprint;
    r.data["identity_term"] = e.identity_term;
    r.data["geometric_term"] = e.geometric_term;
    r.data["total"] = e.total;
    r.data["tail"] = e.tail;
    out << "trace formula, " << e.test_function << ", L = " << e.cutoff << "\n";
    out << "  identity term   " << detail::fmt(e.identity_term) << "\n";
    out << "  geometric term  " << detail::fmt(e.geometric_term) << "\n";
    out << "  total           " << detail::fmt(e.total) << "\n";
    out << "  tail bound      " << detail::short_fmt(e.tail) << "\n";
    if (!c.csv_path.empty()) {
        std::ofstream f(c.csv_path);
        if (!f) throw ConfigError("cli: cannot write '" + c.csv_path + "'");
        f << "primitive_length,n,chi,multiplicity,value\n";
        for (const auto& pc : e.per_class)
            f << detail::fmt(pc.primitive_length) << ',' << pc.power << ',' << pc.chi << ',' << pc.multiplicity << ','
              << detail::fmt(pc.value) << "\n";
    }
    if (c.family == Family::resolvent_difference) {
        const auto rc = resolvent_consistency(c.h_s, c.h_sigma, cs.spectrum, g.area);
        const double full = std::abs(e.total - (rc.digamma_side + rc.zeta_side));
        r.data["resolvent"] = {{"zeta_side", rc.zeta_side},
                               {"geometric_residual", rc.geometric_residual},
                               {"digamma_side", rc.digamma_side},
                               {"identity_residual", rc.identity_residual},
                               {"full_residual", full}};
        out << "  resolvent cross-check\n";
        out << "    geometric vs zeta     " << detail::short_fmt(rc.geometric_residual) << "\n";
        out << "    identity vs digamma   " << detail::short_fmt(rc.identity_residual) << "\n";
        out << "    full identity         " << detail::short_fmt(full) << "\n";
        const bool pass = std::max({rc.geometric_residual, rc.identity_residual, full}) < c.resolvent_tol;
        r.data["passed"] = pass;
        if (!pass) r.status = contract_failure;
    }
    return r;
}

inline Report cmd_scan(const RunConfig& c, std::ostream& out)
{
    Report r{header("scan")};
    const Group g = load_group(c);
    const CachedSpectrum cs = obtain_spectrum(c, g, c.L + c.dL);
    ScanOptions opt;
    opt.tail_tolerance = c.scan_tail;
    EigenvalueScan sc;
    try {
        sc = eigenvalue_scan(cs.spectrum, g.area, c.rho_max, c.eps, c.dL, opt);
    } catch (const TailTooLarge& e) {
        const double best = attainable_resolution(truncate(cs.spectrum, c.L), opt);
        throw TailTooLarge(std::string(e.what()) + "; raise L (eps >= " + detail::short_fmt(best) +
                               " is attainable at L = " + detail::short_fmt(c.L) + ")",
                           e.tail());
    }
    const WeylReport w = weyl_check(sc.estimates, g.area, c.rho_max);
    json est = json::array(), dis = json::array();
    out << "eigenvalue scan, L = " << sc.cutoff << ", eps = " << sc.eps << ", tail " << detail::short_fmt(sc.tail) << "\n";
    out << "  zero response  " << detail::short_fmt(sc.zero_response) << "\n";
    out << "  rho            height      stability\n";
    for (const auto& x : sc.estimates) {
        out << "  " << std::left << std::setw(14) << detail::short_fmt(x.rho) << ' ' << std::setw(11)
            << detail::short_fmt(x.height) << ' ' << detail::short_fmt(x.stability) << "\n";
        est.push_back({{"rho", x.rho}, {"height", x.height}, {"stability", x.stability}});
    }
    for (const auto& x : sc.discarded) dis.push_back({{"rho", x.rho}, {"height", x.height}, {"stability", x.stability}});
    out << "  discarded      " << sc.discarded.size() << "\n";
    out << "  Weyl coefficient " << detail::short_fmt(w.coefficient) << " (expected " << detail::short_fmt(w.expected)
        << "), count at rho_max " << w.count_at_max << "\n";
    r.data["cutoff"] = sc.cutoff;
    r.data["eps"] = sc.eps;
    r.data["tail"] = sc.tail;
    r.data["zero_response"] = sc.zero_response;
    r.data["estimates"] = est;
    r.data["discarded"] = dis;
    r.data["weyl"] = {{"coefficient", w.coefficient},
                      {"expected", w.expected},
                      {"max_relative_deviation", w.max_relative_deviation},
                      {"count_at_max", w.count_at_max}};
    if (!c.csv_path.empty()) {
        std::ofstream f(c.csv_path);
        if (!f) throw ConfigError("cli: cannot write '" + c.csv_path + "'");
        f << "rho,height,stability\n";
        for (const auto& x : sc.estimates)
            f << detail::fmt(x.rho) << ',' << detail::fmt(x.height) << ',' << detail::fmt(x.stability) << "\n";
    }
    return r;
}

inline Report cmd_zeta(const RunConfig& c, std::ostream& out)
{
    Report r{header("zeta")};
    const Group g = load_group(c);
    const CachedSpectrum cs = obtain_spectrum(c, g, c.L);
    const ZetaEvaluation z = log_zeta_euler(c.zeta_s, cs.spectrum);
    const cplx d = zeta_log_deriv(c.zeta_s, cs.spectrum);
    r.data["s"] = {c.zeta_s.real(), c.zeta_s.imag()};
    r.data["cutoff"] = cs.spectrum.cutoff;
    r.data["log_z"] = {z.log_z.real(), z.log_z.imag()};
    r.data["log_derivative"] = {d.real(), d.imag()};
    r.data["tail"] = z.tail;
    out << "Selberg zeta at s = " << detail::fmt(c.zeta_s.real()) << " + " << detail::fmt(c.zeta_s.imag()) << "i, L = "
        << cs.spectrum.cutoff << "\n";
    out << "  log Z   " << detail::fmt(z.log_z.real()) << " + " << detail::fmt(z.log_z.imag()) << "i\n";
    out << "  Z'/Z    " << detail::fmt(d.real()) << " + " << detail::fmt(d.imag()) << "i\n";
    out << "  tail    " << detail::short_fmt(z.tail) << "\n";
    if (c.zeta_s.imag() == 0.0 && c.zeta_s.real() != c.zeta_sigma) {
        const auto rc = resolvent_consistency(c.zeta_s.real(), c.zeta_sigma, cs.spectrum, g.area);
        r.data["resolvent"] = {{"sigma", c.zeta_sigma},
                               {"geometric_residual", rc.geometric_residual},
                               {"identity_residual", rc.identity_residual}};
        out << "  resolvent identity at sigma = " << c.zeta_sigma << ": geometric " << detail::short_fmt(rc.geometric_residual)
            << ", identity " << detail::short_fmt(rc.identity_residual) << "\n";
        if (std::max(rc.geometric_residual, rc.identity_residual) >= c.resolvent_tol) r.status = contract_failure;
    }
    return r;
}

struct SuiteResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    std::string detail;
    double seconds = 0.0;
};

template <class F>
SuiteResult run_suite(const std::string& name, F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    try {
        r = f();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = e.what();
    }
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline double cocycle_residual(int samples, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto element = [&] {
        return GroupElement::rotation(pi * U(rng)) * GroupElement::boost(2.0 * U(rng)) *
               GroupElement::rotation(pi * U(rng));
    };
    double r = 0.0;
    for (int i = 0; i < samples; ++i) {
        const GroupElement g1 = element(), g2 = element();
        const Point z(U(rng), std::exp(U(rng)));
        for (int k : {1, 3}) {
            const cplx lhs = factor_j(g1 * g2, z, Weight{k});
            const cplx rhs = factor_j(g1, moebius_act(g2, z), Weight{k}) * factor_j(g2, z, Weight{k});
            // the cocycle holds up to the sign (-1)^k of the lift
            r = std::max(r, std::min(std::abs(lhs - rhs), std::abs(lhs + rhs)));
        }
    }
    return r;
}

inline Report cmd_verify_all(const RunConfig& c, std::ostream& out)
{
    Report r{header("verify-all")};
    std::vector<SuiteResult> rows;
    const Group g = load_group(c);
    rows.push_back(run_suite("group", [&] {
        const auto v = verify_presentation(g.raw, g.signs, Weight{c.weight});
        return SuiteResult{"", v.passed(), v.domain_area, v.passed() ? "area " + detail::short_fmt(v.domain_area)
                                                                    : v.checks.back().name + ": " + v.checks.back().detail};
    }));
    rows.push_back(run_suite("cocycle", [&] {
        const double res = cocycle_residual(10000, 7);
        return SuiteResult{"", res < 1e-12, res, "factor_j cocycle over 1e4 triples"};
    }));
    rows.push_back(run_suite("kernel automorphy", [&] {
        PoincareSum P(g.presentation, g.multiplier);
        const PointPairKernel K(TestFunction::gaussian(0.25));
        const Point z1(0.1, 1.1), z2(-0.2, 0.8);
        const Mat2c base = automorphic_kernel(K, z1, z2, P, c.ball).value;
        double res = 0.0;
        for (int j = 0; j < int(g.presentation.generators.size()); ++j) {
            const Word w = Word::from_signed({j + 1});
            const GroupElement h = evaluate(g.presentation, w);
            const int chi = evaluate_chi(g.multiplier, w);
            const Mat2c lhs = automorphic_kernel(K, moebius_act(h, z1), z2, P, c.ball).value;
            res = std::max(res, (lhs - double(chi) * factor_J(h, z1, Weight{1}) * base).cwiseAbs().maxCoeff());
        }
        return SuiteResult{"", res < 1e-7, res, "two-slot automorphy on generators, ball " + detail::short_fmt(c.ball)};
    }));
    rows.push_back(run_suite("green kernel", [&] {
        double res = 0.0;
        for (double sg : {1.5, 2.0, 5.0, 20.0})
            for (cplx rho : {cplx(0, -0.6), cplx(1, -0.7), cplx(2, -0.9)}) {
                const GreenKernel a = h_kernel(sg, rho), b = h_kernel(sg, rho, KernelRepresentation::integral);
                res = std::max(res, std::max(std::abs(a.H1 - b.H1), std::abs(a.H2 - b.H2)));
            }
        const double ode = greenh_residual(3.0, cplx(0, -0.8), 1e-4);
        return SuiteResult{"", res < 1e-10 && ode < 1e-8, std::max(res, ode),
                           "representations " + detail::short_fmt(res) + ", ODE " + detail::short_fmt(ode)};
    }));
    const CachedSpectrum base = obtain_spectrum(c, g, c.L + c.dL);
    const LengthSpectrum sL = truncate(base.spectrum, c.L);
    rows.push_back(run_suite("resolvent identity", [&] {
        double res = 0.0;
        for (auto [s, sg] : {std::pair{2.0, 3.0}, std::pair{1.8, 2.6}}) {
            const auto rc = resolvent_consistency(s, sg, sL, g.area);
            res = std::max({res, rc.geometric_residual, rc.identity_residual});
        }
        return SuiteResult{"", res < c.resolvent_tol, res, "identity and geometric halves at L = " + detail::short_fmt(c.L)};
    }));
    rows.push_back(run_suite("trace positivity", [&] {
        double worst = -std::numeric_limits<double>::infinity();
        bool pass = true;
        for (int i = 0; i < 20; ++i) {
            const auto h = TestFunction::gaussian(0.2 + 1.8 * i / 19.0);
            const auto a = trace_rhs(h, sL, g.area), b = trace_rhs(h, base.spectrum, g.area);
            pass = pass && a.total >= -a.tail && std::abs(a.total - b.total) <= a.tail + 1e-12;
            worst = std::max(worst, std::abs(a.total - b.total));
        }
        return SuiteResult{"", pass, worst, "20 gaussians, max change under L -> L + dL"};
    }));
    rows.push_back(run_suite("operators", [&] {
        double worst = 0.0;
        std::string failed;
        for (const auto& x : identity_suite()) {
            worst = std::max(worst, x.residual / x.tolerance);
            if (!x.passed()) failed += (failed.empty() ? "" : ", ") + x.name;
        }
        return SuiteResult{"", failed.empty(), worst,
                           failed.empty() ? "largest residual/tolerance ratio" : "failed: " + failed};
    }));
    rows.push_back(run_suite("zeta", [&] {
        const double d = std::abs(log_zeta_euler(2.0, sL).log_z - log_zeta_euler(2.0, base.spectrum).log_z);
        ProductConstants k;
        k.zero_modes_half = 1;
        k.gamma_d = -0.4;
        k.leading_coefficient = 1.3;
        const std::vector<double> rho{0.0, 1.1, 2.37, 3.05};
        auto Z = [&](cplx s) { return zeta_product_rep(s, rho, k, g.area).value; };
        const double ratio = std::abs(Z(cplx(0.5, 2.37))) / std::abs(Z(cplx(0.5, 2.47)));
        const double order = measured_zero_order(Z, 0.5);
        const bool pass = d < 1e-8 && ratio < 1e-6 && std::abs(order - 2.0) < 1e-2;
        return SuiteResult{"", pass, d,
                           "log Z(2) change " + detail::short_fmt(d) + ", zero ratio " + detail::short_fmt(ratio) +
                               ", order at 1/2 " + detail::short_fmt(order)};
    }));
    rows.push_back(run_suite("scan", [&] {
        ScanOptions opt;
        opt.tail_tolerance = c.scan_tail;
        const double eps = std::max(c.eps, attainable_resolution(sL, opt));
        const EigenvalueScan sc = eigenvalue_scan(base.spectrum, g.area, c.rho_max, eps, c.dL, opt);
        double worst = 0.0;
        for (const auto& e : sc.estimates) worst = std::max(worst, e.stability);
        const bool pass = !sc.estimates.empty() && worst < 5e-3;
        return SuiteResult{"", pass, worst,
                           std::to_string(sc.estimates.size()) + " peaks at eps " + detail::short_fmt(eps) +
                               ", max shift under L -> L + dL"};
    }));

    json rows_json = json::array();
    bool all = true;
    out << std::left << std::setw(20) << "suite" << std::setw(7) << "status" << std::setw(14) << "value"
        << "detail\n";
    for (const auto& x : rows) {
        all = all && x.passed;
        out << std::left << std::setw(20) << x.name << std::setw(7) << (x.passed ? "PASS" : "FAIL") << std::setw(14)
            << detail::short_fmt(x.value) << x.detail << "\n";
        rows_json.push_back({{"suite", x.name}, {"passed", x.passed}, {"value", x.value}, {"detail", x.detail}});
    }
    r.data["suites"] = rows_json;
    r.data["passed"] = all;
    out << (all ? "all suites passed" : "some suites failed") << "\n";
    r.status = all ? ok : contract_failure;
    return r;
}

// Entry point shared by the binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Numerical workflows for the Selberg trace formula of the weighted Dirac operator"};
    app.require_subcommand(1);
    std::string config_path;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool json_stdout = false;
    std::map<std::string, std::string> overrides;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"group-verify", "validate presentation, relator, area and multiplier"},
        {"geodesics", "enumerate and cache the length spectrum"},
        {"trace", "evaluate the right-hand side of the trace formula"},
        {"scan", "locate eigenvalues from peaked test functions"},
        {"zeta", "evaluate the Selberg zeta function and its log-derivative"},
        {"verify-all", "run every property suite and print a pass/fail matrix"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "config file of 'key = value' lines");
        sub->add_option("--threads", threads, "worker threads for enumeration");
        sub->add_flag("--json", json_stdout, "print the JSON report to stdout");
        for (const auto& [key, def] : config_keys())
            sub->add_option_function<std::string>("--" + key, [&overrides, k = key](const std::string& v) { overrides[k] = v; },
                                                  "default: " + (def.empty() ? std::string("none") : def));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return config_error;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        std::map<std::string, std::string> kv;
        if (!config_path.empty()) kv = parse_config_text(detail::read_file(config_path));
        for (const auto& [k, v] : overrides) kv[k] = v;
        RunConfig c = make_config(kv);
        c.threads = threads;
        std::ostringstream human;
        Report r;
        if (command == "group-verify") r = cmd_group_verify(c, human);
        else if (command == "geodesics") r = cmd_geodesics(c, human, err);
        else if (command == "trace") r = cmd_trace(c, human);
        else if (command == "scan") r = cmd_scan(c, human);
        else if (command == "zeta") r = cmd_zeta(c, human);
        else r = cmd_verify_all(c, human);
        if (!json_stdout) out << human.str();
        emit(c, r, json_stdout, out);
        return r.status;
    } catch (const BudgetExceeded& e) {
        err << "error (budget): " << e.what() << "\n";
        return budget_exceeded;
    } catch (const ConfigError& e) {
        err << "error (config): " << e.what() << "\n";
        return config_error;
    } catch (const ContractError& e) {
        err << "error (contract): " << e.what() << "\n";
        return contract_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return contract_failure;
    }
}

}  // namespace selberg::cli
