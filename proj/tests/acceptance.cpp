// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "qdeform/catalog.hpp"
#include "qdeform/cli.hpp"
#include "qdeform/coherent.hpp"
#include "qdeform/error.hpp"
#include "qdeform/moments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace qdeform;

namespace
{

// Tolerances and limits, one block per criterion.
constexpr int kC1RandomSpecs = 200;
constexpr int kC1MaxN = 64;
constexpr double kC1Tol = 1e-10;
constexpr double kC1Seconds = 5.0;

constexpr int kC2MaxN = 40;
constexpr double kC2RelTol = 1e-10;

constexpr double kC3Q = 1.0 - 1e-8;
constexpr int kC3MaxN = 20;
constexpr double kC3Tol = 1e-5;

constexpr int kC4Dim = 32;
constexpr double kC4Tol = 1e-10;
constexpr double kC4FaultRel = 1e-6;

constexpr int kC5Radii = 5;
constexpr int kC5Angles = 10;
constexpr double kC5DiskFraction = 0.9;
constexpr double kC5InfiniteRadius = 2.0;
constexpr double kC5TailTol = 1e-14;
constexpr double kC5ResidualTol = 1e-6;

constexpr int kC6MaxN = 60;
constexpr double kC6AmplitudeRelTol = 1e-10;
constexpr double kC6Tol = 1e-8;

constexpr int kC7MaxN = 20;
constexpr double kC7RelTol = 1e-6;
constexpr double kC7Seconds = 2.0;

constexpr double kC8Tol = 1e-6;

constexpr double kC9SelfTol = 1e-12;
constexpr double kC9KernelTol = 1e-10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (pass) detail << what;
            pass = false;
        }
    }
};

RadiusEstimate radius_of(const StructureTable& t) { return estimate_radius(t); }

// ---------------------------------------------------------------------------

// Random (F, G) with F(k) bounded away from 0 on 0..64.
DeformationSpec random_spec(std::mt19937& rng, int index)
{
    static const char* kF[] = {"a", "a + b/(n+1)", "a*exp(b*n/64)", "a + b*n/64", "a*(1 + b*sqrt(n)/8)"};
    static const char* kG[] = {"c", "c + d*n", "c*exp(-d*n/10)", "c/(n+1) + d", "(c + d*n)^2/(n+1)"};
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 4);
    for (;;) {
        const complex a = std::polar(0.6 + 0.5 * (u(rng) + 1.0) / 2.0, 3.14159 * u(rng));
        const Bindings b{{"a", a},
                         {"b", complex(0.4 * u(rng), 0.4 * u(rng))},
                         {"c", complex(u(rng), u(rng))},
                         {"d", complex(0.3 * u(rng), 0.3 * u(rng))}};
        DeformationSpec s;
        try {
            s = make_spec("random" + std::to_string(index), kF[pick(rng)], kG[pick(rng)], b);
        } catch (const Error&) {
            continue;
        }
        bool ok = true;
        for (int k = 0; k <= kC1MaxN && ok; ++k) ok = std::abs(evaluate(s.F, static_cast<long>(k), s.params)) > 1e-3;
        if (ok) return s;
    }
}

Outcome criterion1()
{
    Outcome o;
    const auto t0 = Clock::now();
    std::vector<DeformationSpec> specs;
    for (const auto& name : catalog::names()) specs.push_back(catalog::builtin(name));
    std::mt19937 rng(20261014);
    for (int i = 0; i < kC1RandomSpecs; ++i) specs.push_back(random_spec(rng, i));

    double worst = 0.0;
    for (const auto& s : specs) {
        const StructureTable t = phi_recurrence(s, kC1MaxN);
        for (int n = 0; n <= kC1MaxN; ++n) {
            const complex rec = t.phi(n);
            const double err = std::abs(phi_closed_form(s, n) - rec) / (1.0 + std::abs(rec));
            worst = std::max(worst, err);
            if (err > kC1Tol) {
                o.require(false, s.name + " F=" + s.F.source() + " G=" + s.G.source() + " n=" + std::to_string(n));
            }
        }
    }
    const double secs = seconds_since(t0);
    o.require(secs < kC1Seconds, "runtime " + std::to_string(secs) + " s");
    o.detail << (o.pass ? "" : "; ") << specs.size() << " specs, worst scaled error " << worst << ", " << secs << " s";
    return o;
}

Outcome criterion2()
{
    Outcome o;
    double worst = 0.0;
    for (double q : {0.3, 0.5, 1.2, 2.0}) {
        const StructureTable ac(catalog::builtin("arik-coon", {{"q", q}}));
        const StructureTable bm(catalog::builtin("biedenharn", {{"q", q}}));
        for (int n = 0; n <= kC2MaxN; ++n) {
            const double fac = (1.0 - std::pow(q, n)) / (1.0 - q);
            const double fbm = (std::pow(q, n) - std::pow(q, -n)) / (q - 1.0 / q);
            const double e1 = n == 0 ? ac.f(0) : std::abs(ac.f(n) - fac) / std::abs(fac);
            const double e2 = n == 0 ? bm.f(0) : std::abs(bm.f(n) - fbm) / std::abs(fbm);
            worst = std::max({worst, e1, e2});
            o.require(e1 <= kC2RelTol, "arik-coon q=" + std::to_string(q) + " n=" + std::to_string(n));
            o.require(e2 <= kC2RelTol, "biedenharn q=" + std::to_string(q) + " n=" + std::to_string(n));
        }
    }
    o.detail << (o.pass ? "" : "; ") << "worst relative error " << worst;
    return o;
}

Outcome criterion3()
{
    Outcome o;
    const StructureTable t(catalog::builtin("arik-coon", {{"q", kC3Q}}));
    double worst = 0.0;
    for (int n = 0; n <= kC3MaxN; ++n) {
        const double e = std::abs(t.f(n) - n);
        worst = std::max(worst, e);
        o.require(e <= kC3Tol, "n=" + std::to_string(n));
    }
    o.detail << (o.pass ? "" : "; ") << "max |f(n) - n| = " << worst;
    return o;
}

Outcome criterion4()
{
    Outcome o;
    for (const auto& name : catalog::names()) {
        const StructureTable t(catalog::builtin(name));
        const auto report = certify(build_rep(t, kC4Dim), kC4Tol);
        o.require(report.pass, name + " failed certification");
        const auto faulty = certify(build_rep(t.with_fault(kC4Dim / 2, kC4FaultRel * t.f(kC4Dim / 2)), kC4Dim), kC4Tol);
        o.require(!faulty.pass, name + " fault not detected");
    }
    o.detail << (o.pass ? "" : "; ") << "4 catalog algebras pass at dim " << kC4Dim << ", faulted tables fail";
    return o;
}

Outcome criterion5()
{
    Outcome o;
    double worst = 0.0;
    int points = 0;
    StateOptions so;
    so.tailTol = kC5TailTol;
    for (const auto& name : catalog::names()) {
        const StructureTable t(catalog::builtin(name));
        const auto radius = radius_of(t);
        const double r = radius.kind == RadiusEstimate::Kind::Finite ? kC5DiskFraction * std::sqrt(radius.value)
                                                                      : kC5InfiniteRadius;
        for (int i = 1; i <= kC5Radii; ++i) {
            for (int j = 0; j < kC5Angles; ++j) {
                const complex z = std::polar(r * i / kC5Radii, 2.0 * M_PI * j / kC5Angles);
                const auto s = make_state(t, z, radius, so);
                const double res = eigen_residual(s, build_rep(t, s.truncation() + 1));
                worst = std::max(worst, res);
                ++points;
                if (res > kC5ResidualTol) {
                    std::ostringstream os;
                    os << name << " z=" << z << " residual " << res;
                    o.require(false, os.str());
                }
            }
        }
    }
    o.detail << (o.pass ? "" : "; ") << points << " points, worst residual " << worst;
    return o;
}

Outcome criterion6()
{
    Outcome o;
    const StructureTable t(catalog::builtin("harmonic"));
    const auto radius = radius_of(t);
    double worstAmp = 0.0, worstU = 0.0, worstQ = 0.0;
    for (complex z : {complex(5.0, 0.0), complex(4.0, 3.0), complex(0.7, -0.2), complex(-1.0, 1.5)}) {
        const auto s = make_state(t, z, radius);
        const double x = std::norm(z);
        for (int n = 0; n <= std::min(kC6MaxN, s.truncation()); ++n) {
            const complex expected = std::exp(-x / 2.0) * std::pow(z, n) / std::exp(0.5 * std::lgamma(n + 1.0));
            const double e = std::abs(s.amplitude(n) - expected) / std::abs(expected);
            worstAmp = std::max(worstAmp, e);
        }
        if (std::abs(z) >= 4.0) o.require(s.truncation() >= kC6MaxN, "truncation below 60");
        const FockRep rep = build_rep(t, s.truncation() + 1);
        worstU = std::max(worstU, std::abs(uncertainty_product(s, rep) - 0.5));
        const auto stats = photon_statistics(s);
        worstQ = std::max(worstQ, stats.mandelQ ? std::abs(*stats.mandelQ) : INFINITY);
    }
    o.require(worstAmp <= kC6AmplitudeRelTol, "amplitudes");
    o.require(worstU <= kC6Tol, "uncertainty product");
    o.require(worstQ <= kC6Tol, "Mandel Q");
    o.detail << (o.pass ? "" : "; ") << "amplitude error " << worstAmp << ", |dQdP - 1/2| " << worstU << ", |Q| "
             << worstQ;
    return o;
}

Outcome criterion7()
{
    Outcome o;
    const auto t0 = Clock::now();
    const StructureTable t(catalog::builtin("harmonic"));
    const auto radius = radius_of(t);
    MomentOptions mo;
    mo.nMax = kC7MaxN;
    mo.relTol = kC7RelTol;
    const auto good = check_moments(t, builtin_weight("harmonic"), radius, mo);
    o.require(good.pass, "builtin weight failed");
    // e^{-x} replaced by 2 e^{-2x}: same mass, wrong first moment
    const auto bad = check_moments(t, expression_weight("2*exp(-2*x)", {}, INFINITY), radius, mo);
    o.require(!bad.pass, "wrong weight passed");
    o.require(bad.first_failure() && *bad.first_failure() == 1, "wrong weight does not first fail at n = 1");
    const double secs = seconds_since(t0);
    o.require(secs < kC7Seconds, "runtime " + std::to_string(secs) + " s");
    double worst = 0.0;
    for (const auto& m : good.moments) worst = std::max(worst, m.relativeError);
    o.detail << (o.pass ? "" : "; ") << "worst relative error " << worst << ", wrong weight first fails at n = "
             << (bad.first_failure() ? *bad.first_failure() : -1) << ", " << secs << " s";
    return o;
}

Outcome criterion8()
{
    Outcome o;
    const auto ac = estimate_radius(catalog::builtin("arik-coon", {{"q", 0.5}}));
    o.require(ac.kind == RadiusEstimate::Kind::Finite && std::abs(ac.value - 2.0) <= kC8Tol, "arik-coon radius");
    const auto h = estimate_radius(catalog::builtin("harmonic"));
    o.require(h.kind == RadiusEstimate::Kind::Infinite, "harmonic radius");
    const auto d = estimate_radius(make_spec("degenerate", "1", "3 - 2*n", {}));
    o.require(d.kind == RadiusEstimate::Kind::Infinite, "degenerate radius");
    o.detail << (o.pass ? "" : "; ") << "arik-coon " << to_string(ac.kind) << " " << std::setprecision(17) << ac.value
             << ", harmonic " << to_string(h.kind) << ", degenerate " << to_string(d.kind);
    return o;
}

Outcome criterion9()
{
    Outcome o;
    double worstSelf = 0.0;
    for (const auto& name : catalog::names()) {
        const StructureTable t(catalog::builtin(name));
        const auto radius = radius_of(t);
        const double r = radius.kind == RadiusEstimate::Kind::Finite ? 0.9 * std::sqrt(radius.value) : 2.0;
        for (complex z : {complex(0.0), complex(0.3 * r, 0.0), complex(-0.5 * r, 0.6 * r), complex(0.0, r)}) {
            const auto s = make_state(t, z, radius);
            worstSelf = std::max(worstSelf, std::abs(overlap(s, s) - 1.0));
        }
    }
    o.require(worstSelf <= kC9SelfTol, "self overlap");
    const StructureTable h(catalog::builtin("harmonic"));
    const auto hr = radius_of(h);
    const double kernel = std::abs(overlap(make_state(h, 1.0, hr), make_state(h, 2.0, hr)) - std::exp(-0.5));
    o.require(kernel <= kC9KernelTol, "harmonic kernel");
    o.detail << (o.pass ? "" : "; ") << "max |<z|z> - 1| " << worstSelf << ", |<1|2> - e^-1/2| " << kernel;
    return o;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion10()
{
    Outcome o;
    const std::string golden = QDEFORM_GOLDEN_DIR;
    const std::string fixtures = QDEFORM_FIXTURE_DIR;
    std::ifstream manifest(golden + "/cases.tsv");
    o.require(static_cast<bool>(manifest), "missing golden manifest");
    std::string line;
    int files = 0, codes = 0;
    while (std::getline(manifest, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string name, code, argText;
        std::getline(fields, name, '\t');
        std::getline(fields, code, '\t');
        std::getline(fields, argText);
        for (std::size_t p; (p = argText.find("@FIXTURES@")) != std::string::npos;) {
            argText.replace(p, 10, fixtures);
        }
        std::vector<std::string> args;
        std::istringstream words(argText);
        for (std::string w; words >> w;) args.push_back(w);

        // run twice: the output must also be stable within one process
        std::ostringstream out1, out2, err;
        const int exit1 = cli::run(args, out1, err);
        const int exit2 = cli::run(args, out2, err);
        ++codes;
        o.require(exit1 == std::stoi(code) && exit2 == exit1,
                  "exit " + std::to_string(exit1) + " for '" + argText + "', expected " + code);
        o.require(out1.str() == out2.str(), name + " not stable between runs");
        if (name != "-") {
            ++files;
            o.require(out1.str() == read_file(golden + "/" + name + ".json"), name + " differs from golden file");
        }
    }
    o.detail << (o.pass ? "" : "; ") << files << " golden files, " << codes << " exit codes checked";
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"recurrence and closed form agree", criterion1},
        {"known closed forms", criterion2},
        {"harmonic limit", criterion3},
        {"Fock certification", criterion4},
        {"eigenstate property", criterion5},
        {"canonical specialization", criterion6},
        {"moment condition", criterion7},
        {"radius estimation", criterion8},
        {"overlap kernel", criterion9},
        {"CLI golden files", criterion10},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " ("
                  << o.detail.str() << ")\n";
    }
    return failures == 0 ? 0 : 1;
}
