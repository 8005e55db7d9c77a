#include "qdeform/catalog.hpp"
#include "qdeform/coherent.hpp"
#include "qdeform/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qdeform;

namespace
{

struct Algebra
{
    StructureTable table;
    RadiusEstimate radius;
};

Algebra algebra(std::string_view name, const Bindings& b = {})
{
    StructureTable t(catalog::builtin(name, b));
    return {t, estimate_radius(t)};
}

// Symmetric q-exponential, sum x^n / [n]_q!, as an infinite product.
double q_exponential(double q, double x)
{
    double p = 1.0;
    double qk = 1.0;
    for (int k = 0; k < 4000; ++k, qk *= q) p /= 1.0 - (1.0 - q) * qk * x;
    return p;
}

} // namespace

TEST_CASE("deformed exponential oracles")
{
    const auto h = algebra("harmonic");
    for (double x : {0.0, 0.1, 1.0, 7.5, 50.0, 400.0}) {
        CHECK(deformed_exp(h.table, x, h.radius).logValue == doctest::Approx(x).epsilon(1e-13));
    }
    const auto ac = algebra("arik-coon");
    for (double x : {0.1, 0.5, 1.0, 1.5, 1.9}) {
        INFO("x = " << x);
        CHECK(deformed_exp(ac.table, x, ac.radius).logValue ==
              doctest::Approx(std::log(q_exponential(0.5, x))).epsilon(1e-12));
    }
    CHECK_THROWS_AS(deformed_exp(ac.table, 2.0, ac.radius), DomainError);
    CHECK_THROWS_AS(deformed_exp(ac.table, -1.0, ac.radius), std::invalid_argument);

    SeriesOptions tight;
    tight.termBudget = 5;
    CHECK_THROWS_AS(deformed_exp(h.table, 10.0, h.radius, tight), ConvergenceError);
}

TEST_CASE("harmonic states are Poissonian")
{
    const auto h = algebra("harmonic");
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const complex z(u(rng), u(rng));
        const CoherentState s = make_state(h.table, z, h.radius);
        const double x = std::norm(z);
        for (int n = 0; n <= std::min(60, s.truncation()); ++n) {
            const complex expected = std::exp(-x / 2.0) * std::pow(z, n) / std::sqrt(std::tgamma(n + 1.0));
            CHECK(std::abs(s.amplitude(n) - expected) <= 1e-10 * std::abs(expected) + 1e-300);
        }
        const auto stats = photon_statistics(s);
        CHECK(stats.meanN == doctest::Approx(x).epsilon(1e-10));
        CHECK(stats.varN == doctest::Approx(x).epsilon(1e-9));
        REQUIRE(stats.mandelQ);
        CHECK(std::abs(*stats.mandelQ) < 1e-8);

        const FockRep rep = build_rep(h.table, s.truncation() + 1);
        CHECK(std::abs(uncertainty_product(s, rep) - 0.5) < 1e-8);
        CHECK(eigen_residual(s, rep) < 1e-6);
    }
}

TEST_CASE("normalization and tail")
{
    for (const auto& name : catalog::names()) {
        const auto a = algebra(name);
        const double r = a.radius.kind == RadiusEstimate::Kind::Finite ? 0.9 * std::sqrt(a.radius.value) : 2.0;
        const CoherentState s = make_state(a.table, complex(r * 0.6, r * 0.7), a.radius);
        double norm = 0.0;
        for (double p : photon_statistics(s).pmf) norm += p;
        INFO(name);
        CHECK(std::abs(norm - 1.0) <= s.tail_bound() + 1e-13);
        CHECK(s.tail_bound() <= 1e-14);
    }
}

TEST_CASE("vacuum and domain")
{
    const auto ac = algebra("arik-coon");
    const CoherentState vac = make_state(ac.table, complex(0.0), ac.radius);
    CHECK(vac.truncation() == 0);
    CHECK(vac.amplitude(0) == complex(1.0));
    CHECK_THROWS_AS(make_state(ac.table, complex(1.5, 0.0), ac.radius), DomainError);
    const CoherentState edge = make_state(ac.table, complex(std::sqrt(1.995), 0.0), ac.radius);
    CHECK(edge.near_boundary());
    CHECK_FALSE(make_state(ac.table, complex(1.0, 0.0), ac.radius).near_boundary());
}

TEST_CASE("overlap kernel")
{
    const auto h = algebra("harmonic");
    const auto s1 = make_state(h.table, complex(1.0), h.radius);
    const auto s2 = make_state(h.table, complex(2.0), h.radius);
    CHECK(std::abs(overlap(s1, s2) - std::exp(-0.5)) < 1e-10);
    CHECK(std::abs(overlap(s1, s1) - 1.0) < 1e-12);

    const complex z1(0.3, -1.1), z2(-0.7, 0.4);
    const complex k = std::exp(-0.5 * std::norm(z1) - 0.5 * std::norm(z2) + std::conj(z1) * z2);
    const auto a = make_state(h.table, z1, h.radius);
    const auto b = make_state(h.table, z2, h.radius);
    CHECK(std::abs(overlap(a, b) - k) < 1e-10);
    CHECK(std::abs(overlap(b, a) - std::conj(k)) < 1e-10);

    const auto ac = algebra("arik-coon");
    const auto c = make_state(ac.table, complex(0.5), ac.radius);
    CHECK(std::abs(overlap(c, c) - 1.0) < 1e-12);
    CHECK_THROWS_AS(overlap(a, c), std::invalid_argument);
}

TEST_CASE("deformed uncertainty sits on the Robertson bound")
{
    const auto ac = algebra("arik-coon");
    for (double zr : {0.1, 0.5, 1.0}) {
        const auto s = make_state(ac.table, complex(zr, 0.0), ac.radius);
        const FockRep rep = build_rep(ac.table, s.truncation() + 1);
        const double product = uncertainty_product(s, rep);
        const double bound = robertson_bound(s, rep);
        INFO("z = " << zr);
        CHECK(product >= bound - 1e-10);
        CHECK(product < 0.5);
        CHECK(std::abs(product - bound) < 1e-9);
    }
    const auto s = make_state(ac.table, complex(0.5), ac.radius);
    CHECK_THROWS_AS(uncertainty_product(s, build_rep(ac.table, s.truncation())), DimensionMismatch);
}

TEST_CASE("degenerate algebra has a finite exact expansion")
{
    const StructureTable t(make_spec("deg", "1", "3 - 2*n", {}));
    const auto radius = estimate_radius(t);
    const auto s = make_state(t, complex(1.5, 0.5), radius);
    CHECK(s.truncation() == 3);
    CHECK(s.tail_bound() == 0.0);
    const FockRep rep = build_rep(t, 10);
    CHECK(rep.dim() == 4);
    CHECK(eigen_residual(s, rep) > 0.0);  // a|z> = z|z> fails at the top of a finite ladder
    CHECK(uncertainty_product(s, rep) >= robertson_bound(s, rep) - 1e-12);
}

TEST_CASE("eigen residual over random points")
{
    for (const auto& name : catalog::names()) {
        const auto a = algebra(name);
        const double r = a.radius.kind == RadiusEstimate::Kind::Finite ? 0.9 * std::sqrt(a.radius.value) : 2.0;
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 25; ++i) {
            const complex z = std::polar(r * std::sqrt(u(rng)), 6.283185307179586 * u(rng));
            const auto s = make_state(a.table, z, a.radius);
            const FockRep rep = build_rep(a.table, s.truncation() + 1);
            INFO(name << " z = " << z);
            CHECK(eigen_residual(s, rep) <= 1e-6);
        }
    }
}
