#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kpp/speeds.hpp"

using namespace kpp;
using namespace kpp::speeds;

namespace {

Parameters fig2(CaseTag tag, double c_het) {
    Parameters p;
    p.alpha = 1.0;
    p.d_minus = 0.25;
    p.d_plus = 1.0;
    p.c_het = c_het;
    p.chi_steepness = 2.0;
    p.case_tag = tag;
    return p;
}

// Random admissible draw with c_het inside the anomalous window.
Parameters random_anomalous(std::mt19937& rng) {
    std::uniform_real_distribution<double> ad(0.3, 3.0), dd(0.1, 1.0), rd(1.05, 8.0),
        ud(0.0, 1.0);
    Parameters p;
    p.case_tag = CaseTag::CaseII_increasing;
    p.alpha = ad(rng);
    p.d_minus = dd(rng);
    p.d_plus = p.d_minus * rd(rng);
    const double cp = c_plus(p);
    const double ci = c_intersection(p);
    p.c_het = cp + (ci - cp - 2e-6) * ud(rng) + 1e-6;
    return p;
}

} // namespace

TEST_CASE("linear speeds") {
    CHECK(linear_speeds(fig2(CaseTag::CaseI_decreasing, 1.0)) ==
          std::pair<double, double>{1.0, 2.0});

    Parameters deg;
    deg.alpha = 4.0;
    deg.d_minus = deg.d_plus = 1.0;
    deg.degenerate_ok = true;
    CHECK(linear_speeds(deg) == std::pair<double, double>{4.0, 4.0});

    Parameters q;
    q.alpha = 0.5;
    q.d_minus = 0.5;
    q.d_plus = 2.0;
    CHECK(linear_speeds(q).first == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(linear_speeds(q).second == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("intersection speed") {
    const Parameters p = fig2(CaseTag::CaseII_increasing, 3.0);
    CHECK(c_intersection(p) ==
          doctest::Approx(2.0 * (2.0 + std::sqrt(3.0))).epsilon(1e-14));

    Parameters q = p;
    q.d_minus = 0.5;
    CHECK(c_intersection(q) ==
          doctest::Approx(2.0 * (std::sqrt(2.0) + 1.0)).epsilon(1e-13));

    // d_+/d_- -> 1+ limit: c_int -> c_+.
    Parameters lim = p;
    lim.d_minus = lim.d_plus * (1.0 - 1e-10);
    CHECK(c_intersection(lim) == doctest::Approx(c_plus(lim)).epsilon(1e-4));

    Parameters deg = p;
    deg.d_minus = deg.d_plus;
    deg.degenerate_ok = true;
    CHECK_THROWS_AS(c_intersection(deg), RegimeError);
}

TEST_CASE("lambda_of_c") {
    const Parameters p = fig2(CaseTag::CaseI_decreasing, 1.0);
    CHECK(lambda_of_c(1.0, p) == doctest::Approx(2.0).epsilon(1e-12)); // double root
    CHECK(lambda_of_c(2.0, p) ==
          doctest::Approx(2.0 * (2.0 - std::sqrt(3.0))).epsilon(1e-12));
    CHECK_THROWS_AS(lambda_of_c(0.9, p), RegimeError);

    // Root property at random speeds.
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> cd(1.0, 6.0);
    for (int k = 0; k < 50; ++k) {
        const double c = cd(rng);
        const double l = lambda_of_c(c, p);
        CHECK(std::abs(p.d_minus * l * l - c * l + p.alpha) <= 1e-12 * p.alpha);
    }
}

TEST_CASE("dispersion function g") {
    const Parameters p = fig2(CaseTag::CaseII_increasing, 3.0);
    CHECK(g(1.0, p) == doctest::Approx(-11.0).epsilon(1e-13));
    CHECK(g(2.0, p) == doctest::Approx(9.0 - 4.0 * (1.0 + 2.0 * (2.0 - std::sqrt(3.0))))
                           .epsilon(1e-12));
    // g(c_het) = c_het^2 - 4 d_+ alpha.
    CHECK(g(3.0, p) == doctest::Approx(5.0).epsilon(1e-13));
    CHECK_THROWS_AS(g(0.5, p), RegimeError);
    CHECK_THROWS_AS(g(3.5, p), RegimeError);

    // Strict monotonicity on [c_-, c_het].
    double prev = g(1.0, p);
    for (int i = 1; i <= 40; ++i) {
        const double c = 1.0 + 2.0 * i / 40.0;
        const double v = g(c, p);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("anomalous speed: closed form, bisection, endpoints") {
    const Parameters p = fig2(CaseTag::CaseII_increasing, 3.0);
    CHECK(anomalous_speed(p) == doctest::Approx(1.4449788301796342).epsilon(1e-9));
    CHECK(std::abs(anomalous_speed(p) - anomalous_speed_bisect(p)) < 1e-10);

    // Formula continuity at both window ends.
    Parameters q = p;
    q.c_het = c_plus(q);
    CHECK(anomalous_speed_formula(q) == doctest::Approx(2.0).epsilon(1e-12));
    q.c_het = c_intersection(q);
    CHECK(anomalous_speed_formula(q) == doctest::Approx(1.0).epsilon(1e-12));

    q.c_het = 1.0; // below c_+
    CHECK_THROWS_AS(anomalous_speed(q), RegimeError);
    q.c_het = 8.0; // above c_int
    CHECK_THROWS_AS(anomalous_speed(q), RegimeError);
}

TEST_CASE("lambda_star") {
    Parameters p = fig2(CaseTag::CaseII_increasing, 3.0);
    CHECK(lambda_star(p) == doctest::Approx(-1.25).epsilon(1e-14));
    p.c_het = c_plus(p);
    CHECK(lambda_star(p) == doctest::Approx(0.0).epsilon(1e-14));
    p.c_het = 0.0;
    CHECK(lambda_star(p) == doctest::Approx(p.alpha).epsilon(1e-14));
}

TEST_CASE("decay rates and Vieta") {
    Parameters p = fig2(CaseTag::CaseI_decreasing, 1.5);
    const auto [lw, ls] = decay_rates(p);
    CHECK(lw == doctest::Approx(0.7639320225).epsilon(1e-9));
    CHECK(ls == doctest::Approx(5.2360679775).epsilon(1e-9));
    CHECK(std::abs(lw * ls - p.alpha / p.d_minus) < 1e-12);
    CHECK(std::abs(lw + ls - p.c_het / p.d_minus) < 1e-12);

    p.c_het = 1.0; // = c_-: double root c_-/(2 d_-)
    const auto [w2, s2] = decay_rates(p);
    CHECK(w2 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s2 == doctest::Approx(2.0).epsilon(1e-12));

    p.c_het = 0.5;
    CHECK_THROWS_AS(decay_rates(p), RegimeError);
}

TEST_CASE("mu_super and the derivative-jump ordering") {
    Parameters p = fig2(CaseTag::CaseII_increasing, 3.0);
    CHECK(mu_super(p) == doctest::Approx(1.5).epsilon(1e-14));
    const double lam = lambda_of_c(anomalous_speed(p), p);
    CHECK(lam == doctest::Approx(0.8038475773).epsilon(1e-9));
    CHECK(lam < mu_super(p));

    p.c_het = c_plus(p);
    CHECK(mu_super(p) == doctest::Approx(std::sqrt(p.alpha / p.d_plus)).epsilon(1e-12));

    p.c_het = 1.0;
    CHECK_THROWS_AS(mu_super(p), RegimeError);
}

TEST_CASE("spreading speed selector") {
    SUBCASE("case I branches") {
        auto rep = spreading_speed(fig2(CaseTag::CaseI_decreasing, 1.5));
        CHECK(rep.c_star == 1.5);
        CHECK(rep.regime == Regime::CaseI_locked);
        rep = spreading_speed(fig2(CaseTag::CaseI_decreasing, 0.5));
        CHECK(rep.c_star == 1.0);
        CHECK(rep.regime == Regime::CaseI_slow);
        rep = spreading_speed(fig2(CaseTag::CaseI_decreasing, 3.0));
        CHECK(rep.c_star == 2.0);
        CHECK(rep.regime == Regime::CaseI_fast);
    }
    SUBCASE("case II branches") {
        auto rep = spreading_speed(fig2(CaseTag::CaseII_increasing, 0.5));
        CHECK(rep.c_star == 2.0);
        CHECK(rep.regime == Regime::CaseII_full);
        rep = spreading_speed(fig2(CaseTag::CaseII_increasing, 3.0));
        CHECK(rep.c_star == doctest::Approx(1.4449788301796342).epsilon(1e-9));
        CHECK(rep.regime == Regime::CaseII_anomalous);
        CHECK(rep.mu_super.has_value());
        rep = spreading_speed(fig2(CaseTag::CaseII_increasing, 8.0));
        CHECK(rep.c_star == 1.0);
        CHECK(rep.regime == Regime::CaseII_detached);
        CHECK_FALSE(rep.boundary_ambiguity);
    }
    SUBCASE("open boundary point flagged") {
        Parameters p = fig2(CaseTag::CaseII_increasing, 0.0);
        p.c_het = c_intersection(p);
        const auto rep = spreading_speed(p);
        CHECK(rep.c_star == rep.c_minus);
        CHECK(rep.boundary_ambiguity);
    }
    SUBCASE("degenerate refused") {
        Parameters deg = fig2(CaseTag::CaseI_decreasing, 1.0);
        deg.d_minus = deg.d_plus;
        deg.degenerate_ok = true;
        CHECK_THROWS_AS(spreading_speed(deg), RegimeError);
    }
}

TEST_CASE("dispersion residuals") {
    const Parameters p = fig2(CaseTag::CaseII_increasing, 3.0);
    const double cu = anomalous_speed(p);
    const auto [r1, r2] = dispersion_residuals(lambda_of_c(cu, p), mu_super(p), cu, p);
    CHECK(std::abs(r1) < 1e-10);
    CHECK(std::abs(r2) < 1e-10);

    Parameters q = fig2(CaseTag::CaseI_decreasing, 1.0);
    const auto [s1, s2] = dispersion_residuals(1.0, 1.0, 1.0, q);
    CHECK(s1 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(s2 == doctest::Approx(1.0).epsilon(1e-14)); // d_+ - c_het + 0 + alpha

    const auto [z1, z2] = dispersion_residuals(0.0, 0.0, 1.3, q);
    CHECK(z1 == q.alpha);
    CHECK(z2 == q.alpha);
}

TEST_CASE("absolute spectrum edge") {
    const Parameters p = fig2(CaseTag::CaseII_increasing, 3.0);
    CHECK(std::abs(absolute_spectrum_edge(anomalous_speed(p), p)) < 1e-10);
    CHECK(absolute_spectrum_edge(p.c_het, p) ==
          doctest::Approx(lambda_star(p)).epsilon(1e-12));

    Parameters q = fig2(CaseTag::CaseII_increasing, 8.0);
    CHECK(absolute_spectrum_edge(c_minus(q), q) <= 0.0);
    CHECK_THROWS_AS(absolute_spectrum_edge(0.2, q), RegimeError);
}

TEST_CASE("anomalous root and bounds over random parameters") {
    std::mt19937 rng(2026);
    for (int k = 0; k < 60; ++k) {
        const Parameters p = random_anomalous(rng);
        const double cu = anomalous_speed(p);
        CHECK(std::abs(g(cu, p)) < 1e-10 * std::max(1.0, p.c_het * p.c_het));
        CHECK(std::abs(cu - anomalous_speed_bisect(p)) < 1e-10);
        CHECK(cu >= c_minus(p) - 1e-12);
        CHECK(cu <= c_plus(p) + 1e-12);
        CHECK(g(c_plus(p), p) > 0.0);

        const auto rep = spreading_speed(p);
        CHECK(rep.c_star >= rep.c_minus - 1e-12);
        CHECK(rep.c_star <= rep.c_plus + 1e-12);

        // eqlambdac consistency: lambda(c_u*) (c_het - c_u*) = -lambda_star.
        const double lam = lambda_of_c(cu, p);
        CHECK(std::abs(lam * (p.c_het - cu) + lambda_star(p)) < 1e-10);
    }
}

TEST_CASE("endpoint continuity at window edges") {
    Parameters p = fig2(CaseTag::CaseII_increasing, 0.0);
    p.c_het = c_plus(p) + 1e-6;
    CHECK(std::abs(anomalous_speed(p) - c_plus(p)) < 1e-4);
    p.c_het = c_intersection(p) - 1e-6;
    CHECK(std::abs(anomalous_speed(p) - c_minus(p)) < 1e-4);
}
