#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kpp/pde.hpp"
#include "kpp/speeds.hpp"

using namespace kpp;
using namespace kpp::pde;

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

Parameters homogeneous(double d) {
    Parameters p;
    p.alpha = 1.0;
    p.d_minus = p.d_plus = d;
    p.degenerate_ok = true;
    p.c_het = 0.0;
    return p;
}

} // namespace

TEST_CASE("initial bump geometry and mass") {
    const Grid1D grid{-20.0, 20.0, 401};
    const Field f = initial_bump(grid, 0.0, 5.0, 1.0);
    CHECK(f.values[200] == 1.0);                       // x = 0
    CHECK(f.values[300] == 0.0);                       // x = 10
    CHECK(f.values[100] == 0.0);                       // x = -10
    for (double v : f.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    double mass = 0.0;
    for (int i = 0; i + 1 < grid.nx; ++i)
        mass += 0.5 * (f.values[i] + f.values[i + 1]) * grid.dx();
    CHECK(std::abs(mass - 10.0) <= 2.0 * grid.dx());

    CHECK_THROWS_AS(initial_bump(grid, 0.0, 5.0, 0.0), ValidationError);   // trivial
    CHECK_THROWS_AS(initial_bump(grid, 0.0, 5.0, 1.5), ValidationError);   // above 1
    CHECK_THROWS_AS(initial_bump(grid, 18.0, 5.0, 1.0), ValidationError);  // outside
}

TEST_CASE("front position") {
    Grid1D grid{0.0, 10.0, 11};
    Field f{grid, 0.0, std::vector<double>(11, 0.0)};

    SUBCASE("midpoint of a sharp drop") {
        for (int i = 0; i <= 4; ++i) f.values[i] = 1.0;
        CHECK(front_position(f, 0.5) == doctest::Approx(4.5).epsilon(1e-14));
    }
    SUBCASE("sentinel when the level is never reached") {
        for (auto& v : f.values) v = 0.1;
        CHECK(front_position(f, 0.5) == -std::numeric_limits<double>::infinity());
    }
    SUBCASE("analytic crossing of an exponential profile") {
        Grid1D g2{0.0, 10.0, 101};
        Field f2{g2, 0.0, {}};
        f2.values.resize(101);
        for (int i = 0; i <= 100; ++i) f2.values[i] = std::exp(-g2.x(i));
        const double theta = std::exp(-3.0);
        CHECK(std::abs(front_position(f2, theta) - 3.0) < g2.dx() * g2.dx());
    }
    SUBCASE("level held at the right boundary") {
        for (auto& v : f.values) v = 0.9;
        CHECK(front_position(f, 0.5) == grid.x_max);
    }
}

TEST_CASE("speed estimation on synthetic trajectories") {
    Trajectory traj;
    traj.theta_levels = {0.5};
    traj.front_positions.resize(1);
    for (int j = 0; j <= 300; ++j) {
        const double t = 0.5 * j;
        traj.times.push_back(t);
        traj.front_positions[0].push_back(1.3 * t + 7.0);
    }
    const auto fit = estimate_speed(traj, 0.5, 0.4, false);
    CHECK(std::abs(fit.c_est - 1.3) < 1e-12);
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("log-corrected fit recovers both coefficients") {
        Trajectory tb;
        tb.theta_levels = {0.5};
        tb.front_positions.resize(1);
        for (int j = 1; j <= 400; ++j) {
            const double t = 0.5 * j;
            tb.times.push_back(t);
            tb.front_positions[0].push_back(2.0 * t - 0.75 * std::log(t) + 1.0);
        }
        const auto fb = estimate_speed(tb, 0.5, 0.5, true);
        CHECK(std::abs(fb.c_est - 2.0) < 1e-6);
        CHECK(std::abs(fb.bramson_k - 0.75) < 1e-6);
    }

    SUBCASE("insufficient samples rejected") {
        Trajectory small;
        small.theta_levels = {0.5};
        small.front_positions.resize(1);
        for (int j = 0; j < 5; ++j) {
            small.times.push_back(j);
            small.front_positions[0].push_back(j);
        }
        CHECK_THROWS_AS(estimate_speed(small, 0.5, 0.4, false), NumericsError);
    }
}

TEST_CASE("homogeneous oracle: classical spreading speed within 5%") {
    const Parameters p = homogeneous(1.0);
    const ChiProfile chi = ChiProfile::logistic(p);
    const Grid1D grid{-50.0, 250.0, 3001};
    SolverConfig cfg;
    cfg.t_end = 80.0;
    const Field f0 = initial_bump(grid, 0.0, 5.0, 1.0);
    const Trajectory traj = evolve(f0, cfg, p, chi, {0.5});
    const auto fit = estimate_speed(traj, 0.5, 0.4, false);
    CHECK(std::abs(fit.c_est - 2.0) / 2.0 < 0.05);
    CHECK_FALSE(traj.domain_exhausted);
    CHECK(traj.clipped_mass < 1e-6);
}

TEST_CASE("solver rejects the nonsmooth step profile") {
    const Parameters p = fig2(CaseTag::CaseII_increasing, 1.0);
    const ChiProfile chi = ChiProfile::step(p);
    const Grid1D grid{-20.0, 20.0, 201};
    SolverConfig cfg;
    cfg.t_end = 1.0;
    const Field f0 = initial_bump(grid, 0.0, 5.0, 1.0);
    CHECK_THROWS_AS(evolve(f0, cfg, p, chi, {0.5}), ValidationError);
}

TEST_CASE("discrete comparison principle") {
    const Parameters p = fig2(CaseTag::CaseI_decreasing, 1.5);
    const ChiProfile chi = ChiProfile::logistic(p);
    const Grid1D grid{-30.0, 30.0, 601};
    SolverConfig cfg;
    cfg.t_end = 5.0;
    cfg.keep_snapshots = true;

    const Field lo = initial_bump(grid, 0.0, 4.0, 0.4);
    const Field hi = initial_bump(grid, 0.0, 5.0, 0.8);
    const Trajectory tl = evolve(lo, cfg, p, chi, {0.5});
    const Trajectory th = evolve(hi, cfg, p, chi, {0.5});
    REQUIRE(tl.snapshots.size() == th.snapshots.size());
    for (std::size_t s = 0; s < tl.snapshots.size(); ++s)
        for (int i = 0; i < grid.nx; ++i)
            CHECK(tl.snapshots[s].values[i] <= th.snapshots[s].values[i] + 1e-8);
}

TEST_CASE("lab and comoving frames agree on the measured speed") {
    const Parameters p = fig2(CaseTag::CaseI_decreasing, 1.5);
    const ChiProfile chi = ChiProfile::logistic(p);
    SolverConfig lab;
    lab.t_end = 60.0;
    const Grid1D lab_grid{-100.0, 200.0, 3001};
    const auto lab_fit =
        estimate_speed(evolve(initial_bump(lab_grid, 0.0, 5.0, 1.0), lab, p, chi, {0.5}),
                       0.5, 0.4, false);

    SolverConfig com = lab;
    com.frame = Frame::Comoving; // default upwind advection
    const Grid1D com_grid{-120.0, 80.0, 2001};
    const auto traj = evolve(initial_bump(com_grid, 0.0, 5.0, 1.0), com, p, chi, {0.5});
    auto fit = estimate_speed(traj, 0.5, 0.4, false);
    const double com_speed = fit.c_est + p.c_het; // shift back to the lab frame

    CHECK(std::abs(lab_fit.c_est - com_speed) / lab_fit.c_est < 0.02);
}

TEST_CASE("Strang/CN scheme reproduces the explicit result") {
    const Parameters p = homogeneous(1.0);
    const ChiProfile chi = ChiProfile::logistic(p);
    const Grid1D grid{-40.0, 160.0, 2001};
    SolverConfig cfg;
    cfg.t_end = 50.0;
    cfg.scheme = Scheme::StrangCN;
    const Field f0 = initial_bump(grid, 0.0, 5.0, 1.0);
    const auto fit = estimate_speed(evolve(f0, cfg, p, chi, {0.5}), 0.5, 0.4, false);
    CHECK(std::abs(fit.c_est - 2.0) / 2.0 < 0.05);
}

TEST_CASE("domain exhaustion is flagged and the trajectory truncated") {
    const Parameters p = homogeneous(1.0);
    const ChiProfile chi = ChiProfile::logistic(p);
    const Grid1D grid{-20.0, 30.0, 501};
    SolverConfig cfg;
    cfg.t_end = 50.0;
    const Field f0 = initial_bump(grid, 0.0, 5.0, 1.0);
    const Trajectory traj = evolve(f0, cfg, p, chi, {0.5});
    CHECK(traj.domain_exhausted);
    CHECK(traj.times.back() < 50.0);
}

TEST_CASE("sweep rows preserve order and carry theory values") {
    const Parameters base = fig2(CaseTag::CaseI_decreasing, 1.0);
    const Grid1D grid{-50.0, 150.0, 2001};
    SolverConfig cfg;
    cfg.t_end = 30.0;
    const Field f0 = initial_bump(grid, 0.0, 5.0, 1.0);
    auto chi_builder = [](const Parameters& p) { return ChiProfile::logistic(p); };

    SUBCASE("empty input gives an empty table") {
        CHECK(sweep_chet(base, {}, cfg, f0, chi_builder, 0.5, 0.4).empty());
    }
    SUBCASE("three-case theory column") {
        const auto rows = sweep_chet(base, {0.5, 1.5, 3.0}, cfg, f0, chi_builder, 0.5, 0.4);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].c_theory == 1.0);
        CHECK(rows[1].c_theory == 1.5);
        CHECK(rows[2].c_theory == 2.0);
        for (const auto& r : rows) CHECK(r.ok);
    }
}

TEST_CASE("grid refinement moves the measured speed by less than 1%") {
    const Parameters p = fig2(CaseTag::CaseI_decreasing, 1.5);
    const ChiProfile chi = ChiProfile::logistic(p);
    SolverConfig cfg; // reference experiment defaults
    const Grid1D coarse{-100.0, 450.0, 5501};
    const Grid1D fine{-100.0, 450.0, 11001};
    const auto c1 = estimate_speed(
        evolve(initial_bump(coarse, 0.0, 5.0, 1.0), cfg, p, chi, {0.5}), 0.5, 0.4, false);
    const auto c2 = estimate_speed(
        evolve(initial_bump(fine, 0.0, 5.0, 1.0), cfg, p, chi, {0.5}), 0.5, 0.4, false);
    CHECK(std::abs(c2.c_est - c1.c_est) / c1.c_est < 0.01);
}

TEST_CASE("config invariants") {
    SolverConfig cfg;
    cfg.dt_safety = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.dt_safety = 0.4;
    cfg.t_end = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("single explicit step matches the hand increment") {
    const Parameters p = fig2(CaseTag::CaseI_decreasing, 1.5);
    const ChiProfile chi = ChiProfile::logistic(p);
    const Grid1D grid{-10.0, 10.0, 201};
    Field f{grid, 0.0, std::vector<double>(201, 0.5)};
    SolverConfig cfg;
    const Field g = step(f, cfg, p, chi);
    const double dt = time_step(cfg, p, grid);
    CHECK(g.t == doctest::Approx(dt).epsilon(1e-14));
    for (int i = 0; i + 1 < grid.nx; ++i)
        CHECK(g.values[i] == doctest::Approx(0.5 + dt * p.alpha * 0.25).epsilon(1e-14));
}
