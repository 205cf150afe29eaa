#include "kpp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kpp/speeds.hpp"

namespace kpp::verify {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_auto(double v) { return std::isnan(v); }

double get(const std::map<std::string, double>& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end())
        throw NumericsError("verify: missing constant '" + key + "'");
    return it->second;
}

// Root of an increasing function on [lo, hi] with f(lo) < 0 < f(hi).
double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// general super: min{1, C e^{-lambda (x - c t)}}, lambda = c_+/(2 d_+)
// ---------------------------------------------------------------------------

ComparisonFunction assemble_general_super(const Parameters& p,
                                          std::map<std::string, double> k) {
    const double C = get(k, "C");
    const double lam = get(k, "lambda");
    const double c = get(k, "c");
    const double b = std::log(C) / lam; // interface offset in the moving frame

    ComparisonFunction fn;
    fn.name = "general_super";
    fn.kind = Kind::Super;
    fn.constants = std::move(k);
    fn.exponent_keys = {"lambda"};

    Piece one;
    one.name = "one";
    one.contains = [c, b](double t, double x) { return x - c * t <= b; };
    one.value = [](double, double) { return 1.0; };
    one.d_t = [](double, double) { return 0.0; };
    one.d_x = [](double, double) { return 0.0; };
    one.d_xx = [](double, double) { return 0.0; };

    Piece expo;
    expo.name = "exponential";
    expo.contains = [c, b](double t, double x) { return x - c * t > b; };
    auto val = [C, lam, c](double t, double x) { return C * std::exp(-lam * (x - c * t)); };
    expo.value = val;
    expo.d_t = [val, lam, c](double t, double x) { return lam * c * val(t, x); };
    expo.d_x = [val, lam](double t, double x) { return -lam * val(t, x); };
    expo.d_xx = [val, lam](double t, double x) { return lam * lam * val(t, x); };

    fn.pieces = {one, expo};
    fn.breakpoints = {{"min_kink", c, b, -1}};
    fn.rebuild = [p](const std::map<std::string, double>& m) {
        return assemble_general_super(p, m);
    };
    return fn;
}

// ---------------------------------------------------------------------------
// general sub: two cosine arcs glued C^1 at the moving origin
// ---------------------------------------------------------------------------

ComparisonFunction assemble_general_sub(const Parameters& p,
                                        std::map<std::string, double> k) {
    const double c = get(k, "c");
    const double eps = get(k, "eps");
    const double lam = get(k, "lambda");
    const double beta = get(k, "beta");
    const double gam = get(k, "gamma");
    const double om = get(k, "omega");
    const double zs_m = get(k, "z_star_minus");
    const double zs_p = get(k, "z_star_plus");
    const double rho = get(k, "rho");
    const double edge_l = get(k, "edge_left");
    const double edge_r = get(k, "edge_right");

    auto arc = [](double a, double b) {
        return [a, b](double y) { return std::exp(-a * y) * std::cos(b * y); };
    };
    auto arc_d = [](double a, double b) {
        return [a, b](double y) {
            return std::exp(-a * y) * (-a * std::cos(b * y) - b * std::sin(b * y));
        };
    };
    auto arc_dd = [](double a, double b) {
        return [a, b](double y) {
            return std::exp(-a * y) *
                   ((a * a - b * b) * std::cos(b * y) + 2.0 * a * b * std::sin(b * y));
        };
    };

    ComparisonFunction fn;
    fn.name = "general_sub";
    fn.kind = Kind::Sub;
    fn.constants = std::move(k);
    fn.exponent_keys = {"lambda", "beta", "gamma", "omega"};

    Piece zl;
    zl.name = "zero_left";
    zl.contains = [c, edge_l](double t, double x) { return x - c * t <= edge_l; };
    zl.value = zl.d_t = zl.d_x = zl.d_xx = [](double, double) { return 0.0; };

    Piece plus;
    plus.name = "plus_arc";
    plus.contains = [c, edge_l](double t, double x) {
        const double xi = x - c * t;
        return xi > edge_l && xi <= 0.0;
    };
    {
        auto f = arc(gam, om);
        auto fd = arc_d(gam, om);
        auto fdd = arc_dd(gam, om);
        plus.value = [eps, rho, f, zs_p, c](double t, double x) {
            return eps * rho * f(x - c * t + zs_p);
        };
        plus.d_x = [eps, rho, fd, zs_p, c](double t, double x) {
            return eps * rho * fd(x - c * t + zs_p);
        };
        plus.d_xx = [eps, rho, fdd, zs_p, c](double t, double x) {
            return eps * rho * fdd(x - c * t + zs_p);
        };
        plus.d_t = [dx = plus.d_x, c](double t, double x) { return -c * dx(t, x); };
    }

    Piece minus;
    minus.name = "minus_arc";
    minus.contains = [c, edge_r](double t, double x) {
        const double xi = x - c * t;
        return xi > 0.0 && xi < edge_r;
    };
    {
        auto f = arc(lam, beta);
        auto fd = arc_d(lam, beta);
        auto fdd = arc_dd(lam, beta);
        minus.value = [eps, f, zs_m, c](double t, double x) {
            return eps * f(x - c * t + zs_m);
        };
        minus.d_x = [eps, fd, zs_m, c](double t, double x) {
            return eps * fd(x - c * t + zs_m);
        };
        minus.d_xx = [eps, fdd, zs_m, c](double t, double x) {
            return eps * fdd(x - c * t + zs_m);
        };
        minus.d_t = [dx = minus.d_x, c](double t, double x) { return -c * dx(t, x); };
    }

    Piece zr;
    zr.name = "zero_right";
    zr.contains = [c, edge_r](double t, double x) { return x - c * t >= edge_r; };
    zr.value = zr.d_t = zr.d_x = zr.d_xx = [](double, double) { return 0.0; };

    fn.pieces = {zl, plus, minus, zr};
    fn.breakpoints = {{"support_left", c, edge_l, +1},
                      {"c1_glue", c, 0.0, 0},
                      {"support_right", c, edge_r, +1}};
    fn.rebuild = [p](const std::map<std::string, double>& m) {
        return assemble_general_sub(p, m);
    };
    return fn;
}

// ---------------------------------------------------------------------------
// min{1, e^{-lambda (x - c t - tau)}} family (slow and locked supers)
// ---------------------------------------------------------------------------

ComparisonFunction assemble_exp_super(const Parameters& p, const std::string& name,
                                      std::map<std::string, double> k) {
    const double lam = get(k, "lambda");
    const double c = get(k, "c");
    const double tau = get(k, "tau");

    ComparisonFunction fn;
    fn.name = name;
    fn.kind = Kind::Super;
    fn.constants = std::move(k);
    fn.exponent_keys = {"lambda"};

    Piece one;
    one.name = "one";
    one.contains = [c, tau](double t, double x) { return x <= c * t + tau; };
    one.value = [](double, double) { return 1.0; };
    one.d_t = one.d_x = one.d_xx = [](double, double) { return 0.0; };

    Piece expo;
    expo.name = "exponential";
    expo.contains = [c, tau](double t, double x) { return x > c * t + tau; };
    auto val = [lam, c, tau](double t, double x) {
        return std::exp(-lam * (x - c * t - tau));
    };
    expo.value = val;
    expo.d_t = [val, lam, c](double t, double x) { return lam * c * val(t, x); };
    expo.d_x = [val, lam](double t, double x) { return -lam * val(t, x); };
    expo.d_xx = [val, lam](double t, double x) { return lam * lam * val(t, x); };

    fn.pieces = {one, expo};
    fn.breakpoints = {{"min_kink", c, tau, -1}};
    fn.rebuild = [p, name](const std::map<std::string, double>& m) {
        return assemble_exp_super(p, name, m);
    };
    return fn;
}

// ---------------------------------------------------------------------------
// cosine bump machinery shared by the two bump sub-solutions
// ---------------------------------------------------------------------------

double beta_plus(double eps, double c, const Parameters& p) {
    const double disc = 4.0 * p.d_plus * (p.alpha - eps) - c * c;
    if (!(disc > 0.0))
        throw ValidationError("bump: 4 d_+ (alpha - eps) must exceed c^2");
    return std::sqrt(disc) / (2.0 * p.d_plus);
}

// Solve e^{s gamma (pi/(2 beta) + z)} sin(beta z) = eps for z > 0; s = -1 is
// the decayed (right) endpoint, s = +1 the amplified (left) one.
double bump_z_root(double eps, double gamma_t, double beta, int s) {
    const double quarter = M_PI / (2.0 * beta);
    auto f = [&](double z) {
        return std::exp(s * gamma_t * (quarter + z)) * std::sin(beta * z) - eps;
    };
    double hi;
    if (s < 0) {
        hi = std::atan(beta / gamma_t) / beta; // maximum of the left-hand side
        if (f(hi) <= 0.0)
            throw NumericsError("bump: endpoint equation root not bracketed; reduce eps");
    } else {
        hi = quarter * (1.0 - 1e-12);
    }
    return bisect_root(f, 0.0, hi);
}

struct BumpData {
    double c, eps, beta, gamma_t, z_plus, z_minus, delta_eps, tau;
    double edge_l, edge_r, threshold_tau, A;
};

// right_tail: Case II bump living in the chi(+inf) = d_+ tail (support shifted
// by +tau); otherwise the Case I bump in the chi(-inf) = d_+ tail (shift -tau).
BumpData bump_constants(const Parameters& p, const ChiProfile& chi, double c, double eps,
                        double tau, bool right_tail) {
    const double eps_cap = 0.5 * (p.alpha - c * c / (4.0 * p.d_plus));
    if (!(eps_cap > 0.0))
        throw ValidationError("bump: speed too close to c_plus, no admissible eps");
    if (!(eps > 0.0 && eps < eps_cap))
        throw ValidationError("bump: eps must lie in (0, " + std::to_string(eps_cap) + ")");

    BumpData b;
    b.c = c;
    b.eps = eps;
    b.gamma_t = c / (2.0 * p.d_plus);
    b.beta = beta_plus(eps, c, p);
    b.z_plus = bump_z_root(eps, b.gamma_t, b.beta, -1);
    b.z_minus = bump_z_root(eps, b.gamma_t, b.beta, +1);
    const double quarter = M_PI / (2.0 * b.beta);
    b.edge_l = -quarter - b.z_minus;
    b.edge_r = quarter + b.z_plus;

    // delta_eps from the bump maximum and the KPP concavity threshold eps/alpha.
    const double xi_pk = -std::atan(b.gamma_t / b.beta) / b.beta;
    const double peak = std::exp(-b.gamma_t * xi_pk) * std::cos(b.beta * xi_pk) + eps;
    b.delta_eps = 0.9 * (eps / p.alpha) / peak;

    // Admissibility (K_eps + 1) eps <= alpha, K from the curvature bound at the
    // amplified end of the bump.
    auto K_of = [&](double e) {
        const double bb = beta_plus(e, c, p);
        const double zm = bump_z_root(e, b.gamma_t, bb, +1);
        const double q = M_PI / (2.0 * bb);
        return (b.gamma_t + bb) * (b.gamma_t + bb) * std::exp(b.gamma_t * (q + zm));
    };
    auto G = [&](double e) { return (K_of(e) + 1.0) * e - p.alpha; };
    if (G(eps) > 0.0) {
        const double hi = 0.999 * eps_cap;
        const double eps0 = G(hi) <= 0.0 ? hi : bisect_root(G, 1e-12, hi);
        throw ValidationError("bump: eps violates (K+1) eps <= alpha; need eps < " +
                              std::to_string(eps0));
    }

    // Tail threshold A: |chi - d_+| <= eps^2 beyond it.
    const double target = p.d_plus - eps * eps;
    if (target <= p.d_minus) {
        b.A = 0.0;
    } else if (right_tail) {
        b.A = chi_inverse(chi, target); // chi increasing: chi >= target right of A
    } else {
        b.A = -chi_inverse(chi, target); // chi decreasing: chi >= target left of -A
    }
    b.threshold_tau = b.A + quarter + (right_tail ? b.z_minus : b.z_plus);

    b.tau = is_auto(tau) ? 1.05 * b.threshold_tau + 0.5 : tau;
    if (!(b.tau > b.threshold_tau))
        throw ValidationError("bump: tau must exceed the tail threshold " +
                              std::to_string(b.threshold_tau));
    return b;
}

ComparisonFunction assemble_bump_sub(const Parameters& p, const std::string& name,
                                     bool right_tail, std::map<std::string, double> k) {
    const double c = get(k, "c");
    const double eps = get(k, "eps");
    const double beta = get(k, "beta_p");
    const double gam = get(k, "gamma_t");
    const double delta = get(k, "delta_eps");
    const double tau = get(k, "tau");
    const double edge_l = get(k, "edge_left");
    const double edge_r = get(k, "edge_right");
    const double shift = right_tail ? -tau : tau; // xi = x - c t + shift

    ComparisonFunction fn;
    fn.name = name;
    fn.kind = Kind::Sub;
    fn.constants = std::move(k);
    fn.exponent_keys = {"gamma_t", "beta_p"};

    auto xi_of = [c, shift](double t, double x) { return x - c * t + shift; };

    Piece zl;
    zl.name = "zero_left";
    zl.contains = [xi_of, edge_l](double t, double x) { return xi_of(t, x) <= edge_l; };
    zl.value = zl.d_t = zl.d_x = zl.d_xx = [](double, double) { return 0.0; };

    Piece bump;
    bump.name = "bump";
    bump.contains = [xi_of, edge_l, edge_r](double t, double x) {
        const double xi = xi_of(t, x);
        return xi > edge_l && xi < edge_r;
    };
    auto Pd = [gam, beta](double y) {
        return std::exp(-gam * y) * (-gam * std::cos(beta * y) - beta * std::sin(beta * y));
    };
    auto Pdd = [gam, beta](double y) {
        return std::exp(-gam * y) * ((gam * gam - beta * beta) * std::cos(beta * y) +
                                     2.0 * gam * beta * std::sin(beta * y));
    };
    bump.value = [delta, eps, gam, beta, xi_of](double t, double x) {
        const double y = xi_of(t, x);
        return delta * (std::exp(-gam * y) * std::cos(beta * y) + eps);
    };
    bump.d_x = [delta, Pd, xi_of](double t, double x) { return delta * Pd(xi_of(t, x)); };
    bump.d_xx = [delta, Pdd, xi_of](double t, double x) { return delta * Pdd(xi_of(t, x)); };
    bump.d_t = [dx = bump.d_x, c](double t, double x) { return -c * dx(t, x); };

    Piece zr;
    zr.name = "zero_right";
    zr.contains = [xi_of, edge_r](double t, double x) { return xi_of(t, x) >= edge_r; };
    zr.value = zr.d_t = zr.d_x = zr.d_xx = [](double, double) { return 0.0; };

    fn.pieces = {zl, bump, zr};
    fn.breakpoints = {{"support_left", c, edge_l - shift, +1},
                      {"support_right", c, edge_r - shift, +1}};
    fn.rebuild = [p, name, right_tail](const std::map<std::string, double>& m) {
        return assemble_bump_sub(p, name, right_tail, m);
    };
    return fn;
}

// ---------------------------------------------------------------------------
// three-piece supers (anomalous and detached regimes)
// ---------------------------------------------------------------------------

ComparisonFunction assemble_three_piece_super(const Parameters& p, const std::string& name,
                                              std::map<std::string, double> k) {
    const double C = get(k, "C");
    const double c = get(k, "c");
    const double lam = get(k, "lambda");
    const double mu = get(k, "mu");
    const double tau = get(k, "tau");
    const double c_het = p.c_het;

    ComparisonFunction fn;
    fn.name = name;
    fn.kind = Kind::Super;
    fn.constants = std::move(k);
    fn.exponent_keys = {"lambda", "mu"};

    Piece one;
    one.name = "one";
    one.contains = [c, tau](double t, double x) { return x <= c * t - tau; };
    one.value = [C](double, double) { return C; };
    one.d_t = one.d_x = one.d_xx = [](double, double) { return 0.0; };

    Piece mid;
    mid.name = "behind_heterogeneity";
    mid.contains = [c, tau, c_het](double t, double x) {
        return x > c * t - tau && x < c_het * t - tau;
    };
    auto mval = [C, lam, c, tau](double t, double x) {
        return C * std::exp(-lam * (x - c * t + tau));
    };
    mid.value = mval;
    mid.d_t = [mval, lam, c](double t, double x) { return lam * c * mval(t, x); };
    mid.d_x = [mval, lam](double t, double x) { return -lam * mval(t, x); };
    mid.d_xx = [mval, lam](double t, double x) { return lam * lam * mval(t, x); };

    Piece right;
    right.name = "ahead_of_heterogeneity";
    right.contains = [c_het, tau](double t, double x) { return x >= c_het * t - tau; };
    auto rval = [C, lam, mu, c, tau, c_het](double t, double x) {
        return C * std::exp(-lam * (c_het - c) * t) *
               std::exp(-mu * (x - c_het * t + tau));
    };
    right.value = rval;
    right.d_t = [rval, lam, mu, c, c_het](double t, double x) {
        return (-lam * (c_het - c) + mu * c_het) * rval(t, x);
    };
    right.d_x = [rval, mu](double t, double x) { return -mu * rval(t, x); };
    right.d_xx = [rval, mu](double t, double x) { return mu * mu * rval(t, x); };

    fn.pieces = {one, mid, right};
    fn.breakpoints = {{"min_kink", c, -tau, -1}, {"exponent_switch", c_het, -tau, -1}};
    fn.rebuild = [p, name](const std::map<std::string, double>& m) {
        return assemble_three_piece_super(p, name, m);
    };
    return fn;
}

// ---------------------------------------------------------------------------
// pulled sub-solutions (difference of exponentials, optionally glued to phi)
// ---------------------------------------------------------------------------

ComparisonFunction assemble_sub_pull(const Parameters& p, std::map<std::string, double> k) {
    const double c = get(k, "c");
    const double eps = get(k, "eps");
    const double lam = get(k, "lambda_eps");
    const double gam = get(k, "gamma_eps");
    const double tau = get(k, "tau");

    ComparisonFunction fn;
    fn.name = "case2_sub_pull";
    fn.kind = Kind::Sub;
    fn.op = OperatorTag::LinearM;
    fn.op_eps = eps;
    fn.constants = std::move(k);
    fn.exponent_keys = {"lambda_eps", "gamma_eps"};

    auto xi_of = [c, tau](double t, double x) { return x - c * t + tau; };

    Piece zero;
    zero.name = "zero";
    zero.contains = [xi_of](double t, double x) { return xi_of(t, x) <= 0.0; };
    zero.value = zero.d_t = zero.d_x = zero.d_xx = [](double, double) { return 0.0; };

    Piece diff;
    diff.name = "difference";
    diff.contains = [xi_of](double t, double x) { return xi_of(t, x) > 0.0; };
    diff.value = [lam, gam, xi_of](double t, double x) {
        const double xi = xi_of(t, x);
        return std::exp(-lam * xi) - std::exp(-(lam + gam) * xi);
    };
    diff.d_x = [lam, gam, xi_of](double t, double x) {
        const double xi = xi_of(t, x);
        return -lam * std::exp(-lam * xi) + (lam + gam) * std::exp(-(lam + gam) * xi);
    };
    diff.d_xx = [lam, gam, xi_of](double t, double x) {
        const double xi = xi_of(t, x);
        return lam * lam * std::exp(-lam * xi) -
               (lam + gam) * (lam + gam) * std::exp(-(lam + gam) * xi);
    };
    diff.d_t = [dx = diff.d_x, c](double t, double x) { return -c * dx(t, x); };

    fn.pieces = {zero, diff};
    fn.breakpoints = {{"support_left", c, -tau, +1}};
    fn.rebuild = [p](const std::map<std::string, double>& m) {
        return assemble_sub_pull(p, m);
    };
    return fn;
}

ComparisonFunction assemble_sub_full(const Parameters& p, const ChiProfile& chi,
                                     const waves::PhiSolution& phi,
                                     std::map<std::string, double> k) {
    const double c = get(k, "c");
    const double eps = get(k, "eps");
    const double lam = get(k, "lambda_eps");
    const double gam = get(k, "gamma_eps");
    const double tau = get(k, "tau");
    const double c_tau = get(k, "c_tau");
    const double x_eps = get(k, "x_eps");
    const double coeff = get(k, "phi_coeff"); // alpha - lambda_star + eps
    const double c_het = p.c_het;

    ComparisonFunction fn;
    fn.name = "case2_sub_full";
    fn.kind = Kind::Sub;
    fn.op = OperatorTag::LinearM;
    fn.op_eps = eps;
    fn.delta_scale = get(k, "delta_scale");
    fn.constants = std::move(k);
    fn.exponent_keys = {"lambda_eps", "gamma_eps"};

    auto xi_of = [c, tau](double t, double x) { return x - c * t + tau; };
    auto v_of = [lam, gam](double xi) {
        return xi > 0.0 ? std::exp(-lam * xi) - std::exp(-(lam + gam) * xi) : 0.0;
    };
    auto v_dxi = [lam, gam](double xi) {
        return xi > 0.0
                   ? -lam * std::exp(-lam * xi) + (lam + gam) * std::exp(-(lam + gam) * xi)
                   : 0.0;
    };

    Piece a_zero;
    a_zero.name = "pull_zero";
    a_zero.contains = [c_het, tau, xi_of](double t, double x) {
        return x - c_het * t <= -tau / 2.0 && xi_of(t, x) <= 0.0;
    };
    a_zero.value = a_zero.d_t = a_zero.d_x = a_zero.d_xx = [](double, double) {
        return 0.0;
    };

    Piece a_diff;
    a_diff.name = "pull_difference";
    a_diff.contains = [c_het, tau, xi_of](double t, double x) {
        return x - c_het * t <= -tau / 2.0 && xi_of(t, x) > 0.0;
    };
    a_diff.value = [v_of, xi_of](double t, double x) { return v_of(xi_of(t, x)); };
    a_diff.d_x = [v_dxi, xi_of](double t, double x) { return v_dxi(xi_of(t, x)); };
    a_diff.d_xx = [lam, gam, xi_of](double t, double x) {
        const double xi = xi_of(t, x);
        return lam * lam * std::exp(-lam * xi) -
               (lam + gam) * (lam + gam) * std::exp(-(lam + gam) * xi);
    };
    a_diff.d_t = [dx = a_diff.d_x, c](double t, double x) { return -c * dx(t, x); };

    // Glued piece: c_tau V(t) phi(x - c_het t); phi'' comes from phi's ODE, so
    // the linear operator reduces to the analytic gluing inequality exactly.
    auto V = [v_of, c_het, c, tau](double t) { return v_of((c_het - c) * t + tau / 2.0); };
    auto Vp = [v_dxi, c_het, c, tau](double t) {
        return (c_het - c) * v_dxi((c_het - c) * t + tau / 2.0);
    };
    auto phi_dd = [phi, chi, c_het, coeff](double z) {
        const double f = phi.value(z);
        const double df = phi.derivative(z);
        return -(c_het * df + coeff * f) / chi_eval(chi, z);
    };

    Piece b_phi;
    b_phi.name = "eigenfunction";
    b_phi.contains = [c_het, tau, x_eps](double t, double x) {
        const double z = x - c_het * t;
        return z > -tau / 2.0 && z <= x_eps;
    };
    b_phi.value = [c_tau, V, phi, c_het](double t, double x) {
        return c_tau * V(t) * phi.value(x - c_het * t);
    };
    b_phi.d_x = [c_tau, V, phi, c_het](double t, double x) {
        return c_tau * V(t) * phi.derivative(x - c_het * t);
    };
    b_phi.d_xx = [c_tau, V, phi_dd, c_het](double t, double x) {
        return c_tau * V(t) * phi_dd(x - c_het * t);
    };
    b_phi.d_t = [c_tau, V, Vp, phi, c_het](double t, double x) {
        const double z = x - c_het * t;
        return c_tau * (Vp(t) * phi.value(z) - c_het * V(t) * phi.derivative(z));
    };

    Piece b_zero;
    b_zero.name = "beyond_cutoff";
    b_zero.contains = [c_het, x_eps](double t, double x) {
        return x - c_het * t > x_eps;
    };
    b_zero.value = b_zero.d_t = b_zero.d_x = b_zero.d_xx = [](double, double) {
        return 0.0;
    };

    fn.pieces = {a_zero, a_diff, b_phi, b_zero};
    fn.breakpoints = {{"support_left", c, -tau, +1},
                      {"glue", c_het, -tau / 2.0, +1},
                      {"cutoff", c_het, x_eps, +1}};
    fn.rebuild = [p, chi, phi](const std::map<std::string, double>& m) {
        return assemble_sub_full(p, chi, phi, m);
    };
    return fn;
}

void require_case(const Parameters& p, CaseTag tag, const char* who) {
    if (p.case_tag != tag)
        throw ValidationError(std::string(who) + ": wrong monotonicity case for this builder");
}

} // namespace

// ---------------------------------------------------------------------------
// public builders
// ---------------------------------------------------------------------------

ComparisonFunction build_general_super(const Parameters& p, double C) {
    p.validate();
    if (!(C >= 1.0))
        throw ValidationError("build_general_super: need C >= max(1, sup u0)");
    std::map<std::string, double> k;
    k["C"] = C;
    k["c"] = speeds::c_plus(p);
    k["lambda"] = speeds::c_plus(p) / (2.0 * p.d_plus);
    return assemble_general_super(p, std::move(k));
}

ComparisonFunction build_general_sub(const Parameters& p, double c, double delta,
                                     double eps) {
    p.validate();
    const double cm = speeds::c_minus(p);
    if (!(c > 0.0 && c < cm))
        throw ValidationError("build_general_sub: need 0 < c < c_minus");
    const double delta_cap = p.alpha - c * c / (4.0 * p.d_minus);
    if (!(delta > 0.0 && delta < delta_cap))
        throw ValidationError("build_general_sub: need 0 < delta < alpha - c^2/(4 d_-)");

    const double lam = c / (2.0 * p.d_minus);
    const double beta =
        std::sqrt(4.0 * p.d_minus * (p.alpha - delta) - c * c) / (2.0 * p.d_minus);
    const double gam = c / (2.0 * p.d_plus);
    const double om =
        std::sqrt(4.0 * p.d_plus * (p.alpha - delta) - c * c) / (2.0 * p.d_plus);
    const double zs_m = -std::atan((lam * lam - beta * beta) / (2.0 * lam * beta)) / beta;
    const double zs_p = -std::atan((gam * gam - om * om) / (2.0 * gam * om)) / om;
    auto psi = [](double a, double b, double y) {
        return std::exp(-a * y) * std::cos(b * y);
    };
    const double rho = psi(lam, beta, zs_m) / psi(gam, om, zs_p);

    // Composite maximum: the plus arc attains it at its interior peak.
    const double y_pk = -std::atan(gam / om) / om;
    const double peak = rho * psi(gam, om, y_pk);
    const double eps0 = (delta / p.alpha) / peak;
    if (!(eps > 0.0 && eps <= eps0))
        throw ValidationError("build_general_sub: eps must lie in (0, " +
                              std::to_string(eps0) + "]");

    std::map<std::string, double> k;
    k["c"] = c;
    k["delta"] = delta;
    k["eps"] = eps;
    k["eps0"] = eps0;
    k["lambda"] = lam;
    k["beta"] = beta;
    k["gamma"] = gam;
    k["omega"] = om;
    k["z_star_minus"] = zs_m;
    k["z_star_plus"] = zs_p;
    k["rho"] = rho;
    k["edge_left"] = -M_PI / (2.0 * om) - zs_p;
    k["edge_right"] = M_PI / (2.0 * beta) - zs_m;
    return assemble_general_sub(p, std::move(k));
}

ComparisonFunction build_case1_super_slow(const Parameters& p, const ChiProfile& chi,
                                          double eps, double tau) {
    p.validate();
    require_case(p, CaseTag::CaseI_decreasing, "build_case1_super_slow");
    const double cm = speeds::c_minus(p);
    if (!(p.c_het < cm))
        throw RegimeError("build_case1_super_slow: requires c_het < c_minus");
    if (!(eps > 0.0 && eps < p.d_plus - p.d_minus))
        throw ValidationError("build_case1_super_slow: need 0 < eps < d_+ - d_-");

    const double c_eps = 2.0 * std::sqrt((p.d_minus + eps) * p.alpha);
    const double tau_eps = chi_inverse(chi, p.d_minus + eps);
    if (is_auto(tau)) tau = chi_inverse(chi, p.d_minus + 0.95 * eps);
    if (!(tau >= tau_eps))
        throw ValidationError("build_case1_super_slow: tau below the threshold " +
                              std::to_string(tau_eps));
    const double chi_tau = chi_eval(chi, tau);

    std::map<std::string, double> k;
    k["eps"] = eps;
    k["tau"] = tau;
    k["tau_eps"] = tau_eps;
    k["c"] = c_eps;
    k["chi_tau"] = chi_tau;
    k["lambda"] = c_eps / (2.0 * chi_tau);
    return assemble_exp_super(p, "case1_super_slow", std::move(k));
}

ComparisonFunction build_case1_sub_bump(const Parameters& p, const ChiProfile& chi,
                                        double c, double eps, double tau) {
    p.validate();
    require_case(p, CaseTag::CaseI_decreasing, "build_case1_sub_bump");
    const double cap = std::min(speeds::c_plus(p), p.c_het);
    if (!(c > 0.0 && c < cap))
        throw ValidationError("build_case1_sub_bump: need 0 < c < min(c_plus, c_het)");

    const BumpData b = bump_constants(p, chi, c, eps, tau, /*right_tail=*/false);
    std::map<std::string, double> k;
    k["c"] = b.c;
    k["eps"] = b.eps;
    k["beta_p"] = b.beta;
    k["gamma_t"] = b.gamma_t;
    k["z_plus"] = b.z_plus;
    k["z_minus"] = b.z_minus;
    k["delta_eps"] = b.delta_eps;
    k["tau"] = b.tau;
    k["tau_threshold"] = b.threshold_tau;
    k["tail_A"] = b.A;
    k["edge_left"] = b.edge_l;
    k["edge_right"] = b.edge_r;
    return assemble_bump_sub(p, "case1_sub_bump", false, std::move(k));
}

ComparisonFunction build_case1_super_locked(const Parameters& p, const ChiProfile& chi,
                                            double tau) {
    p.validate();
    require_case(p, CaseTag::CaseI_decreasing, "build_case1_super_locked");
    const double cm = speeds::c_minus(p);
    const double cp = speeds::c_plus(p);
    if (!(p.c_het >= cm && p.c_het <= cp))
        throw RegimeError("build_case1_super_locked: requires c_- <= c_het <= c_+");
    const double target = p.c_het * p.c_het / (4.0 * p.alpha);
    if (target - p.d_minus <= 1e-12 * p.d_minus)
        throw RegimeError("build_case1_super_locked: c_het = c_- is marginal, "
                          "chi(tau) <= d_- only holds in the limit");

    double tau0;
    if (target >= p.d_plus) {
        tau0 = -std::numeric_limits<double>::infinity(); // c_het = c_+: any tau works
    } else {
        tau0 = chi_inverse(chi, target);
    }
    if (is_auto(tau)) {
        const double v = std::min(0.995 * target + 0.005 * p.d_minus, 0.999 * p.d_plus);
        tau = chi_inverse(chi, v);
    }
    const double chi_tau = chi_eval(chi, tau);
    if (!(chi_tau <= target))
        throw ValidationError("build_case1_super_locked: tau below the threshold " +
                              std::to_string(tau0));

    std::map<std::string, double> k;
    k["tau"] = tau;
    k["tau0"] = tau0;
    k["c"] = p.c_het;
    k["chi_tau"] = chi_tau;
    k["lambda"] = p.c_het / (2.0 * chi_tau);
    return assemble_exp_super(p, "case1_super_locked", std::move(k));
}

ComparisonFunction build_case2_super_anomalous(const Parameters& p, const ChiProfile& chi,
                                               double c, double tau, double C) {
    p.validate();
    require_case(p, CaseTag::CaseII_increasing, "build_case2_super_anomalous");
    const double cp = speeds::c_plus(p);
    const double ci = speeds::c_intersection(p);
    if (!(p.c_het > cp && p.c_het < ci))
        throw RegimeError("build_case2_super_anomalous: requires c_+ < c_het < c_int");
    const double cu = speeds::anomalous_speed(p);
    if (!(c > cu && c < p.c_het))
        throw ValidationError("build_case2_super_anomalous: need c in (c_u*, c_het)");
    if (!(C >= 1.0))
        throw ValidationError("build_case2_super_anomalous: need C >= 1");

    const double lam = speeds::lambda_of_c(cu, p);
    const double mu = speeds::mu_super(p);

    // tau threshold: lambda^2 (chi(-tau) - d_-) < lambda (c - c_u*).
    const double margin = 0.5 * (c - cu) / lam;
    double tau0 = 0.5;
    if (p.d_minus + margin < p.d_plus)
        tau0 = std::max(0.5, -chi_inverse(chi, p.d_minus + margin));
    if (is_auto(tau)) tau = tau0 + 1.0;
    const double chi_mt = chi_eval(chi, -tau);
    if (!(lam * lam * (p.d_minus - chi_mt) + lam * (c - cu) > 0.0))
        throw ValidationError("build_case2_super_anomalous: tau below the threshold " +
                              std::to_string(tau0));

    std::map<std::string, double> k;
    k["C"] = C;
    k["c"] = c;
    k["c_u_star"] = cu;
    k["lambda"] = lam;
    k["mu"] = mu;
    k["tau"] = tau;
    k["tau0"] = tau0;
    return assemble_three_piece_super(p, "case2_super_anomalous", std::move(k));
}

ComparisonFunction build_case2_sub_pull(const Parameters& p, const ChiProfile& chi,
                                        double c, double eps, double tau) {
    p.validate();
    require_case(p, CaseTag::CaseII_increasing, "build_case2_sub_pull");
    const double cp = speeds::c_plus(p);
    const double ci = speeds::c_intersection(p);
    if (!(p.c_het >= cp && p.c_het < ci))
        throw RegimeError("build_case2_sub_pull: requires c_+ <= c_het < c_int");
    const double cu = speeds::anomalous_speed(p);
    const double cm = speeds::c_minus(p);
    if (!(c > cm && c < cu))
        throw ValidationError("build_case2_sub_pull: need c in (c_-, c_u*)");
    if (!(eps > 0.0 && eps < 0.5 * p.alpha))
        throw ValidationError("build_case2_sub_pull: need 0 < eps < alpha/2");

    const double S = std::sqrt(c * c - 4.0 * p.d_minus * (p.alpha - eps));
    const double lam = (c - S) / (2.0 * p.d_minus);
    const double gam = S / (2.0 * p.d_minus); // inside (0, S/d_-)

    // x_*: chi - d_- small enough that the faster exponential still helps.
    const double bound = gam * (c - 2.0 * lam * p.d_minus - gam * p.d_minus) /
                         ((lam + gam) * (lam + gam));
    double x_star = std::numeric_limits<double>::infinity();
    if (p.d_minus + bound < p.d_plus) x_star = chi_inverse(chi, p.d_minus + bound);
    const double xi_min = (2.0 / gam) * std::log((lam + gam) / lam);
    const double tau_star = std::isfinite(x_star) ? std::max(0.0, xi_min - x_star) : 0.0;
    if (is_auto(tau)) tau = 1.05 * tau_star + 1.0;
    if (!(tau >= tau_star))
        throw ValidationError("build_case2_sub_pull: tau below the threshold " +
                              std::to_string(tau_star));

    std::map<std::string, double> k;
    k["c"] = c;
    k["eps"] = eps;
    k["lambda_eps"] = lam;
    k["gamma_eps"] = gam;
    k["tau"] = tau;
    k["tau_star"] = tau_star;
    k["x_star"] = x_star;
    return assemble_sub_pull(p, std::move(k));
}

ComparisonFunction build_case2_sub_full(const Parameters& p, const ChiProfile& chi,
                                        double c, double eps, double tau,
                                        const waves::PhiSolution& phi) {
    p.validate();
    require_case(p, CaseTag::CaseII_increasing, "build_case2_sub_full");
    if (std::abs(phi.eps - eps) > 1e-12)
        throw ValidationError("build_case2_sub_full: phi was shot with a different eps");

    // Inherit the pull sub-solution's admissibility and thresholds.
    ComparisonFunction pull = build_case2_sub_pull(p, chi, c, eps, kNaN);
    const double lam = pull.constants.at("lambda_eps");
    const double gam = pull.constants.at("gamma_eps");
    const double tau_star = pull.constants.at("tau_star");
    const double cu = speeds::anomalous_speed(p);
    const double lam_cu = speeds::lambda_of_c(cu, p);
    const double lam_star = speeds::lambda_star(p);

    if (!(lam_star - eps > p.alpha - p.c_het * p.c_het / (4.0 * p.d_minus)))
        throw RegimeError("build_case2_sub_full: eps outside the eigenvalue band");
    const double glue_gap = -lam * (p.c_het - c) + lam_cu * (p.c_het - cu) + 3.0 * eps;
    if (!(glue_gap < 0.0))
        throw ValidationError(
            "build_case2_sub_full: admissibility -lambda_eps(c)(c_het-c) + "
            "lambda(c_u*)(c_het-c_u*) + 3 eps < 0 fails by " + std::to_string(glue_gap));

    // tau: pull threshold, the glue-time bracket, the cutoff right of the glue
    // line, and the glue line inside phi's tabulated range.
    const double B = (lam + gam) * (p.c_het - c) + lam_star - 2.0 * eps;
    double tau_b = 0.0;
    if (B > 0.0) tau_b = (2.0 / gam) * std::log(B / eps);
    const double tau0 =
        std::max({tau_star, tau_b, phi.x_eps < 0.0 ? -2.0 * phi.x_eps : 0.0, 2.0});
    if (is_auto(tau)) tau = 1.05 * tau0 + 1.0;
    if (!(tau >= tau0))
        throw ValidationError("build_case2_sub_full: tau below the threshold " +
                              std::to_string(tau0));
    if (!(-tau / 2.0 >= phi.x_start))
        throw ValidationError("build_case2_sub_full: glue line left of phi's range; "
                              "shoot phi from deeper x_start");

    const double phi_glue = phi.value(-tau / 2.0);
    if (!(phi_glue > 0.0))
        throw NumericsError("build_case2_sub_full: phi not positive on the glue line");
    const double c_tau = 1.0 / phi_glue;

    // delta scaling for the full nonlinear operator: sup of the candidate.
    const double xi_pk = std::log((lam + gam) / lam) / gam;
    const double max_a = std::exp(-lam * xi_pk) - std::exp(-(lam + gam) * xi_pk);
    double max_phi = 0.0;
    for (std::size_t i = 0; i < phi.x.size() && phi.x[i] <= phi.x_eps; ++i)
        max_phi = std::max(max_phi, phi.phi[i]);
    const double v_glue0 =
        std::exp(-lam * tau / 2.0) - std::exp(-(lam + gam) * tau / 2.0);
    const double max_u = std::max(max_a, c_tau * v_glue0 * max_phi);
    const double delta_scale = 0.9 * (eps / p.alpha) / max_u;

    std::map<std::string, double> k;
    k["c"] = c;
    k["eps"] = eps;
    k["lambda_eps"] = lam;
    k["gamma_eps"] = gam;
    k["tau"] = tau;
    k["tau0"] = tau0;
    k["c_tau"] = c_tau;
    k["x_eps"] = phi.x_eps;
    k["nu"] = phi.asymptotic_exponent;
    k["lambda_c_u_star"] = lam_cu;
    k["lambda_star"] = lam_star;
    k["phi_coeff"] = p.alpha - lam_star + eps;
    k["delta_scale"] = delta_scale;
    k["glue_gap"] = glue_gap;
    return assemble_sub_full(p, chi, phi, std::move(k));
}

ComparisonFunction build_case2_super_fast(const Parameters& p, const ChiProfile& chi,
                                          double tau) {
    p.validate();
    require_case(p, CaseTag::CaseII_increasing, "build_case2_super_fast");
    const double ci = speeds::c_intersection(p);
    if (!(p.c_het >= ci - 1e-12 * std::max(1.0, ci)))
        throw RegimeError("build_case2_super_fast: requires c_het >= c_int");
    const double cm = speeds::c_minus(p);
    const double lam = cm / (2.0 * p.d_minus);
    double g_cm = speeds::g(cm, p);
    if (g_cm < 0.0) g_cm = 0.0; // c_het = c_int boundary up to round-off
    const double mu_minus = (p.c_het + std::sqrt(g_cm)) / (2.0 * p.d_plus);
    if (!(mu_minus > lam))
        throw NumericsError("build_case2_super_fast: derivative jump has the wrong sign");

    // Auxiliary interface speed slightly above c_-: the margin lambda (c - c_-)
    // absorbs chi(-tau) - d_- yet stays within a 10% exponent mutation.
    const double c = cm * 1.004;

    const double margin = 0.5 * (c - cm) / lam;
    double tau0 = 0.5;
    if (p.d_minus + margin < p.d_plus)
        tau0 = std::max(0.5, -chi_inverse(chi, p.d_minus + margin));
    if (is_auto(tau)) tau = tau0 + 1.0;
    const double chi_mt = chi_eval(chi, -tau);
    if (!(lam * lam * (p.d_minus - chi_mt) + lam * (c - cm) > 0.0))
        throw ValidationError("build_case2_super_fast: tau below the threshold " +
                              std::to_string(tau0));

    std::map<std::string, double> k;
    k["C"] = 1.0;
    k["c"] = c;
    k["lambda"] = lam;
    k["mu"] = mu_minus;
    k["g_c_minus"] = g_cm;
    k["tau"] = tau;
    k["tau0"] = tau0;
    return assemble_three_piece_super(p, "case2_super_fast", std::move(k));
}

double bump_max_eps(const Parameters& p, double c) {
    p.validate();
    const double eps_cap = 0.5 * (p.alpha - c * c / (4.0 * p.d_plus));
    if (!(eps_cap > 0.0))
        throw ValidationError("bump_max_eps: speed too close to c_plus");
    const double gamma_t = c / (2.0 * p.d_plus);
    auto feasible = [&](double e) {
        const double bb = beta_plus(e, c, p);
        const double quarter = M_PI / (2.0 * bb);
        const double z_m = std::atan(bb / gamma_t) / bb;
        const double peak =
            std::exp(-gamma_t * (quarter + z_m)) * std::sin(bb * z_m);
        if (!(peak > e)) return false;
        const double zm = bump_z_root(e, gamma_t, bb, +1);
        const double K =
            (gamma_t + bb) * (gamma_t + bb) * std::exp(gamma_t * (quarter + zm));
        return (K + 1.0) * e <= p.alpha;
    };
    double lo = 1e-12, hi = 0.999 * eps_cap;
    if (!feasible(lo)) return 0.0;
    if (feasible(hi)) return hi;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

ComparisonFunction build_case2_sub_cplus(const Parameters& p, const ChiProfile& chi,
                                         double c, double eps, double tau) {
    p.validate();
    require_case(p, CaseTag::CaseII_increasing, "build_case2_sub_cplus");
    const double cp = speeds::c_plus(p);
    if (!(p.c_het < cp))
        throw RegimeError("build_case2_sub_cplus: requires c_het < c_plus");
    if (!(c > p.c_het && c < cp))
        throw ValidationError("build_case2_sub_cplus: need c in (c_het, c_plus)");

    const BumpData b = bump_constants(p, chi, c, eps, tau, /*right_tail=*/true);
    std::map<std::string, double> k;
    k["c"] = b.c;
    k["eps"] = b.eps;
    k["beta_p"] = b.beta;
    k["gamma_t"] = b.gamma_t;
    k["z_plus"] = b.z_plus;
    k["z_minus"] = b.z_minus;
    k["delta_eps"] = b.delta_eps;
    k["tau"] = b.tau;
    k["tau_threshold"] = b.threshold_tau;
    k["tail_A"] = b.A;
    k["edge_left"] = b.edge_l;
    k["edge_right"] = b.edge_r;
    return assemble_bump_sub(p, "case2_sub_cplus", true, std::move(k));
}

// ---------------------------------------------------------------------------
// checker
// ---------------------------------------------------------------------------

const Piece* ComparisonFunction::find_piece(double t, double x) const {
    for (const auto& pc : pieces)
        if (pc.contains(t, x)) return &pc;
    return nullptr;
}

double ComparisonFunction::eval(double t, double x) const {
    const Piece* pc = find_piece(t, x);
    return pc ? pc->value(t, x) : 0.0;
}

SignReport check(const ComparisonFunction& w, const Parameters& p, const ChiProfile& chi,
                 const CheckOptions& opts) {
    p.validate();
    SignReport rep;
    rep.worst_scaled_residual = kNaN;

    if (opts.nt <= 0 || opts.nx_samples <= 0) {
        rep.pass = true;
        rep.vacuous = true;
        return rep;
    }

    const bool super = w.kind == Kind::Super;
    const int nbp = static_cast<int>(w.breakpoints.size());
    const int n_cluster = nbp > 0 ? opts.nx_samples / 2 / nbp : 0;
    const int n_global = opts.nx_samples - (nbp > 0 ? n_cluster * nbp : 0);
    const double dlt = w.delta_scale;

    std::vector<double> worst_val(
        opts.nt, super ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity());
    std::vector<double> worst_pos(opts.nt, 0.0);
    std::vector<double> worst_scaled(opts.nt, -std::numeric_limits<double>::infinity());
    std::vector<long> counts(opts.nt, 0);

#pragma omp parallel for schedule(static) if (opts.exec == kernels::Exec::OpenMP)
    for (int it = 0; it < opts.nt; ++it) {
        const double t =
            opts.nt == 1 ? opts.t_lo
                         : opts.t_lo + it * (opts.t_hi - opts.t_lo) / (opts.nt - 1);

        std::vector<double> s(nbp);
        double s_min = 0.0, s_max = 0.0;
        for (int b = 0; b < nbp; ++b) {
            s[b] = w.breakpoints[b].position(t);
            s_min = b == 0 ? s[b] : std::min(s_min, s[b]);
            s_max = b == 0 ? s[b] : std::max(s_max, s[b]);
        }

        std::vector<double> xs;
        xs.reserve(opts.nx_samples);
        for (int b = 0; b < nbp; ++b)
            for (int j = 0; j < n_cluster; ++j)
                xs.push_back(s[b] - 5.0 + 10.0 * (j + 0.5) / n_cluster);
        const double lo = s_min - opts.x_margin, hi = s_max + opts.x_margin;
        for (int j = 0; j < n_global; ++j)
            xs.push_back(lo + (hi - lo) * (j + 0.5) / n_global);

        for (double x : xs) {
            bool near_interface = false;
            for (int b = 0; b < nbp; ++b)
                if (std::abs(x - s[b]) < 1e-9) near_interface = true;
            if (near_interface) continue;

            const Piece* pc = w.find_piece(t, x);
            if (!pc) continue;
            const double v = pc->value(t, x);
            const double vt = pc->d_t(t, x);
            const double vxx = pc->d_xx(t, x);
            const double chi_v = chi_eval(chi, x - p.c_het * t);
            const double r = w.op == OperatorTag::FullN
                                 ? vt - chi_v * vxx - p.alpha * v * (1.0 - v)
                                 : vt - chi_v * vxx - (p.alpha - w.op_eps) * v;
            ++counts[it];
            if (super ? (r < worst_val[it]) : (r > worst_val[it])) {
                worst_val[it] = r;
                worst_pos[it] = x;
            }
            if (dlt > 0.0) {
                const double rs =
                    dlt * (vt - chi_v * vxx) - p.alpha * dlt * v * (1.0 - dlt * v);
                worst_scaled[it] = std::max(worst_scaled[it], rs);
            }
        }
    }

    rep.worst_residual = super ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.nt; ++it) {
        rep.sample_count += counts[it];
        if (counts[it] == 0) continue;
        const double t =
            opts.nt == 1 ? opts.t_lo
                         : opts.t_lo + it * (opts.t_hi - opts.t_lo) / (opts.nt - 1);
        if (super ? (worst_val[it] < rep.worst_residual)
                  : (worst_val[it] > rep.worst_residual)) {
            rep.worst_residual = worst_val[it];
            rep.worst_t = t;
            rep.worst_x = worst_pos[it];
        }
    }
    if (dlt > 0.0) {
        rep.worst_scaled_residual = -std::numeric_limits<double>::infinity();
        for (int it = 0; it < opts.nt; ++it)
            rep.worst_scaled_residual =
                std::max(rep.worst_scaled_residual, worst_scaled[it]);
    }

    if (rep.sample_count == 0) {
        rep.pass = true;
        rep.vacuous = true;
        return rep;
    }

    bool resid_ok =
        super ? rep.worst_residual >= -opts.tol : rep.worst_residual <= opts.tol;
    if (dlt > 0.0) resid_ok = resid_ok && rep.worst_scaled_residual <= opts.tol;

    // One-sided derivative jumps at the interfaces, at a spread of times.
    bool jumps_ok = true;
    const double probe = 1e-6;
    for (const auto& bp : w.breakpoints) {
        JumpCheck jc;
        jc.breakpoint = bp.name;
        jc.expected_sign = bp.expected_jump_sign;
        jc.satisfied = true;
        double worst_margin = std::numeric_limits<double>::infinity();
        for (int jt = 0; jt < opts.jump_times; ++jt) {
            const double t =
                opts.jump_times == 1
                    ? opts.t_lo
                    : opts.t_lo + jt * (opts.t_hi - opts.t_lo) / (opts.jump_times - 1);
            const double s = bp.position(t);
            const Piece* left = w.find_piece(t, s - probe);
            const Piece* right = w.find_piece(t, s + probe);
            if (!left || !right || left == right) continue;
            const double dl = left->d_x(t, s);
            const double dr = right->d_x(t, s);
            const double vl = left->value(t, s);
            const double vr = right->value(t, s);
            rep.continuity_worst = std::max(
                rep.continuity_worst, std::abs(vl - vr) / std::max(1.0, std::abs(vl)));
            const double jump = dr - dl;
            if (bp.expected_jump_sign == 0) {
                const double scale = std::max({1.0, std::abs(dl), std::abs(dr)});
                if (std::abs(jump) > 1e-10 * scale) jc.satisfied = false;
                if (std::abs(jump) < worst_margin) {
                    worst_margin = std::abs(jump);
                    jc.worst_jump = jump;
                }
            } else {
                if (std::abs(dl) + std::abs(dr) < 1e-280) continue; // underflowed tail
                const double margin = bp.expected_jump_sign * jump;
                if (!(margin > 0.0)) jc.satisfied = false;
                if (margin < worst_margin) {
                    worst_margin = margin;
                    jc.worst_jump = jump;
                }
            }
        }
        jumps_ok = jumps_ok && jc.satisfied;
        rep.jump_checks.push_back(jc);
    }

    rep.pass = resid_ok && jumps_ok;
    return rep;
}

std::vector<MutationResult> mutation_scan(const ComparisonFunction& w, const Parameters& p,
                                          const ChiProfile& chi, const CheckOptions& opts) {
    const SignReport base = check(w, p, chi, opts);
    std::vector<MutationResult> results;
    for (const auto& key : w.exponent_keys) {
        for (double factor : {1.1, 0.9}) {
            MutationResult mr;
            mr.key = key;
            mr.factor = factor;
            try {
                auto m = w.constants;
                m.at(key) *= factor;
                const ComparisonFunction mut = w.rebuild(m);
                const SignReport r = check(mut, p, chi, opts);
                mr.flipped = base.pass && !r.pass;
            } catch (const std::exception&) {
                mr.flipped = false; // a mutation that cannot even assemble
            }
            results.push_back(mr);
        }
    }
    return results;
}

} // namespace kpp::verify
