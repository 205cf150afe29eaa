#include "kpp/speeds.hpp"

#include <cmath>

namespace kpp::speeds {

namespace {

constexpr double kDiscSnap = 1e-14;

// Discriminants this close to zero are double roots up to round-off.
double snap(double x) { return std::abs(x) < kDiscSnap ? 0.0 : x; }

void require_nondegenerate(const Parameters& p, const char* who) {
    if (p.degenerate())
        throw RegimeError(std::string(who) + ": refused for degenerate d_minus == d_plus");
}

} // namespace

const char* regime_name(Regime r) {
    switch (r) {
    case Regime::CaseI_slow: return "slow";
    case Regime::CaseI_locked: return "locked";
    case Regime::CaseI_fast: return "fast";
    case Regime::CaseII_full: return "full";
    case Regime::CaseII_anomalous: return "anomalous";
    case Regime::CaseII_detached: return "detached";
    }
    return "?";
}

double c_minus(const Parameters& p) { return 2.0 * std::sqrt(p.d_minus * p.alpha); }
double c_plus(const Parameters& p) { return 2.0 * std::sqrt(p.d_plus * p.alpha); }

std::pair<double, double> linear_speeds(const Parameters& p) {
    p.validate();
    return {c_minus(p), c_plus(p)};
}

double c_intersection(const Parameters& p) {
    p.validate();
    require_nondegenerate(p, "c_intersection");
    const double ratio = p.d_plus / p.d_minus;
    return c_plus(p) * (std::sqrt(ratio) + std::sqrt(ratio - 1.0));
}

double lambda_of_c(double c, const Parameters& p) {
    p.validate();
    const double disc = snap(c * c - 4.0 * p.d_minus * p.alpha);
    if (disc < 0.0)
        throw RegimeError("lambda_of_c: c below c_minus gives complex roots");
    return (c - std::sqrt(disc)) / (2.0 * p.d_minus);
}

double g(double c, const Parameters& p) {
    p.validate();
    const double cm = c_minus(p);
    const double tol = 1e-12 * std::max(1.0, p.c_het);
    if (c < cm - tol || c > p.c_het + tol)
        throw RegimeError("g: c outside [c_minus, c_het]");
    const double lam = lambda_of_c(std::max(c, cm), p);
    return p.c_het * p.c_het - 4.0 * p.d_plus * (p.alpha + lam * (p.c_het - c));
}

double anomalous_speed_formula(const Parameters& p) {
    require_nondegenerate(p, "anomalous_speed");
    const double cm = c_minus(p);
    const double q = 1.0 - std::sqrt(1.0 - p.d_minus / p.d_plus);
    return 0.5 * p.c_het * q + cm * cm / (2.0 * p.c_het * q);
}

double anomalous_speed(const Parameters& p) {
    p.validate();
    require_nondegenerate(p, "anomalous_speed");
    const double cp = c_plus(p);
    const double ci = c_intersection(p);
    const double tol = 1e-12 * std::max(1.0, ci);
    if (p.c_het < cp - tol || p.c_het >= ci)
        throw RegimeError("anomalous_speed: requires c_plus <= c_het < c_int");
    return anomalous_speed_formula(p);
}

double anomalous_speed_bisect(const Parameters& p) {
    p.validate();
    require_nondegenerate(p, "anomalous_speed_bisect");
    double lo = c_minus(p);
    double hi = std::min(c_plus(p), p.c_het);
    double glo = g(lo, p), ghi = g(hi, p);
    if (glo > 0.0)
        throw RegimeError("anomalous_speed_bisect: g(c_minus) > 0, root below range");
    if (ghi < 0.0)
        throw RegimeError("anomalous_speed_bisect: g has no root up to c_plus");
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid, p) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double lambda_star(const Parameters& p) {
    p.validate();
    return p.alpha - p.c_het * p.c_het / (4.0 * p.d_plus);
}

std::pair<double, double> decay_rates(const Parameters& p) {
    p.validate();
    const double cm = c_minus(p);
    const double disc = snap(p.c_het * p.c_het - cm * cm);
    if (disc < 0.0)
        throw RegimeError("decay_rates: c_het below c_minus, no real decay rates");
    const double root = std::sqrt(disc);
    const double lw = (p.c_het - root) / (2.0 * p.d_minus);
    const double ls = (p.c_het + root) / (2.0 * p.d_minus);
    return {lw, ls};
}

double mu_super(const Parameters& p) {
    p.validate();
    require_nondegenerate(p, "mu_super");
    const double cp = c_plus(p);
    const double ci = c_intersection(p);
    const double tol = 1e-12 * std::max(1.0, ci);
    if (p.c_het < cp - tol || p.c_het >= ci)
        throw RegimeError("mu_super: requires the anomalous regime c_plus <= c_het < c_int");
    return p.c_het / (2.0 * p.d_plus);
}

SpeedReport spreading_speed(const Parameters& p) {
    p.validate();
    require_nondegenerate(p, "spreading_speed");

    SpeedReport rep;
    rep.c_minus = c_minus(p);
    rep.c_plus = c_plus(p);
    rep.c_int = c_intersection(p);
    rep.lambda_star = lambda_star(p);

    const double ci = *rep.c_int;
    if (p.case_tag == CaseTag::CaseI_decreasing) {
        if (p.c_het < rep.c_minus) {
            rep.regime = Regime::CaseI_slow;
            rep.c_star = rep.c_minus;
        } else if (p.c_het <= rep.c_plus) {
            rep.regime = Regime::CaseI_locked;
            rep.c_star = p.c_het;
        } else {
            rep.regime = Regime::CaseI_fast;
            rep.c_star = rep.c_plus;
        }
    } else {
        const double btol = 1e-12 * std::max(1.0, ci);
        if (std::abs(p.c_het - ci) <= btol) {
            rep.regime = Regime::CaseII_detached;
            rep.c_star = rep.c_minus;
            rep.boundary_ambiguity = true;
        } else if (p.c_het < rep.c_plus) {
            rep.regime = Regime::CaseII_full;
            rep.c_star = rep.c_plus;
        } else if (p.c_het < ci) {
            rep.regime = Regime::CaseII_anomalous;
            rep.c_star = anomalous_speed_formula(p);
        } else {
            rep.regime = Regime::CaseII_detached;
            rep.c_star = rep.c_minus;
        }
    }

    rep.lambda_of_cstar = lambda_of_c(rep.c_star, p);
    if (p.c_het >= rep.c_minus) {
        const auto [lw, ls] = decay_rates(p);
        rep.lambda_w = lw;
        rep.lambda_s = ls;
    }
    if (rep.regime == Regime::CaseII_anomalous)
        rep.mu_super = mu_super(p);
    return rep;
}

std::pair<double, double> dispersion_residuals(double lambda, double mu, double c,
                                               const Parameters& p) {
    p.validate();
    const double r1 = p.d_minus * lambda * lambda - c * lambda + p.alpha;
    const double r2 =
        p.d_plus * mu * mu - p.c_het * mu + lambda * (p.c_het - c) + p.alpha;
    return {r1, r2};
}

double absolute_spectrum_edge(double c, const Parameters& p) {
    p.validate();
    const double cm = c_minus(p);
    const double tol = 1e-12 * std::max(1.0, p.c_het);
    if (c < cm - tol || c > p.c_het + tol)
        throw RegimeError("absolute_spectrum_edge: c outside [c_minus, c_het]");
    const double lam = lambda_of_c(std::max(c, cm), p);
    const double eta = -lam * (p.c_het - c);
    return p.alpha - eta - p.c_het * p.c_het / (4.0 * p.d_plus);
}

} // namespace kpp::speeds
