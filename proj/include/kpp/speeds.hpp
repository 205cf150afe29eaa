#ifndef KPP_SPEEDS_HPP
#define KPP_SPEEDS_HPP

#include <optional>
#include <utility>

#include "kpp/model.hpp"

namespace kpp::speeds {

enum class Regime {
    CaseI_slow,      // c_het < c_-          -> c_star = c_-
    CaseI_locked,    // c_- <= c_het <= c_+  -> c_star = c_het
    CaseI_fast,      // c_+ < c_het          -> c_star = c_+
    CaseII_full,     // c_het < c_+          -> c_star = c_+
    CaseII_anomalous,// c_+ <= c_het < c_int -> anomalous formula
    CaseII_detached  // c_int < c_het        -> c_star = c_-
};

const char* regime_name(Regime r);

struct SpeedReport {
    double c_minus = 0, c_plus = 0;
    std::optional<double> c_int;
    double c_star = 0;
    Regime regime = Regime::CaseI_locked;
    // Selection at exactly c_het == c_int is left open by the theory; we
    // return the c_- branch and raise this flag.
    bool boundary_ambiguity = false;
    double lambda_star = 0;
    std::optional<double> lambda_of_cstar;
    std::optional<double> mu_super;
    std::optional<double> lambda_s, lambda_w;
};

double c_minus(const Parameters& p);
double c_plus(const Parameters& p);
std::pair<double, double> linear_speeds(const Parameters& p); // (c_-, c_+)

/// c_int = c_+ (sqrt(d_+/d_-) + sqrt(d_+/d_- - 1)); refuses degenerate d_- == d_+.
double c_intersection(const Parameters& p);

/// Smallest root of d_- l^2 - c l + alpha = 0; throws RegimeError for c < c_-.
double lambda_of_c(double c, const Parameters& p);

/// g(c) = c_het^2 - 4 d_+ [alpha + lambda(c) (c_het - c)] on [c_-, c_het].
double g(double c, const Parameters& p);

/// Closed form of the anomalous (nonlocally pulled) speed; no regime gate.
double anomalous_speed_formula(const Parameters& p);

/// Gated anomalous speed, valid for c_+ <= c_het < c_int.
double anomalous_speed(const Parameters& p);

/// Independent cross-check: bisection root of g on [c_-, c_+], 1e-12 abs tol.
double anomalous_speed_bisect(const Parameters& p);

/// lambda_star = alpha - c_het^2 / (4 d_+).
double lambda_star(const Parameters& p);

/// (lambda_w, lambda_s): both roots of d_- l^2 - c_het l + alpha = 0.
/// Throws RegimeError when c_het < c_- (complex roots).
std::pair<double, double> decay_rates(const Parameters& p);

/// mu = c_het / (2 d_+), gated to the anomalous window c_+ <= c_het < c_int.
double mu_super(const Parameters& p);

SpeedReport spreading_speed(const Parameters& p);

/// Left-hand sides of the two-piece exponential ansatz dispersion relations
///   d_- l^2 - c l + alpha     and     d_+ m^2 - c_het m + l (c_het - c) + alpha.
std::pair<double, double> dispersion_residuals(double lambda, double mu, double c,
                                               const Parameters& p);

/// alpha - eta(c) - c_het^2/(4 d_+) with eta(c) = -lambda(c) (c_het - c);
/// vanishes exactly at the anomalous speed.
double absolute_spectrum_edge(double c, const Parameters& p);

} // namespace kpp::speeds

#endif
