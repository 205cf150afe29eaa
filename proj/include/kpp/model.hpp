#ifndef KPP_MODEL_HPP
#define KPP_MODEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "kpp/errors.hpp"

namespace kpp {

enum class CaseTag { CaseI_decreasing, CaseII_increasing };

/// Physical constants of the reaction-diffusion problem
///     u_t = chi(x - c_het t) u_xx + alpha u (1 - u),
/// with chi a monotone profile between d_minus and d_plus.
struct Parameters {
    double alpha = 1.0;        // growth rate, 1/time
    double d_minus = 0.25;     // low diffusivity
    double d_plus = 1.0;       // high diffusivity
    double c_het = 1.5;        // heterogeneity speed, >= 0
    CaseTag case_tag = CaseTag::CaseI_decreasing;
    double chi_steepness = 2.0; // logistic rate lambda, 1/length

    // d_minus == d_plus is admitted only for homogeneous-oracle tests.
    bool degenerate_ok = false;

    bool degenerate() const { return d_minus == d_plus; }
    void validate() const;
};

enum class ChiVariant { LogisticCaseI, LogisticCaseII, Step, Tabulated };

/// Diffusivity profile chi. Logistic variants follow
///   chi_I(x)  = (d_+ e^{-lx} + d_-) / (1 + e^{-lx}),
///   chi_II(x) = (d_- e^{-lx} + d_+) / (1 + e^{-lx}),
/// the Step variant is d_- for x <= 0 and d_+ for x > 0, and Tabulated
/// interpolates monotone samples linearly, clamped outside the table.
struct ChiProfile {
    ChiVariant variant = ChiVariant::LogisticCaseI;
    Parameters params;
    std::vector<std::pair<double, double>> table; // Tabulated only

    // Set when a tabulated profile is too narrow for endpoint clamping
    // to stay below 1e-10 relative error against d_-/d_+.
    bool clamp_warning = false;

    static ChiProfile logistic(const Parameters& p);
    static ChiProfile step(const Parameters& p);
    static ChiProfile tabulated(const Parameters& p,
                                std::vector<std::pair<double, double>> samples);

    bool smooth() const { return variant != ChiVariant::Step; }

    /// chi value at -infinity / +infinity (table endpoints for Tabulated).
    double limit_left() const;
    double limit_right() const;
};

double chi_eval(const ChiProfile& profile, double x);
double chi_prime(const ChiProfile& profile, double x);

/// Inverse of the monotone profile: the x with chi(x) = value. Throws
/// RegimeError when value is outside the open range of the profile.
double chi_inverse(const ChiProfile& profile, double value);

const char* case_name(CaseTag tag);

} // namespace kpp

#endif
