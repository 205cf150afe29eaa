#include "kpp/model.hpp"

#include <algorithm>
#include <cmath>

namespace kpp {

void Parameters::validate() const {
    if (!(alpha > 0.0))
        throw ValidationError("Parameters: alpha must be positive");
    if (!(d_minus > 0.0))
        throw ValidationError("Parameters: d_minus must be positive");
    if (!(d_plus >= d_minus))
        throw ValidationError("Parameters: require d_minus <= d_plus");
    if (d_minus == d_plus && !degenerate_ok)
        throw ValidationError(
            "Parameters: d_minus == d_plus requires the degenerate_ok flag");
    if (!(c_het >= 0.0))
        throw ValidationError("Parameters: c_het must be nonnegative");
    if (!(chi_steepness > 0.0))
        throw ValidationError("Parameters: chi_steepness must be positive");
    if (!std::isfinite(alpha) || !std::isfinite(d_minus) || !std::isfinite(d_plus) ||
        !std::isfinite(c_het) || !std::isfinite(chi_steepness))
        throw ValidationError("Parameters: all constants must be finite");
}

const char* case_name(CaseTag tag) {
    return tag == CaseTag::CaseI_decreasing ? "I" : "II";
}

ChiProfile ChiProfile::logistic(const Parameters& p) {
    p.validate();
    ChiProfile profile;
    profile.variant = p.case_tag == CaseTag::CaseI_decreasing
                          ? ChiVariant::LogisticCaseI
                          : ChiVariant::LogisticCaseII;
    profile.params = p;
    return profile;
}

ChiProfile ChiProfile::step(const Parameters& p) {
    p.validate();
    ChiProfile profile;
    profile.variant = ChiVariant::Step;
    profile.params = p;
    return profile;
}

ChiProfile ChiProfile::tabulated(const Parameters& p,
                                 std::vector<std::pair<double, double>> samples) {
    p.validate();
    if (samples.empty())
        throw ValidationError("ChiProfile: tabulated profile needs a nonempty table");
    if (!std::is_sorted(samples.begin(), samples.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; }))
        throw ValidationError("ChiProfile: table abscissae must be increasing");

    const double slack = 1e-12 * p.d_plus;
    const int dir = p.case_tag == CaseTag::CaseI_decreasing ? -1 : +1;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double v = samples[i].second;
        if (v < p.d_minus - slack || v > p.d_plus + slack)
            throw ValidationError("ChiProfile: table values must lie in [d_minus, d_plus]");
        if (i > 0 && dir * (v - samples[i - 1].second) < -slack)
            throw ValidationError("ChiProfile: table violates the case monotonicity");
    }

    ChiProfile profile;
    profile.variant = ChiVariant::Tabulated;
    profile.params = p;
    profile.table = std::move(samples);

    const double left_target =
        dir < 0 ? p.d_plus : p.d_minus; // chi(-inf) per case
    const double right_target = dir < 0 ? p.d_minus : p.d_plus;
    const double lerr = std::abs(profile.table.front().second - left_target);
    const double rerr = std::abs(profile.table.back().second - right_target);
    profile.clamp_warning =
        lerr > 1e-10 * std::max(1.0, left_target) || rerr > 1e-10 * std::max(1.0, right_target);
    return profile;
}

double ChiProfile::limit_left() const {
    switch (variant) {
    case ChiVariant::LogisticCaseI: return params.d_plus;
    case ChiVariant::LogisticCaseII: return params.d_minus;
    case ChiVariant::Step: return params.d_minus;
    case ChiVariant::Tabulated: return table.front().second;
    }
    return params.d_minus;
}

double ChiProfile::limit_right() const {
    switch (variant) {
    case ChiVariant::LogisticCaseI: return params.d_minus;
    case ChiVariant::LogisticCaseII: return params.d_plus;
    case ChiVariant::Step: return params.d_plus;
    case ChiVariant::Tabulated: return table.back().second;
    }
    return params.d_plus;
}

namespace {

// sigma(t) = 1/(1+e^{-t}), saturated once the tail is below one ulp.
double sigmoid(double t) {
    if (t >= 45.0) return 1.0;
    if (t <= -45.0) return 0.0;
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double table_interp(const std::vector<std::pair<double, double>>& tab, double x) {
    if (x <= tab.front().first) return tab.front().second;
    if (x >= tab.back().first) return tab.back().second;
    auto it = std::lower_bound(tab.begin(), tab.end(), x,
                               [](const auto& s, double v) { return s.first < v; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (x - lo.first) / (hi.first - lo.first);
    return lo.second + w * (hi.second - lo.second);
}

} // namespace

double chi_eval(const ChiProfile& profile, double x) {
    if (!std::isfinite(x))
        throw ValidationError("chi_eval: position must be finite");
    const Parameters& p = profile.params;
    switch (profile.variant) {
    case ChiVariant::LogisticCaseI:
        return p.d_minus + (p.d_plus - p.d_minus) * sigmoid(-p.chi_steepness * x);
    case ChiVariant::LogisticCaseII:
        return p.d_minus + (p.d_plus - p.d_minus) * sigmoid(p.chi_steepness * x);
    case ChiVariant::Step:
        return x <= 0.0 ? p.d_minus : p.d_plus;
    case ChiVariant::Tabulated:
        if (profile.table.empty())
            throw ValidationError("chi_eval: tabulated profile with empty table");
        return table_interp(profile.table, x);
    }
    throw ValidationError("chi_eval: unknown variant");
}

double chi_prime(const ChiProfile& profile, double x) {
    if (!std::isfinite(x))
        throw ValidationError("chi_prime: position must be finite");
    const Parameters& p = profile.params;
    const double gap = p.d_plus - p.d_minus;
    switch (profile.variant) {
    case ChiVariant::LogisticCaseI: {
        const double s = sigmoid(-p.chi_steepness * x);
        return -p.chi_steepness * gap * s * (1.0 - s);
    }
    case ChiVariant::LogisticCaseII: {
        const double s = sigmoid(p.chi_steepness * x);
        return p.chi_steepness * gap * s * (1.0 - s);
    }
    case ChiVariant::Step:
        if (x == 0.0)
            throw NumericsError("chi_prime: step profile is not differentiable at 0");
        return 0.0;
    case ChiVariant::Tabulated: {
        if (profile.table.empty())
            throw ValidationError("chi_prime: tabulated profile with empty table");
        const auto& tab = profile.table;
        if (x <= tab.front().first || x >= tab.back().first) return 0.0;
        auto it = std::lower_bound(tab.begin(), tab.end(), x,
                                   [](const auto& s, double v) { return s.first < v; });
        return (it->second - (it - 1)->second) / (it->first - (it - 1)->first);
    }
    }
    throw ValidationError("chi_prime: unknown variant");
}

double chi_inverse(const ChiProfile& profile, double value) {
    const Parameters& p = profile.params;
    const double lo = std::min(profile.limit_left(), profile.limit_right());
    const double hi = std::max(profile.limit_left(), profile.limit_right());
    if (!(value > lo && value < hi))
        throw RegimeError("chi_inverse: value outside the open range of chi");
    switch (profile.variant) {
    case ChiVariant::LogisticCaseI: {
        const double s = (value - p.d_minus) / (p.d_plus - p.d_minus); // sigma(-l x)
        return -std::log(s / (1.0 - s)) / p.chi_steepness;
    }
    case ChiVariant::LogisticCaseII: {
        const double s = (value - p.d_minus) / (p.d_plus - p.d_minus); // sigma(l x)
        return std::log(s / (1.0 - s)) / p.chi_steepness;
    }
    case ChiVariant::Step:
        return 0.0;
    case ChiVariant::Tabulated: {
        const auto& tab = profile.table;
        for (std::size_t i = 1; i < tab.size(); ++i) {
            const double a = tab[i - 1].second, b = tab[i].second;
            if ((value - a) * (value - b) <= 0.0 && a != b) {
                const double w = (value - a) / (b - a);
                return tab[i - 1].first + w * (tab[i].first - tab[i - 1].first);
            }
        }
        throw RegimeError("chi_inverse: value not bracketed by the table");
    }
    }
    throw ValidationError("chi_inverse: unknown variant");
}

} // namespace kpp
