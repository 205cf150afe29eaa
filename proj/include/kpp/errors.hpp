#ifndef KPP_ERRORS_HPP
#define KPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kpp {

/// Invalid parameters, profiles, configs: anything that fails a precondition
/// that the caller could have checked. CLI maps these to exit code 2.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A formula or selector was asked outside the regime where it applies
/// (e.g. the anomalous speed with c_het below c_plus).
struct RegimeError : std::domain_error {
    explicit RegimeError(const std::string& what) : std::domain_error(what) {}
};

/// Runtime numerical failures: blowup, non-convergence, missing root brackets.
struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace kpp

#endif
