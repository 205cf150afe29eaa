#ifndef KPP_EIGENPROBLEM_HPP
#define KPP_EIGENPROBLEM_HPP

#include <vector>

#include "kpp/model.hpp"

namespace kpp::eig {

struct Options {
    int max_iterations = 10000;
    double residual_tol = 1e-10; // on ||A phi - lambda phi||_inf / ||phi||_inf
};

struct DirichletPair {
    double mu_d = 0.0;            // principal Dirichlet eigenvalue of L phi = -mu phi
    std::vector<double> x;        // interior nodes of [-r, r]
    std::vector<double> phi;      // principal eigenfunction, phi(0) = 1
    double residual = 0.0;
    int iterations = 0;
};

/// Principal Dirichlet pair of L = chi(x) d_xx + c_het d_x + alpha on [-r, r]
/// with centered second-order differences on nx interior points (nx is bumped
/// to the next odd count so that x = 0 is a node).
DirichletPair dirichlet_eig(double r, int nx, const Parameters& p, const ChiProfile& chi,
                            const Options& opts = {});

struct EigenResult {
    std::vector<double> r_values;
    std::vector<double> mu_d;
    std::vector<double> phi;   // eigenfunction on the largest radius
    std::vector<double> phi_x;
    double mu_star_estimate = 0.0; // upper bound by monotone decrease
    bool converged = false;
};

/// mu_d over an increasing radius list; converged once successive values
/// differ by less than tol. Runs the radii in parallel.
EigenResult generalized_eig(const Parameters& p, const ChiProfile& chi,
                            std::vector<double> r_list, double tol,
                            const Options& opts = {});

std::vector<double> default_r_list();
int default_nx(double r); // keeps dx <= 0.05, odd interior count

enum class SignVerdict { Negative, Inconclusive };

struct SignCheckReport {
    SignVerdict verdict = SignVerdict::Inconclusive;
    double mu_star_estimate = 0.0;
    bool eig_converged = false;
    // q(x) = 4 chi(x) alpha - c_het^2 must clear a positive floor on (-inf, x0].
    bool q_ok = false;
    double q_floor = 0.0;
    double q_interval_end = 0.0;
};

/// Numerical realization of the mu* < 0 certificate for Case I profiles.
/// The default tolerance reflects the O(1/r^2) Dirichlet convergence rate over
/// the default radius list.
SignCheckReport sign_check(const Parameters& p, const ChiProfile& chi, double tol = 5e-3);

} // namespace kpp::eig

#endif
