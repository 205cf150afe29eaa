#include "kpp/eigenproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kpp/speeds.hpp"

namespace kpp::eig {

namespace {

struct Tridiag {
    std::vector<double> sub;  // A[i][i-1], sub[0] unused
    std::vector<double> diag; // A[i][i]
    std::vector<double> sup;  // A[i][i+1], sup[n-1] unused
};

// Discrete L = chi d_xx + c_het d_x + alpha on the interior of [-r, r],
// centered differences, Dirichlet ends.
Tridiag assemble(double r, int n_interior, const Parameters& p, const ChiProfile& chi,
                 double* h_out) {
    const double h = 2.0 * r / (n_interior + 1);
    *h_out = h;
    Tridiag A;
    A.sub.resize(n_interior);
    A.diag.resize(n_interior);
    A.sup.resize(n_interior);
    for (int j = 0; j < n_interior; ++j) {
        const double x = -r + (j + 1) * h;
        const double c = chi_eval(chi, x);
        A.sub[j] = c / (h * h) - p.c_het / (2.0 * h);
        A.diag[j] = -2.0 * c / (h * h) + p.alpha;
        A.sup[j] = c / (h * h) + p.c_het / (2.0 * h);
    }
    return A;
}

// Eigenvalue count below sigma via the Sturm sequence of the symmetrized
// matrix (same spectrum; off-diagonal products must be positive).
int count_below(const Tridiag& A, const std::vector<double>& e2, double sigma) {
    const int n = static_cast<int>(A.diag.size());
    int count = 0;
    double q = A.diag[0] - sigma;
    if (q < 0.0) ++count;
    for (int j = 1; j < n; ++j) {
        double denom = q;
        if (denom == 0.0) denom = 1e-300;
        q = (A.diag[j] - sigma) - e2[j - 1] / denom;
        if (q < 0.0) ++count;
    }
    return count;
}

// Solve (A - sigma I) v = rhs in place by the Thomas algorithm.
void shifted_solve(const Tridiag& A, double sigma, std::vector<double>& v) {
    const int n = static_cast<int>(A.diag.size());
    std::vector<double> d(n), c(n);
    d[0] = A.diag[0] - sigma;
    c[0] = A.sup[0];
    for (int j = 1; j < n; ++j) {
        double denom = d[j - 1];
        if (std::abs(denom) < 1e-300) denom = denom < 0 ? -1e-300 : 1e-300;
        const double m = A.sub[j] / denom;
        d[j] = (A.diag[j] - sigma) - m * c[j - 1];
        c[j] = A.sup[j];
        v[j] -= m * v[j - 1];
    }
    double denom = d[n - 1];
    if (std::abs(denom) < 1e-300) denom = denom < 0 ? -1e-300 : 1e-300;
    v[n - 1] /= denom;
    for (int j = n - 2; j >= 0; --j) {
        double dj = d[j];
        if (std::abs(dj) < 1e-300) dj = dj < 0 ? -1e-300 : 1e-300;
        v[j] = (v[j] - c[j] * v[j + 1]) / dj;
    }
}

double apply_residual(const Tridiag& A, double lambda, const std::vector<double>& v) {
    const int n = static_cast<int>(A.diag.size());
    double worst = 0.0, vmax = 0.0;
    for (int j = 0; j < n; ++j) {
        double Av = A.diag[j] * v[j];
        if (j > 0) Av += A.sub[j] * v[j - 1];
        if (j + 1 < n) Av += A.sup[j] * v[j + 1];
        worst = std::max(worst, std::abs(Av - lambda * v[j]));
        vmax = std::max(vmax, std::abs(v[j]));
    }
    return worst / vmax;
}

} // namespace

int default_nx(double r) { return 2 * static_cast<int>(std::ceil(20.0 * r)) + 1; }

std::vector<double> default_r_list() { return {10.0, 20.0, 40.0, 80.0}; }

DirichletPair dirichlet_eig(double r, int nx, const Parameters& p, const ChiProfile& chi,
                            const Options& opts) {
    p.validate();
    if (!(r > 0.0)) throw ValidationError("dirichlet_eig: radius must be positive");
    if (nx < 51) throw ValidationError("dirichlet_eig: nx must be at least 51");

    int n = nx;
    if (n % 2 == 0) ++n; // ensure a node at x = 0 for the phi(0) = 1 normalization

    double h = 0.0;
    const Tridiag A = assemble(r, n, p, chi, &h);

    // Positivity of the off-diagonals: needed for the Perron structure and the
    // real-spectrum symmetrization. Fails only on advection-dominated grids.
    std::vector<double> e2(n - 1);
    for (int j = 0; j + 1 < n; ++j) {
        const double prod = A.sup[j] * A.sub[j + 1];
        if (!(prod > 0.0))
            throw ValidationError(
                "dirichlet_eig: grid too coarse for the advection term (need h < 2 d_min/c_het)");
        e2[j] = prod;
    }

    // Gershgorin bracket, then bisect for the largest eigenvalue. The spec
    // shift alpha + c_het^2/(4 d_minus) + 1 bounds the principal eigenvalue
    // from above; keep it as the upper end of the initial bracket.
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const double e_left = j > 0 ? std::sqrt(e2[j - 1]) : 0.0;
        const double e_right = j + 1 < n ? std::sqrt(e2[j]) : 0.0;
        lo = std::min(lo, A.diag[j] - e_left - e_right);
    }
    double hi = p.alpha + p.c_het * p.c_het / (4.0 * p.d_minus) + 1.0;

    while (hi - lo > 1e-14 * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(A, e2, mid) >= n)
            hi = mid;
        else
            lo = mid;
    }
    const double lambda_max = 0.5 * (lo + hi);

    // Inverse iteration with a shift just above the (certified) principal
    // eigenvalue; a couple of solves align the vector.
    const double delta = std::max(1e-12, 1e-12 * std::abs(lambda_max));
    const double sigma = lambda_max + delta;
    std::vector<double> v(n, 1.0);
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    while (residual > opts.residual_tol) {
        if (it >= opts.max_iterations)
            throw NumericsError("dirichlet_eig: no convergence after " +
                                std::to_string(opts.max_iterations) +
                                " iterations, residual " + std::to_string(residual));
        shifted_solve(A, sigma, v);
        double vmax = 0.0;
        for (double w : v) vmax = std::max(vmax, std::abs(w));
        for (double& w : v) w /= vmax;
        residual = apply_residual(A, lambda_max, v);
        ++it;
    }

    DirichletPair pair;
    pair.mu_d = -lambda_max;
    pair.iterations = it;
    pair.residual = residual;
    pair.x.resize(n);
    pair.phi.resize(n);
    const int mid_index = (n - 1) / 2; // x = 0
    const double norm = v[mid_index];
    if (norm == 0.0)
        throw NumericsError("dirichlet_eig: eigenfunction vanishes at x = 0");
    for (int j = 0; j < n; ++j) {
        pair.x[j] = -r + (j + 1) * h;
        pair.phi[j] = v[j] / norm;
    }
    return pair;
}

EigenResult generalized_eig(const Parameters& p, const ChiProfile& chi,
                            std::vector<double> r_list, double tol, const Options& opts) {
    p.validate();
    if (r_list.size() < 3)
        throw ValidationError("generalized_eig: need at least 3 radii");
    if (!std::is_sorted(r_list.begin(), r_list.end()))
        throw ValidationError("generalized_eig: radii must increase");

    EigenResult res;
    res.r_values = r_list;
    res.mu_d.resize(r_list.size());
    std::vector<DirichletPair> pairs(r_list.size());

    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < static_cast<long>(r_list.size()); ++k) {
        try {
            pairs[k] = dirichlet_eig(r_list[k], default_nx(r_list[k]), p, chi, opts);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t k = 0; k < r_list.size(); ++k) res.mu_d[k] = pairs[k].mu_d;
    res.phi = std::move(pairs.back().phi);
    res.phi_x = std::move(pairs.back().x);
    res.mu_star_estimate = res.mu_d.back();
    const std::size_t m = res.mu_d.size();
    res.converged = std::abs(res.mu_d[m - 1] - res.mu_d[m - 2]) < tol;
    return res;
}

SignCheckReport sign_check(const Parameters& p, const ChiProfile& chi, double tol) {
    p.validate();
    if (p.case_tag != CaseTag::CaseI_decreasing)
        throw ValidationError("sign_check: requires a Case I (decreasing) profile");

    SignCheckReport rep;
    const double q_inf = 4.0 * chi.limit_left() * p.alpha - p.c_het * p.c_het;
    if (q_inf > 0.0) {
        rep.q_floor = 0.5 * q_inf;
        const double chi_target = (p.c_het * p.c_het + rep.q_floor) / (4.0 * p.alpha);
        // q >= floor holds left of chi^{-1}(target); everywhere if the target
        // falls below the profile's lower limit.
        rep.q_interval_end = chi_target <= p.d_minus
                                 ? std::numeric_limits<double>::infinity()
                                 : chi_inverse(chi, chi_target);
        rep.q_ok = true;
    }

    const EigenResult eig = generalized_eig(p, chi, default_r_list(), tol);
    rep.mu_star_estimate = eig.mu_star_estimate;
    rep.eig_converged = eig.converged;
    rep.verdict = (rep.q_ok && eig.converged && eig.mu_star_estimate < -tol)
                      ? SignVerdict::Negative
                      : SignVerdict::Inconclusive;
    return rep;
}

} // namespace kpp::eig
