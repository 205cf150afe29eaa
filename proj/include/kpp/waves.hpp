#ifndef KPP_WAVES_HPP
#define KPP_WAVES_HPP

#include <limits>
#include <optional>
#include <vector>

#include "kpp/grid.hpp"
#include "kpp/kernels.hpp"
#include "kpp/model.hpp"

namespace kpp::waves {

struct DecayFit {
    double lambda_fit = 0.0;
    double r2 = 0.0;
    double intercept = 0.0; // ln-scale intercept; reported, never asserted
    double window_lo = 0.0, window_hi = 0.0;
    int n_points = 0;
};

struct WaveProfile {
    Grid1D grid;
    std::vector<double> U;
    double residual = 0.0; // sup |chi U'' + c_het U' + alpha U (1-U)| on the interior
    DecayFit decay_fit;
    bool monotone = false;
    bool converged = false;
    double t_elapsed = 0.0;
    double increment = 0.0; // last sup-norm increment over one check interval
};

struct RelaxOptions {
    double eps = -1.0;  // <0: 0.1 (c_het - c_-)^2 / (4 alpha)
    double tau = std::numeric_limits<double>::quiet_NaN(); // NaN: chi(tau) = d_- + eps
    double t_max = 400.0;
    double check_interval = 1.0;
    double increment_tol = 1e-10;
    double dt_safety = 0.4;
    kernels::Exec exec = kernels::Exec::Serial;
    // Diagnostics outside the existence band c_het in (c_-, c_+).
    bool allow_any_speed = false;
    std::optional<std::vector<double>> initial; // override the super-solution datum
};

/// Comoving-frame relaxation of u_t = chi(x) u_xx + c_het u_x + alpha u(1-u)
/// from the super-solution datum min{1, e^{-lambda_eps (x - tau)}}; centered
/// advection so the discrete steady state satisfies the centered-difference
/// traveling-wave equation.
WaveProfile relax_to_wave(const Parameters& p, const ChiProfile& chi, const Grid1D& grid,
                          const RelaxOptions& opts = {});

/// Least-squares slope of ln U over the window u_lo <= U <= u_hi.
DecayFit measure_decay(const WaveProfile& w, double u_lo = 1e-6, double u_hi = 1e-2);

struct PhiSolution {
    std::vector<double> x;    // uniform nodes, spacing dx/4
    std::vector<double> phi;
    std::vector<double> dphi;
    double x_eps = 0.0;       // first zero of phi
    double asymptotic_exponent = 0.0;
    double eps = 0.0;
    double x_start = 0.0;
    double h = 0.0;

    double value(double z) const;      // cubic Hermite interpolation
    double derivative(double z) const;
};

/// Integrates chi(x) phi'' + c_het phi' + (alpha - lambda_star + eps) phi = 0
/// rightward from the asymptotic datum (phi, phi') = (1, nu) at x_start by RK4
/// with dx/4 substeps; returns the solution up to just past its first zero.
PhiSolution phi_shoot(const Parameters& p, const ChiProfile& chi, double eps,
                      double x_start, const Grid1D& grid);

/// Default x_start: |chi(x) - d_-| < 1e-10 with ten extra units of depth.
double phi_default_x_start(const ChiProfile& chi);

struct WeakDecayReport {
    double min_value = 0.0;
    double worst_x = 0.0;
    bool positive = false;
};

/// min over the resolved interior of U'(x) + (c_het / (2 d_+)) U(x), one-sided
/// differences; a positive minimum realizes the weak-decay obstruction.
WeakDecayReport check_weak_decay_inequality(const WaveProfile& w, const Parameters& p);

struct UniquenessReport {
    std::vector<double> taus;
    double distance_unaligned = 0.0;
    double distance_aligned = 0.0;
    bool all_converged = false;
};

/// Relaxes from `perturbations` distinct super-solution shifts and reports the
/// max pairwise sup-distance of the steady profiles (raw, and aligned at
/// U = 0.5 as a diagnostic).
UniquenessReport uniqueness_probe(const Parameters& p, const ChiProfile& chi,
                                  const Grid1D& grid, const RelaxOptions& opts,
                                  int perturbations);

} // namespace kpp::waves

#endif
