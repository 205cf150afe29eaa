#ifndef KPP_PDE_HPP
#define KPP_PDE_HPP

#include <functional>
#include <string>
#include <vector>

#include "kpp/grid.hpp"
#include "kpp/kernels.hpp"
#include "kpp/model.hpp"

namespace kpp::pde {

enum class Scheme { ExplicitEuler, StrangCN };
enum class Frame { Lab, Comoving };

struct SolverConfig {
    double dt_safety = 0.4; // CFL fraction in (0, 1]
    double t_end = 150.0;
    Scheme scheme = Scheme::ExplicitEuler;
    Frame frame = Frame::Lab;
    int snapshot_stride = 0; // steps between front samples; 0 = about every 0.1 time units
    kernels::Advection advection = kernels::Advection::Upwind;
    // Per-step loop parallelism only pays off on much larger grids than the
    // desk-scale defaults; sweeps parallelize across runs instead.
    kernels::Exec exec = kernels::Exec::Serial;
    bool keep_snapshots = false;

    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> theta_levels;
    // front_positions[k][j]: front of level theta_levels[k] at times[j];
    // -inf while the solution is still everywhere below the level.
    std::vector<std::vector<double>> front_positions;
    bool domain_exhausted = false;
    double clipped_mass = 0.0; // cumulative |clip| * dx
    std::vector<Field> snapshots;
};

/// Compactly supported initial bump: height on [center +- halfwidth] with a
/// one-cell cosine ramp at each edge.
Field initial_bump(const Grid1D& grid, double center, double halfwidth, double height);

/// Time step implied by the config on this grid.
double time_step(const SolverConfig& cfg, const Parameters& p, const Grid1D& grid);

/// Advance one time step. Boundary conditions as in evolve.
Field step(const Field& f, const SolverConfig& cfg, const Parameters& p,
           const ChiProfile& chi);

/// March to t_end recording front positions. Neumann at x_min, Dirichlet-held
/// at x_max. Stops early (partial trajectory, flag set) once any tracked front
/// comes within 10 dx of the right boundary.
Trajectory evolve(const Field& f0, const SolverConfig& cfg, const Parameters& p,
                  const ChiProfile& chi, const std::vector<double>& theta_levels);

/// Rightmost crossing of u = theta, linearly interpolated; -inf if max u < theta.
double front_position(const Field& f, double theta);

struct FitDiagnostics {
    double c_est = 0;
    double intercept = 0;
    double bramson_k = 0; // only when bramson fit requested
    double r2 = 0;
    int n_used = 0;
    double t_lo = 0, t_hi = 0;
    bool bramson = false;
};

/// Least-squares slope of x_theta(t) over the trailing fit_window_frac of the
/// trajectory; with bramson set, fits x(t) = c t - k ln t + b instead.
FitDiagnostics estimate_speed(const Trajectory& traj, double theta,
                              double fit_window_frac, bool bramson);

struct SweepRow {
    double c_het = 0;
    double c_theory = 0;
    double c_est = 0;
    double rel_err = 0;
    bool ok = false;
    std::string message;
};

/// One evolve + estimate per c_het value; failures are flagged rows. Rows come
/// back in input order; runs execute in parallel when jobs != 1.
std::vector<SweepRow> sweep_chet(const Parameters& base,
                                 const std::vector<double>& chet_values,
                                 const SolverConfig& cfg, const Field& f0,
                                 const std::function<ChiProfile(const Parameters&)>& chi_builder,
                                 double theta, double fit_window_frac, int jobs = 0);

} // namespace kpp::pde

#endif
