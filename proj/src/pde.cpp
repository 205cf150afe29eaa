#include "kpp/pde.hpp"

#include "kpp/speeds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kpp::pde {

namespace {

constexpr double kClipTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

void march_reaction_half(std::vector<double>& u, double dt_half, double alpha) {
    const long n = static_cast<long>(u.size());
    for (long i = 0; i < n - 1; ++i) u[i] += dt_half * alpha * u[i] * (1.0 - u[i]);
}

// Thomas solve of a tridiagonal system; diag/upper/lower are overwritten.
void thomas(std::vector<double>& lower, std::vector<double>& diag,
            std::vector<double>& upper, std::vector<double>& rhs) {
    const long n = static_cast<long>(diag.size());
    for (long i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (long i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Crank-Nicolson linear substep for the diffusion (+ advection) part.
// chi_at(i) supplies the coefficient at node i for this substep.
void cn_substep(std::vector<double>& u, const std::function<double(long)>& chi_at,
                double c_adv, kernels::Advection advection, double dx, double dt) {
    const long n = static_cast<long>(u.size());
    std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0), rhs(n, 0.0);

    // Row 0: Neumann ghost u[-1] = u[1]; the centered advection term vanishes
    // with the ghost value, upwind uses the forward difference.
    {
        const double c = chi_at(0);
        double L00 = -2.0 * c / (dx * dx);
        double L01 = 2.0 * c / (dx * dx);
        if (advection == kernels::Advection::Upwind && c_adv != 0.0) {
            L00 += -c_adv / dx;
            L01 += c_adv / dx;
        }
        diag[0] = 1.0 - 0.5 * dt * L00;
        upper[0] = -0.5 * dt * L01;
        rhs[0] = u[0] + 0.5 * dt * (L00 * u[0] + L01 * u[1]);
    }

    for (long i = 1; i < n - 1; ++i) {
        const double c = chi_at(i);
        double Lm = c / (dx * dx), L0 = -2.0 * c / (dx * dx), Lp = c / (dx * dx);
        if (advection == kernels::Advection::Upwind) {
            L0 += -c_adv / dx;
            Lp += c_adv / dx;
        } else if (advection == kernels::Advection::Centered && c_adv != 0.0) {
            Lm += -c_adv / (2.0 * dx);
            Lp += c_adv / (2.0 * dx);
        }
        lower[i] = -0.5 * dt * Lm;
        diag[i] = 1.0 - 0.5 * dt * L0;
        upper[i] = -0.5 * dt * Lp;
        rhs[i] = u[i] + 0.5 * dt * (Lm * u[i - 1] + L0 * u[i] + Lp * u[i + 1]);
    }

    // Held right boundary.
    lower[n - 1] = 0.0;
    diag[n - 1] = 1.0;
    rhs[n - 1] = u[n - 1];

    thomas(lower, diag, upper, rhs);
    u = rhs;
}

struct Marcher {
    const SolverConfig& cfg;
    const Parameters& p;
    const ChiProfile& chi;
    Grid1D grid;
    double dt;
    std::vector<double> chi_nodes; // comoving frame only

    Marcher(const SolverConfig& cfg_, const Parameters& p_, const ChiProfile& chi_,
            const Grid1D& grid_)
        : cfg(cfg_), p(p_), chi(chi_), grid(grid_), dt(time_step(cfg_, p_, grid_)) {
        if (!chi.smooth())
            throw ValidationError(
                "pde: the Step profile is rejected by the solver (nonsmooth chi)");
        if (cfg.frame == Frame::Comoving) {
            chi_nodes.resize(grid.nx);
            for (int i = 0; i < grid.nx; ++i) chi_nodes[i] = chi_eval(chi, grid.x(i));
            if (cfg.advection == kernels::Advection::Centered) {
                const double pe = p.c_het * grid.dx() / p.d_minus;
                if (pe > 2.0)
                    throw ValidationError(
                        "pde: centered advection needs cell Peclet <= 2; reduce dx");
            }
        }
    }

    // Advance u in place over one step of size h ending at time t + h.
    void advance(std::vector<double>& u, std::vector<double>& scratch, double t, double h) {
        if (cfg.scheme == Scheme::ExplicitEuler) {
            if (cfg.frame == Frame::Lab) {
                kernels::euler_step_lab(u, scratch, chi, p.c_het * t, grid.x_min, grid.dx(),
                                        h, p.alpha, cfg.exec);
            } else {
                kernels::euler_step_comoving(u, scratch, chi_nodes, p.c_het, cfg.advection,
                                             grid.dx(), h, p.alpha, cfg.exec);
            }
            u.swap(scratch);
        } else {
            march_reaction_half(u, 0.5 * h, p.alpha);
            if (cfg.frame == Frame::Lab) {
                const double shift = p.c_het * (t + 0.5 * h);
                cn_substep(
                    u, [&](long i) { return chi_eval(chi, grid.x(static_cast<int>(i)) - shift); },
                    0.0, kernels::Advection::Centered, grid.dx(), h);
            } else {
                cn_substep(u, [&](long i) { return chi_nodes[i]; }, p.c_het, cfg.advection,
                           grid.dx(), h);
            }
            march_reaction_half(u, 0.5 * h, p.alpha);
        }
    }
};

} // namespace

void SolverConfig::validate() const {
    if (!(dt_safety > 0.0 && dt_safety <= 1.0))
        throw ValidationError("SolverConfig: dt_safety must lie in (0, 1]");
    if (!(t_end >= 0.0))
        throw ValidationError("SolverConfig: t_end must be nonnegative");
    if (snapshot_stride < 0)
        throw ValidationError("SolverConfig: snapshot_stride must be nonnegative");
}

double time_step(const SolverConfig& cfg, const Parameters& p, const Grid1D& grid) {
    cfg.validate();
    grid.validate();
    const double dx = grid.dx();
    if (cfg.scheme == Scheme::ExplicitEuler) {
        double dt = dx * dx / (2.0 * p.d_plus);
        if (cfg.frame == Frame::Comoving && p.c_het > 0.0 &&
            cfg.advection == kernels::Advection::Upwind)
            dt = 1.0 / (2.0 * p.d_plus / (dx * dx) + p.c_het / dx);
        return cfg.dt_safety * dt;
    }
    // Strang splitting with CN diffusion: accuracy-limited, not stability-limited.
    return cfg.dt_safety * dx;
}

Field initial_bump(const Grid1D& grid, double center, double halfwidth, double height) {
    grid.validate();
    if (!(height > 0.0))
        throw ValidationError("initial_bump: nontrivial datum requires height > 0");
    if (height > 1.0)
        throw ValidationError("initial_bump: height must not exceed 1");
    if (!(halfwidth > 0.0))
        throw ValidationError("initial_bump: halfwidth must be positive");
    const double dx = grid.dx();
    if (center - halfwidth < grid.x_min || center + halfwidth > grid.x_max)
        throw ValidationError("initial_bump: bump exceeds the domain");

    Field f;
    f.grid = grid;
    f.t = 0.0;
    f.values.assign(grid.nx, 0.0);
    for (int i = 0; i < grid.nx; ++i) {
        const double d = std::abs(grid.x(i) - center);
        if (d <= halfwidth - dx) {
            f.values[i] = height;
        } else if (d < halfwidth) {
            f.values[i] = height * 0.5 * (1.0 + std::cos(M_PI * (d - halfwidth + dx) / dx));
        }
    }
    return f;
}

Field step(const Field& f, const SolverConfig& cfg, const Parameters& p,
           const ChiProfile& chi) {
    p.validate();
    Marcher m(cfg, p, chi, f.grid);
    Field out = f;
    std::vector<double> scratch(f.values.size());
    std::vector<double> u = f.values;
    m.advance(u, scratch, f.t, m.dt);
    out.values = std::move(u);
    out.t = f.t + m.dt;
    return out;
}

double front_position(const Field& f, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw ValidationError("front_position: theta must lie in (0, 1)");
    const auto& u = f.values;
    const int n = static_cast<int>(u.size());
    if (u[n - 1] >= theta) return f.grid.x_max;
    for (int i = n - 2; i >= 0; --i) {
        if (u[i] >= theta) {
            const double denom = u[i] - u[i + 1];
            const double w = denom > 0.0 ? (u[i] - theta) / denom : 0.0;
            return f.grid.x(i) + w * f.grid.dx();
        }
    }
    return -kInf;
}

Trajectory evolve(const Field& f0, const SolverConfig& cfg, const Parameters& p,
                  const ChiProfile& chi, const std::vector<double>& theta_levels) {
    p.validate();
    if (theta_levels.empty())
        throw ValidationError("evolve: need at least one tracking level");
    for (double th : theta_levels)
        if (!(th > 0.0 && th < 1.0))
            throw ValidationError("evolve: theta levels must lie in (0, 1)");

    Marcher m(cfg, p, chi, f0.grid);
    const double dt = m.dt;
    const long n_steps = cfg.t_end > 0.0
                             ? static_cast<long>(std::ceil(cfg.t_end / dt - 1e-12))
                             : 0;
    const long stride = cfg.snapshot_stride > 0
                            ? cfg.snapshot_stride
                            : std::max<long>(1, std::lround(0.1 / dt));

    Trajectory traj;
    traj.theta_levels = theta_levels;
    traj.front_positions.resize(theta_levels.size());

    std::vector<double> u = f0.values;
    std::vector<double> scratch(u.size());
    const double guard = f0.grid.x_max - 10.0 * f0.grid.dx();

    Field probe;
    probe.grid = f0.grid;

    auto record = [&](double t, long step_index) -> bool {
        const double umax = kernels::max_value(u, cfg.exec);
        if (!std::isfinite(umax))
            throw NumericsError("evolve: blowup detected at step " + std::to_string(step_index));
        probe.t = t;
        probe.values = u;
        traj.times.push_back(t);
        bool near_edge = false;
        for (std::size_t k = 0; k < theta_levels.size(); ++k) {
            const double xf = front_position(probe, theta_levels[k]);
            traj.front_positions[k].push_back(xf);
            if (xf > guard) near_edge = true;
        }
        if (cfg.keep_snapshots) traj.snapshots.push_back(probe);
        return near_edge;
    };

    if (record(0.0, 0)) {
        traj.domain_exhausted = true;
        return traj;
    }

    double t = 0.0;
    for (long s = 1; s <= n_steps; ++s) {
        const double h = std::min(dt, cfg.t_end - t);
        m.advance(u, scratch, t, h);
        t += h;
        traj.clipped_mass += kernels::clip_to_unit(u, kClipTol, cfg.exec) * f0.grid.dx();
        if (s % stride == 0 || s == n_steps) {
            if (record(t, s)) {
                traj.domain_exhausted = true;
                break;
            }
        }
    }
    return traj;
}

FitDiagnostics estimate_speed(const Trajectory& traj, double theta,
                              double fit_window_frac, bool bramson) {
    if (!(fit_window_frac > 0.0 && fit_window_frac < 1.0))
        throw ValidationError("estimate_speed: fit_window_frac must lie in (0, 1)");
    auto it = std::find(traj.theta_levels.begin(), traj.theta_levels.end(), theta);
    if (it == traj.theta_levels.end())
        throw ValidationError("estimate_speed: theta level was not tracked");
    const auto& fronts = traj.front_positions[it - traj.theta_levels.begin()];

    std::vector<std::pair<double, double>> samples;
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        if (!std::isfinite(fronts[j])) continue;
        if (bramson && traj.times[j] <= 0.0) continue;
        samples.emplace_back(traj.times[j], fronts[j]);
    }
    if (samples.size() < 2) throw NumericsError("estimate_speed: insufficient samples");
    const double t_first = samples.front().first;
    const double t_hi = samples.back().first;
    const double t_lo = t_hi - fit_window_frac * (t_hi - t_first);

    std::vector<std::pair<double, double>> win;
    for (const auto& s : samples)
        if (s.first >= t_lo) win.push_back(s);
    if (win.size() < 10) throw NumericsError("estimate_speed: insufficient samples in window");

    FitDiagnostics fit;
    fit.n_used = static_cast<int>(win.size());
    fit.t_lo = win.front().first;
    fit.t_hi = win.back().first;
    fit.bramson = bramson;

    const int n = fit.n_used;
    double mean_x = 0.0;
    for (const auto& s : win) mean_x += s.second;
    mean_x /= n;

    auto finish_r2 = [&](auto model) {
        double ss_res = 0.0, ss_tot = 0.0;
        for (const auto& s : win) {
            const double r = s.second - model(s.first);
            ss_res += r * r;
            ss_tot += (s.second - mean_x) * (s.second - mean_x);
        }
        fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    };

    if (!bramson) {
        double st = 0, sx = 0, stt = 0, stx = 0;
        for (const auto& s : win) {
            st += s.first;
            sx += s.second;
            stt += s.first * s.first;
            stx += s.first * s.second;
        }
        const double denom = n * stt - st * st;
        fit.c_est = (n * stx - st * sx) / denom;
        fit.intercept = (sx - fit.c_est * st) / n;
        finish_r2([&](double t) { return fit.c_est * t + fit.intercept; });
        return fit;
    }

    // Normal equations for x = c t - k ln t + b.
    double A[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double rhs[3] = {0, 0, 0};
    for (const auto& s : win) {
        const double basis[3] = {s.first, -std::log(s.first), 1.0};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) A[i][j] += basis[i] * basis[j];
            rhs[i] += basis[i] * s.second;
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(rhs[col], rhs[piv]);
        std::swap(perm[col], perm[piv]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = A[r][col] / A[col][col];
            for (int c2 = col; c2 < 3; ++c2) A[r][c2] -= f * A[col][c2];
            rhs[r] -= f * rhs[col];
        }
    }
    double beta[3];
    for (int r = 2; r >= 0; --r) {
        double acc = rhs[r];
        for (int c2 = r + 1; c2 < 3; ++c2) acc -= A[r][c2] * beta[c2];
        beta[r] = acc / A[r][r];
    }
    fit.c_est = beta[0];
    fit.bramson_k = beta[1];
    fit.intercept = beta[2];
    finish_r2([&](double t) { return fit.c_est * t - fit.bramson_k * std::log(t) + fit.intercept; });
    return fit;
}

std::vector<SweepRow> sweep_chet(const Parameters& base,
                                 const std::vector<double>& chet_values,
                                 const SolverConfig& cfg, const Field& f0,
                                 const std::function<ChiProfile(const Parameters&)>& chi_builder,
                                 double theta, double fit_window_frac, int jobs) {
    base.validate();
    std::vector<SweepRow> rows(chet_values.size());
    const long n = static_cast<long>(chet_values.size());

#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#else
    const int threads = 1;
    (void)jobs;
#endif

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long i = 0; i < n; ++i) {
        SweepRow row;
        row.c_het = chet_values[i];
        try {
            Parameters p = base;
            p.c_het = chet_values[i];
            p.validate();
            row.c_theory = speeds::spreading_speed(p).c_star;
            const ChiProfile chi = chi_builder(p);
            Trajectory traj = evolve(f0, cfg, p, chi, {theta});
            const FitDiagnostics fit = estimate_speed(traj, theta, fit_window_frac, false);
            row.c_est = fit.c_est;
            row.rel_err = std::abs(row.c_est - row.c_theory) / std::abs(row.c_theory);
            row.ok = true;
            if (traj.domain_exhausted) row.message = "domain exhausted before t_end";
        } catch (const std::exception& e) {
            row.ok = false;
            row.message = e.what();
        }
        rows[i] = row;
    }
    return rows;
}

} // namespace kpp::pde
