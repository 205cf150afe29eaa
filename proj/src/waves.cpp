#include "kpp/waves.hpp"

#include <algorithm>
#include <cmath>

#include "kpp/pde.hpp"
#include "kpp/speeds.hpp"

namespace kpp::waves {

namespace {

double resolve_eps(const Parameters& p, double eps) {
    if (eps >= 0.0) return eps;
    const double cm = speeds::c_minus(p);
    return 0.1 * (p.c_het - cm) * (p.c_het - cm) / (4.0 * p.alpha);
}

double lambda_eps_strong(const Parameters& p, double eps) {
    const double d = p.d_minus + eps;
    const double disc = p.c_het * p.c_het - 4.0 * d * p.alpha;
    if (!(disc > 0.0))
        throw ValidationError("relax_to_wave: eps too large, need 2 sqrt((d_-+eps) alpha) < c_het");
    return (p.c_het + std::sqrt(disc)) / (2.0 * d);
}

double resolve_tau(const ChiProfile& chi, const Parameters& p, double eps, double tau) {
    if (!std::isnan(tau)) return tau;
    const double target = p.d_minus + eps;
    const double sup = std::max(chi.limit_left(), chi.limit_right());
    if (target >= sup) return 0.0; // chi never exceeds d_- + eps
    return chi_inverse(chi, target);
}

} // namespace

WaveProfile relax_to_wave(const Parameters& p, const ChiProfile& chi, const Grid1D& grid,
                          const RelaxOptions& opts) {
    p.validate();
    grid.validate();
    const double cm = speeds::c_minus(p);
    const double cp = speeds::c_plus(p);
    if (!opts.allow_any_speed) {
        if (p.case_tag != CaseTag::CaseI_decreasing)
            throw ValidationError("relax_to_wave: traveling waves require a Case I profile");
        if (!(p.c_het > cm && p.c_het < cp))
            throw RegimeError("relax_to_wave: existence band is c_het in (c_-, c_+)");
    }

    const double eps = resolve_eps(p, opts.eps);
    const double lam = lambda_eps_strong(p, eps);
    const double tau = resolve_tau(chi, p, eps, opts.tau);

    const double dx = grid.dx();
    const double pe = p.c_het * dx / p.d_minus;
    if (pe > 2.0)
        throw ValidationError("relax_to_wave: centered advection needs cell Peclet <= 2");
    const double dt = opts.dt_safety * dx * dx / (2.0 * p.d_plus);

    std::vector<double> chi_nodes(grid.nx);
    for (int i = 0; i < grid.nx; ++i) chi_nodes[i] = chi_eval(chi, grid.x(i));

    std::vector<double> u;
    if (opts.initial) {
        if (static_cast<int>(opts.initial->size()) != grid.nx)
            throw ValidationError("relax_to_wave: initial override has wrong size");
        u = *opts.initial;
    } else {
        u.resize(grid.nx);
        for (int i = 0; i < grid.nx; ++i)
            u[i] = std::min(1.0, std::exp(-lam * (grid.x(i) - tau)));
    }

    WaveProfile w;
    w.grid = grid;

    std::vector<double> scratch(u.size());
    std::vector<double> checkpoint = u;
    const long steps_per_check =
        std::max<long>(1, std::lround(opts.check_interval / dt));

    double t = 0.0;
    w.increment = std::numeric_limits<double>::infinity();
    while (t < opts.t_max) {
        for (long s = 0; s < steps_per_check; ++s) {
            kernels::euler_step_comoving(u, scratch, chi_nodes, p.c_het,
                                         kernels::Advection::Centered, dx, dt, p.alpha,
                                         opts.exec);
            u.swap(scratch);
        }
        t += steps_per_check * dt;
        w.increment = kernels::sup_diff(u, checkpoint, opts.exec);
        if (!std::isfinite(w.increment))
            throw NumericsError("relax_to_wave: blowup during relaxation");
        checkpoint = u;
        if (w.increment < opts.increment_tol) {
            w.converged = true;
            break;
        }
    }
    w.t_elapsed = t;
    w.U = std::move(u);

    // Residual of the centered-difference traveling-wave equation.
    const auto& U = w.U;
    double worst = 0.0;
    for (int i = 1; i + 1 < grid.nx; ++i) {
        const double r = chi_nodes[i] * (U[i + 1] - 2.0 * U[i] + U[i - 1]) / (dx * dx) +
                         p.c_het * (U[i + 1] - U[i - 1]) / (2.0 * dx) +
                         p.alpha * U[i] * (1.0 - U[i]);
        worst = std::max(worst, std::abs(r));
    }
    w.residual = worst;

    // Monotone: nonincreasing up to round-off, strictly so in the bulk.
    w.monotone = true;
    for (int i = 0; i + 1 < grid.nx && w.monotone; ++i) {
        if (U[i + 1] > U[i] + 1e-12) w.monotone = false;
        const bool bulk = U[i] > 1e-6 && U[i] < 1.0 - 1e-6 && U[i + 1] > 1e-6 &&
                          U[i + 1] < 1.0 - 1e-6;
        if (bulk && !(U[i + 1] < U[i])) w.monotone = false;
    }

    // Fit the decay where chi has settled onto d_-: the profile's asymptotic
    // rate only emerges once chi is within ~1% of its limit, which for shallow
    // profiles lies below the generic [1e-6, 1e-2] window.
    try {
        double u_hi = 1e-2, u_lo = 1e-6;
        const double gap = p.d_plus - p.d_minus;
        if (gap > 0.0) {
            const double x_settled = chi_inverse(chi, p.d_minus + 0.01 * gap);
            const int i0 = std::clamp(
                static_cast<int>(std::ceil((x_settled - grid.x_min) / dx)), 0,
                grid.nx - 1);
            u_hi = std::clamp(w.U[i0], 1e-11, 1e-2);
            u_lo = std::max(1e-13, 1e-4 * u_hi);
        }
        w.decay_fit = measure_decay(w, u_lo, u_hi);
    } catch (const NumericsError&) {
        try {
            w.decay_fit = measure_decay(w);
        } catch (const NumericsError&) {
            w.decay_fit = {};
        }
    }
    return w;
}

DecayFit measure_decay(const WaveProfile& w, double u_lo, double u_hi) {
    if (!(u_lo > 0.0 && u_lo < u_hi && u_hi < 1.0))
        throw ValidationError("measure_decay: need 0 < u_lo < u_hi < 1");
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < w.grid.nx; ++i) {
        const double v = w.U[i];
        if (v >= u_lo && v <= u_hi) pts.emplace_back(w.grid.x(i), std::log(v));
    }
    if (pts.size() < 20)
        throw NumericsError("measure_decay: window holds fewer than 20 points; "
                            "enlarge the domain");

    const int n = static_cast<int>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& q : pts) {
        sx += q.first;
        sy += q.second;
        sxx += q.first * q.first;
        sxy += q.first * q.second;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / n;

    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (const auto& q : pts) {
        const double r = q.second - (slope * q.first + icept);
        ss_res += r * r;
        ss_tot += (q.second - mean_y) * (q.second - mean_y);
    }

    DecayFit fit;
    fit.lambda_fit = -slope;
    fit.intercept = icept;
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.window_lo = pts.front().first;
    fit.window_hi = pts.back().first;
    fit.n_points = n;
    return fit;
}

double PhiSolution::value(double z) const {
    const int n = static_cast<int>(x.size());
    if (z <= x.front()) return phi.front();
    if (z >= x.back()) return phi.back();
    const int k = std::min(n - 2, static_cast<int>((z - x.front()) / h));
    const double t = (z - x[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * phi[k] + (t3 - 2 * t2 + t) * h * dphi[k] +
           (-2 * t3 + 3 * t2) * phi[k + 1] + (t3 - t2) * h * dphi[k + 1];
}

double PhiSolution::derivative(double z) const {
    const int n = static_cast<int>(x.size());
    if (z <= x.front()) return dphi.front();
    if (z >= x.back()) return dphi.back();
    const int k = std::min(n - 2, static_cast<int>((z - x.front()) / h));
    const double t = (z - x[k]) / h;
    const double t2 = t * t;
    return (6 * t2 - 6 * t) * phi[k] / h + (3 * t2 - 4 * t + 1) * dphi[k] +
           (-6 * t2 + 6 * t) * phi[k + 1] / h + (3 * t2 - 2 * t) * dphi[k + 1];
}

double phi_default_x_start(const ChiProfile& chi) {
    const double d_minus = chi.params.d_minus;
    const double target = d_minus + 0.5e-10;
    const double lo = std::min(chi.limit_left(), chi.limit_right());
    const double hi = std::max(chi.limit_left(), chi.limit_right());
    if (!(target > lo && target < hi)) return -20.0; // flat tail profile
    return chi_inverse(chi, target) - 10.0;
}

PhiSolution phi_shoot(const Parameters& p, const ChiProfile& chi, double eps,
                      double x_start, const Grid1D& grid) {
    p.validate();
    grid.validate();
    const double cp = speeds::c_plus(p);
    if (!(p.c_het > cp))
        throw RegimeError("phi_shoot: requires c_het > c_plus");
    const double band = p.c_het * p.c_het / 4.0 * (1.0 / p.d_minus - 1.0 / p.d_plus);
    if (!(eps > 0.0 && eps < band))
        throw RegimeError("phi_shoot: eps outside the admissible band (0, " +
                          std::to_string(band) + ")");
    if (std::abs(chi_eval(chi, x_start) - p.d_minus) >= 1e-10)
        throw ValidationError("phi_shoot: x_start must satisfy |chi(x_start) - d_-| < 1e-10");
    if (x_start >= grid.x_max)
        throw ValidationError("phi_shoot: x_start beyond the grid");

    const double lam_star = speeds::lambda_star(p);
    const double mu_eq = lam_star - eps;  // L phi = mu_eq phi
    const double coeff = p.alpha - mu_eq; // chi phi'' + c_het phi' + coeff phi = 0
    const double nu =
        (-p.c_het + std::sqrt(p.c_het * p.c_het - 4.0 * p.d_minus * coeff)) /
        (2.0 * p.d_minus);

    const double h = grid.dx() / 4.0;

    auto rhs = [&](double x, double f, double df, double* out_f, double* out_df) {
        *out_f = df;
        *out_df = -(p.c_het * df + coeff * f) / chi_eval(chi, x);
    };
    auto rk4 = [&](double x, double step, double& f, double& df) {
        double k1f, k1d, k2f, k2d, k3f, k3d, k4f, k4d;
        rhs(x, f, df, &k1f, &k1d);
        rhs(x + 0.5 * step, f + 0.5 * step * k1f, df + 0.5 * step * k1d, &k2f, &k2d);
        rhs(x + 0.5 * step, f + 0.5 * step * k2f, df + 0.5 * step * k2d, &k3f, &k3d);
        rhs(x + step, f + step * k3f, df + step * k3d, &k4f, &k4d);
        f += step / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        df += step / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    };

    PhiSolution sol;
    sol.eps = eps;
    sol.x_start = x_start;
    sol.asymptotic_exponent = nu;
    sol.h = h;

    double f = 1.0, df = nu, x = x_start;
    sol.x.push_back(x);
    sol.phi.push_back(f);
    sol.dphi.push_back(df);

    bool found = false;
    int extra = 0;
    while (x < grid.x_max - 0.5 * h) {
        const double f_prev = f, df_prev = df, x_prev = x;
        rk4(x, h, f, df);
        x += h;
        sol.x.push_back(x);
        sol.phi.push_back(f);
        sol.dphi.push_back(df);

        if (!found && f_prev > 0.0 && f <= 0.0) {
            // Bisect the crossing with partial RK4 steps from the last node.
            double lo = 0.0, hi_s = h;
            for (int it = 0; it < 80 && hi_s - lo > 1e-14; ++it) {
                const double mid = 0.5 * (lo + hi_s);
                double fm = f_prev, dfm = df_prev;
                rk4(x_prev, mid, fm, dfm);
                if (fm > 0.0)
                    lo = mid;
                else
                    hi_s = mid;
            }
            sol.x_eps = x_prev + 0.5 * (lo + hi_s);
            found = true;
        }
        if (found && ++extra >= 8) break;
    }
    if (!found)
        throw NumericsError("phi_shoot: no sign change before the grid end; "
                            "enlarge the domain");
    return sol;
}

WeakDecayReport check_weak_decay_inequality(const WaveProfile& w, const Parameters& p) {
    WeakDecayReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    const double dx = w.grid.dx();
    const double rate = p.c_het / (2.0 * p.d_plus);
    for (int i = 0; i + 1 < w.grid.nx; ++i) {
        if (w.U[i] < 1e-12) continue; // below the double-precision tail floor
        const double v = (w.U[i + 1] - w.U[i]) / dx + rate * w.U[i];
        if (v < rep.min_value) {
            rep.min_value = v;
            rep.worst_x = w.grid.x(i);
        }
    }
    rep.positive = rep.min_value > 0.0;
    return rep;
}

UniquenessReport uniqueness_probe(const Parameters& p, const ChiProfile& chi,
                                  const Grid1D& grid, const RelaxOptions& opts,
                                  int perturbations) {
    if (perturbations < 2)
        throw ValidationError("uniqueness_probe: need at least two initializations");

    UniquenessReport rep;
    std::vector<WaveProfile> waves;
    rep.all_converged = true;
    for (int k = 0; k < perturbations; ++k) {
        RelaxOptions o = opts;
        o.tau = 5.0 + 10.0 * k;
        waves.push_back(relax_to_wave(p, chi, grid, o));
        rep.taus.push_back(o.tau);
        rep.all_converged = rep.all_converged && waves.back().converged;
    }

    auto aligned_distance = [&](const WaveProfile& a, const WaveProfile& b) {
        Field fa{grid, 0.0, a.U}, fb{grid, 0.0, b.U};
        const double xa = pde::front_position(fa, 0.5);
        const double xb = pde::front_position(fb, 0.5);
        const double shift = xa - xb;
        double worst = 0.0;
        for (int i = 0; i < grid.nx; ++i) {
            const double z = grid.x(i) + shift;
            if (z < grid.x_min || z > grid.x_max) continue;
            if (a.U[i] < 1e-6 || a.U[i] > 1.0 - 1e-6) continue;
            const int j = std::min(grid.nx - 2,
                                   static_cast<int>((z - grid.x_min) / grid.dx()));
            const double w = (z - grid.x(j)) / grid.dx();
            const double bv = b.U[j] + w * (b.U[j + 1] - b.U[j]);
            worst = std::max(worst, std::abs(a.U[i] - bv));
        }
        return worst;
    };

    for (std::size_t i = 0; i < waves.size(); ++i) {
        for (std::size_t j = i + 1; j < waves.size(); ++j) {
            rep.distance_unaligned =
                std::max(rep.distance_unaligned,
                         kernels::sup_diff(waves[i].U, waves[j].U, opts.exec));
            rep.distance_aligned =
                std::max(rep.distance_aligned, aligned_distance(waves[i], waves[j]));
        }
    }
    return rep;
}

} // namespace kpp::waves
