#include "kpp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kpp::kernels {

namespace {

inline double interior_rhs(double um, double u0, double up, double chi, double inv_dx2,
                           double alpha) {
    return chi * (up - 2.0 * u0 + um) * inv_dx2 + alpha * u0 * (1.0 - u0);
}

} // namespace

void fill_chi_shifted(const ChiProfile& chi, double shift, double x_min, double dx,
                      std::span<double> out, Exec exec) {
    const long n = static_cast<long>(out.size());
    long i_lo = 0, i_hi = n - 1;
    const bool logistic = chi.variant == ChiVariant::LogisticCaseI ||
                          chi.variant == ChiVariant::LogisticCaseII;
    if (logistic) {
        // chi_eval saturates to the exact limits once |lambda (x - shift)| >= 45.
        const double reach = 45.0 / chi.params.chi_steepness;
        i_lo = std::clamp(static_cast<long>(std::floor((shift - reach - x_min) / dx)),
                          0L, n - 1);
        i_hi = std::clamp(static_cast<long>(std::ceil((shift + reach - x_min) / dx)), 0L,
                          n - 1);
        const double left = chi.limit_left(), right = chi.limit_right();
        for (long i = 0; i < i_lo; ++i) out[i] = left;
        for (long i = i_hi + 1; i < n; ++i) out[i] = right;
    }
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
        for (long i = i_lo; i <= i_hi; ++i)
            out[i] = chi_eval(chi, x_min + i * dx - shift);
    } else {
        for (long i = i_lo; i <= i_hi; ++i)
            out[i] = chi_eval(chi, x_min + i * dx - shift);
    }
}

void euler_step_lab(std::span<const double> u, std::span<double> out,
                    const ChiProfile& chi, double shift, double x_min, double dx,
                    double dt, double alpha, Exec exec) {
    const long n = static_cast<long>(u.size());
    const double inv_dx2 = 1.0 / (dx * dx);

    // One scratch row per calling thread; workers below must go through the
    // captured pointer, not the thread_local name.
    thread_local std::vector<double> chi_buf;
    chi_buf.resize(n);
    fill_chi_shifted(chi, shift, x_min, dx, chi_buf, exec);
    const double* cb = chi_buf.data();

    // Left Neumann point: ghost u[-1] = u[1].
    out[0] = u[0] + dt * interior_rhs(u[1], u[0], u[1], cb[0], inv_dx2, alpha);

    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
        for (long i = 1; i < n - 1; ++i)
            out[i] =
                u[i] + dt * interior_rhs(u[i - 1], u[i], u[i + 1], cb[i], inv_dx2, alpha);
    } else {
        for (long i = 1; i < n - 1; ++i)
            out[i] =
                u[i] + dt * interior_rhs(u[i - 1], u[i], u[i + 1], cb[i], inv_dx2, alpha);
    }
    out[n - 1] = u[n - 1]; // held right boundary
}

void euler_step_comoving(std::span<const double> u, std::span<double> out,
                         std::span<const double> chi_of_x, double c_het,
                         Advection advection, double dx, double dt, double alpha,
                         Exec exec) {
    const long n = static_cast<long>(u.size());
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_dx = 1.0 / dx;
    const bool upwind = advection == Advection::Upwind;

    // Left Neumann point: centered advection term vanishes with the ghost value.
    {
        const double adv = upwind ? c_het * (u[1] - u[0]) * inv_dx : 0.0;
        out[0] = u[0] +
                 dt * (interior_rhs(u[1], u[0], u[1], chi_of_x[0], inv_dx2, alpha) + adv);
    }

    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
        for (long i = 1; i < n - 1; ++i) {
            const double adv = upwind ? c_het * (u[i + 1] - u[i]) * inv_dx
                                      : c_het * (u[i + 1] - u[i - 1]) * 0.5 * inv_dx;
            out[i] = u[i] + dt * (interior_rhs(u[i - 1], u[i], u[i + 1], chi_of_x[i],
                                               inv_dx2, alpha) +
                                  adv);
        }
    } else {
        for (long i = 1; i < n - 1; ++i) {
            const double adv = upwind ? c_het * (u[i + 1] - u[i]) * inv_dx
                                      : c_het * (u[i + 1] - u[i - 1]) * 0.5 * inv_dx;
            out[i] = u[i] + dt * (interior_rhs(u[i - 1], u[i], u[i + 1], chi_of_x[i],
                                               inv_dx2, alpha) +
                                  adv);
        }
    }
    out[n - 1] = u[n - 1];
}

double clip_to_unit(std::span<double> u, double tol, Exec exec) {
    const long n = static_cast<long>(u.size());
    const double lo = -tol, hi = 1.0 + tol;
    double clipped = 0.0;
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static) reduction(+ : clipped)
        for (long i = 0; i < n; ++i) {
            if (u[i] < lo) {
                clipped += lo - u[i];
                u[i] = lo;
            } else if (u[i] > hi) {
                clipped += u[i] - hi;
                u[i] = hi;
            }
        }
    } else {
        for (long i = 0; i < n; ++i) {
            if (u[i] < lo) {
                clipped += lo - u[i];
                u[i] = lo;
            } else if (u[i] > hi) {
                clipped += u[i] - hi;
                u[i] = hi;
            }
        }
    }
    return clipped;
}

double sup_diff(std::span<const double> a, std::span<const double> b, Exec exec) {
    const long n = static_cast<long>(a.size());
    double worst = 0.0;
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static) reduction(max : worst)
        for (long i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    } else {
        for (long i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

double max_value(std::span<const double> u, Exec exec) {
    const long n = static_cast<long>(u.size());
    double worst = -std::numeric_limits<double>::infinity();
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static) reduction(max : worst)
        for (long i = 0; i < n; ++i) worst = std::max(worst, u[i]);
    } else {
        for (long i = 0; i < n; ++i) worst = std::max(worst, u[i]);
    }
    return worst;
}

} // namespace kpp::kernels
