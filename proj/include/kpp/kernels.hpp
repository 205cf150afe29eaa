#ifndef KPP_KERNELS_HPP
#define KPP_KERNELS_HPP

#include <span>

#include "kpp/model.hpp"

namespace kpp::kernels {

/// Execution policy for the data-parallel inner loops. Serial is the
/// reference implementation; OpenMP must produce bit-identical results
/// (independent writes, order-free reductions only).
enum class Exec { Serial, OpenMP };

enum class Advection { Upwind, Centered };

/// Tabulates chi(x_i - shift) over the grid, short-circuiting the saturated
/// logistic tails to their exact limit values.
void fill_chi_shifted(const ChiProfile& chi, double shift, double x_min, double dx,
                      std::span<double> out, Exec exec);

/// One explicit Euler step of u_t = chi(x - shift) u_xx + alpha u (1-u) in the
/// lab frame. Left boundary: homogeneous Neumann (ghost u[-1] = u[1]).
/// Right boundary: held (Dirichlet with the inital datum's value).
void euler_step_lab(std::span<const double> u, std::span<double> out,
                    const ChiProfile& chi, double shift, double x_min, double dx,
                    double dt, double alpha, Exec exec);

/// One explicit Euler step of u_t = chi(x) u_xx + c_het u_x + alpha u (1-u)
/// in the comoving frame, chi precomputed per node. Upwind uses the forward
/// difference (information enters from the right for c_het > 0).
void euler_step_comoving(std::span<const double> u, std::span<double> out,
                         std::span<const double> chi_of_x, double c_het,
                         Advection advection, double dx, double dt, double alpha,
                         Exec exec);

/// Clip u into [-tol, 1 + tol]; returns the total clipped amount (sum of |delta|).
double clip_to_unit(std::span<double> u, double tol, Exec exec);

double sup_diff(std::span<const double> a, std::span<const double> b, Exec exec);
double max_value(std::span<const double> u, Exec exec);

} // namespace kpp::kernels

#endif
