// Benchmark of the data-parallel kernels: serial reference vs OpenMP, on the
// explicit step (lab and comoving frames) and on a residual-sampling sweep of
// the kind the verification checker runs.

#include <chrono>
#include <cstdio>
#include <vector>

#include "kpp/kernels.hpp"
#include "kpp/model.hpp"
#include "kpp/speeds.hpp"
#include "kpp/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace kpp;

namespace {

double seconds(const std::function<void()>& fn, int repeats) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / repeats;
}

void report(const char* name, double t_serial, double t_omp) {
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, 1e3 * t_serial, 1e3 * t_omp,
                t_serial / t_omp);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    Parameters p;
    const ChiProfile chi = ChiProfile::logistic(p);

    const int n = 200000;
    const double dx = 0.01, dt = 0.4 * dx * dx / (2.0 * p.d_plus);
    std::vector<double> u(n), out(n);
    for (int i = 0; i < n; ++i) u[i] = i * dx < 500.0 ? 1.0 : 0.0;

    {
        auto run = [&](kernels::Exec e) {
            return [&, e] {
                for (int s = 0; s < 20; ++s) {
                    kernels::euler_step_lab(u, out, chi, 1.5 * s * dt, -1000.0, dx, dt,
                                            p.alpha, e);
                    u.swap(out);
                }
            };
        };
        const double ts = seconds(run(kernels::Exec::Serial), 5);
        const double to = seconds(run(kernels::Exec::OpenMP), 5);
        report("euler_step_lab x20", ts, to);
    }

    {
        std::vector<double> chi_x(n);
        for (int i = 0; i < n; ++i) chi_x[i] = chi_eval(chi, -1000.0 + i * dx);
        auto run = [&](kernels::Exec e) {
            return [&, e] {
                for (int s = 0; s < 20; ++s) {
                    kernels::euler_step_comoving(u, out, chi_x, p.c_het,
                                                 kernels::Advection::Centered, dx, dt,
                                                 p.alpha, e);
                    u.swap(out);
                }
            };
        };
        const double ts = seconds(run(kernels::Exec::Serial), 5);
        const double to = seconds(run(kernels::Exec::OpenMP), 5);
        report("euler_step_comoving x20", ts, to);
    }

    {
        const auto fn = verify::build_general_super(p, 1.0);
        verify::CheckOptions opts;
        opts.nt = 400;
        opts.nx_samples = 4000;
        auto run = [&](kernels::Exec e) {
            return [&, e] {
                verify::CheckOptions o = opts;
                o.exec = e;
                (void)verify::check(fn, p, chi, o);
            };
        };
        const double ts = seconds(run(kernels::Exec::Serial), 3);
        const double to = seconds(run(kernels::Exec::OpenMP), 3);
        report("residual sampling 400x4000", ts, to);
    }

    return 0;
}
