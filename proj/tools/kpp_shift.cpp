// kpp-shift: speed theory, simulation, sweeps, traveling waves, eigenvalue
// scans and comparison-function verification for the shifting-diffusivity
// KPP equation. One JSON config drives every subcommand; --set overrides
// individual keys by dotted path.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "kpp/config.hpp"
#include "kpp/report_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace kpp;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    int jobs = 0;
};

RunConfig make_config(const CommonArgs& a) {
    RunConfig cfg = a.config_path.empty()
                        ? config_from_json(nlohmann::json::object(), a.sets)
                        : load_config(a.config_path, a.sets);
    if (const char* env = std::getenv("KPP_SHIFT_OUT")) cfg.output.out_dir = env;
    std::filesystem::create_directories(cfg.output.out_dir);
    return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output.out_dir) / name).string();
}

int cmd_speeds(const CommonArgs& a) {
    const RunConfig cfg = make_config(a);
    const auto rep = speeds::spreading_speed(cfg.parameters);
    const auto j = io::speed_report_json(rep, cfg.parameters.case_tag);
    std::cout << j.dump(2) << "\n";
    io::write_text(out_path(cfg, "speeds.json"), j.dump(2) + "\n");
    return 0;
}

int cmd_simulate(const CommonArgs& a) {
    const RunConfig cfg = make_config(a);
    if (!(cfg.time.t_end > 0.0))
        throw ValidationError("simulate: t_end must be positive (empty trajectory)");
    const ChiProfile chi = cfg.make_chi();
    const Field f0 =
        pde::initial_bump(cfg.grid, cfg.initial.center, cfg.initial.halfwidth,
                          cfg.initial.height);
    const pde::Trajectory traj =
        pde::evolve(f0, cfg.time, cfg.parameters, chi, cfg.tracking.theta_levels);
    io::write_front_csv(out_path(cfg, "front.csv"), traj);

    const double theta = cfg.tracking.theta_levels.front();
    const auto fit = pde::estimate_speed(traj, theta, cfg.tracking.fit_window_frac,
                                         cfg.tracking.bramson);
    const auto theory = speeds::spreading_speed(cfg.parameters);

    nlohmann::ordered_json j;
    j["c_est"] = fit.c_est;
    j["c_theory"] = theory.c_star;
    j["rel_err"] = std::abs(fit.c_est - theory.c_star) / std::abs(theory.c_star);
    j["regime"] = speeds::regime_name(theory.regime);
    j["theta"] = theta;
    j["fit"] = io::fit_json(fit);
    j["domain_exhausted"] = traj.domain_exhausted;
    j["clipped_mass"] = traj.clipped_mass;
    std::cout << j.dump(2) << "\n";
    io::write_text(out_path(cfg, "summary.json"), j.dump(2) + "\n");
    return 0;
}

int cmd_sweep(const CommonArgs& a) {
    const RunConfig cfg = make_config(a);
    const Field f0 =
        pde::initial_bump(cfg.grid, cfg.initial.center, cfg.initial.halfwidth,
                          cfg.initial.height);
    const auto rows = pde::sweep_chet(
        cfg.parameters, cfg.sweep.chet_values, cfg.time, f0,
        [&](const Parameters& p) {
            RunConfig c2 = cfg;
            c2.parameters = p;
            return c2.make_chi();
        },
        cfg.tracking.theta_levels.front(), cfg.tracking.fit_window_frac, a.jobs);
    io::write_sweep_csv(out_path(cfg, "sweep.csv"), rows);
    if (cfg.output.emit_svg) io::write_sweep_svg(out_path(cfg, "sweep.svg"), rows);

    int n_ok = 0;
    for (const auto& r : rows) {
        if (r.ok)
            ++n_ok;
        else
            std::cerr << "c_het=" << io::fmt9(r.c_het) << " failed: " << r.message << "\n";
    }
    std::cout << "sweep: " << n_ok << "/" << rows.size() << " rows succeeded\n";
    return (rows.empty() || n_ok > 0) ? 0 : 1;
}

int cmd_wave(const CommonArgs& a) {
    const RunConfig cfg = make_config(a);
    const ChiProfile chi = cfg.make_chi();
    waves::RelaxOptions opts;
    opts.t_max = cfg.wave.t_max;
    opts.increment_tol = cfg.wave.increment_tol;
    const auto wave = waves::relax_to_wave(cfg.parameters, chi, cfg.wave.grid, opts);
    io::write_wave_csv(out_path(cfg, "wave.csv"), wave);
    const auto meta = io::wave_meta_json(wave);
    std::cout << meta.dump(2) << "\n";
    io::write_text(out_path(cfg, "wave_meta.json"), meta.dump(2) + "\n");
    return wave.converged ? 0 : 1;
}

int cmd_eigen(const CommonArgs& a) {
    const RunConfig cfg = make_config(a);
    const ChiProfile chi = cfg.make_chi();
    const auto result =
        eig::generalized_eig(cfg.parameters, chi, cfg.eigen.r_list, cfg.eigen.tol);
    io::write_eigen_csv(out_path(cfg, "eigen.csv"), result);
    nlohmann::ordered_json j;
    j["r_values"] = result.r_values;
    j["mu_d"] = result.mu_d;
    j["mu_star_estimate"] = result.mu_star_estimate;
    j["converged"] = result.converged;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_verify(const CommonArgs& a) {
    const RunConfig cfg = make_config(a);
    const Parameters& p = cfg.parameters;
    const ChiProfile chi = cfg.make_chi();

    verify::CheckOptions opts;
    opts.t_hi = cfg.verify.t_hi;
    opts.nt = cfg.verify.nt;
    opts.nx_samples = cfg.verify.nx_samples;

    const double cm = speeds::c_minus(p);
    const double cp = speeds::c_plus(p);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<verify::ComparisonFunction> fns;
    fns.push_back(verify::build_general_super(p, 1.0));
    {
        const double c = 0.8 * cm;
        const double delta = std::min(0.05 * p.alpha,
                                      0.9 * (p.alpha - c * c / (4.0 * p.d_minus)));
        verify::ComparisonFunction probe = verify::build_general_sub(
            p, c, delta, 1e-12); // resolve eps0, then rebuild at half of it
        const double eps = 0.5 * probe.constants.at("eps0");
        fns.push_back(verify::build_general_sub(p, c, delta, eps));
    }

    if (p.case_tag == CaseTag::CaseI_decreasing) {
        if (p.c_het < cm)
            fns.push_back(verify::build_case1_super_slow(p, chi, 0.05, nan));
        if (p.c_het > 0.0) {
            const double c = 0.95 * std::min(cp, p.c_het);
            const double eps = std::min(1e-3, 0.45 * verify::bump_max_eps(p, c));
            fns.push_back(verify::build_case1_sub_bump(p, chi, c, eps, nan));
        }
        if (p.c_het > cm && p.c_het <= cp)
            fns.push_back(verify::build_case1_super_locked(p, chi, nan));
    } else {
        const double ci = speeds::c_intersection(p);
        if (p.c_het > cp && p.c_het < ci) {
            const double cu = speeds::anomalous_speed(p);
            const double c_sup = std::min(cu + 0.05, 0.5 * (cu + p.c_het));
            fns.push_back(verify::build_case2_super_anomalous(p, chi, c_sup, nan, 1.0));
            const double c_pull = 0.5 * (cm + cu);
            fns.push_back(verify::build_case2_sub_pull(p, chi, c_pull, 0.05, nan));
            const double c_full = cm + 0.78 * (cu - cm);
            const double eps_full = 0.02;
            const Grid1D phi_grid{-40.0, 40.0, 1601};
            const auto phi = waves::phi_shoot(p, chi, eps_full,
                                              waves::phi_default_x_start(chi), phi_grid);
            io::write_phi_csv(out_path(cfg, "phi.csv"), phi);
            io::write_text(out_path(cfg, "phi_meta.json"),
                           io::phi_meta_json(phi).dump(2) + "\n");
            fns.push_back(verify::build_case2_sub_full(p, chi, c_full, eps_full, nan, phi));
        }
        if (p.c_het >= ci)
            fns.push_back(verify::build_case2_super_fast(p, chi, nan));
        if (p.c_het < cp) {
            const double c = p.c_het + 0.8 * (cp - p.c_het);
            const double eps = std::min(1e-3, 0.45 * verify::bump_max_eps(p, c));
            fns.push_back(verify::build_case2_sub_cplus(p, chi, c, eps, nan));
        }
    }

    nlohmann::ordered_json j;
    bool all_pass = true;
    for (const auto& fn : fns) {
        verify::CheckOptions o = opts;
        if (fn.name == "case2_sub_full") o.tol = 1e-10; // tabulated phi
        const auto rep = verify::check(fn, p, chi, o);
        all_pass = all_pass && rep.pass;
        nlohmann::ordered_json e = io::sign_report_json(rep);
        e["tolerance"] = o.tol;
        e["constants"] = fn.constants;
        j[fn.name] = e;
        std::cout << (rep.pass ? "[pass] " : "[FAIL] ") << fn.name
                  << "  worst residual " << io::fmt9(rep.worst_residual) << "\n";
    }
    io::write_text(out_path(cfg, "verify.json"), j.dump(2) + "\n");
    return all_pass ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spreading speeds for the KPP equation with shifting diffusivity"};
    app.require_subcommand(1);

    CommonArgs args;
    int ret = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", args.config_path, "JSON run configuration");
        sub->add_option("--set", args.sets,
                        "Override a config key by dotted path, e.g. parameters.c_het=3");
        sub->add_option("--jobs", args.jobs, "Parallel worker cap for sweeps");
    };

    add_common(app.add_subcommand("speeds", "Closed-form speed report as JSON"));
    add_common(app.add_subcommand("simulate", "Direct simulation with front tracking"));
    add_common(app.add_subcommand("sweep", "Measured vs theoretical speed over c_het"));
    add_common(app.add_subcommand("wave", "Comoving-frame traveling-wave relaxation"));
    add_common(app.add_subcommand("eigen", "Dirichlet principal eigenvalue scan"));
    add_common(app.add_subcommand("verify", "Check all admissible comparison functions"));

    try {
        app.parse(argc, argv);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "speeds") ret = cmd_speeds(args);
        if (sub == "simulate") ret = cmd_simulate(args);
        if (sub == "sweep") ret = cmd_sweep(args);
        if (sub == "wave") ret = cmd_wave(args);
        if (sub == "eigen") ret = cmd_eigen(args);
        if (sub == "verify") ret = cmd_verify(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const kpp::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return ret;
}
