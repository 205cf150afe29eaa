#ifndef KPP_CONFIG_HPP
#define KPP_CONFIG_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "kpp/grid.hpp"
#include "kpp/model.hpp"
#include "kpp/pde.hpp"

namespace kpp {

/// One JSON file drives every subcommand; CLI --set key.path=value overrides
/// individual keys. Unknown keys are rejected.
struct RunConfig {
    Parameters parameters;
    std::string chi_variant = "logistic"; // logistic | step | tabulated
    std::vector<std::pair<double, double>> chi_table;

    Grid1D grid{-100.0, 450.0, 5501};
    pde::SolverConfig time;

    struct Tracking {
        std::vector<double> theta_levels{0.5, 0.01};
        double fit_window_frac = 0.4;
        bool bramson = false;
    } tracking;

    struct Initial {
        double center = 0.0;
        double halfwidth = 5.0;
        double height = 1.0;
    } initial;

    struct Sweep {
        std::vector<double> chet_values;
    } sweep;

    struct EigenBlock {
        std::vector<double> r_list{10.0, 20.0, 40.0, 80.0};
        double tol = 1e-3;
    } eigen;

    struct WaveBlock {
        Grid1D grid{-60.0, 60.0, 2401};
        double t_max = 400.0;
        double increment_tol = 1e-10;
    } wave;

    struct VerifyBlock {
        double t_hi = 50.0;
        int nt = 200;
        int nx_samples = 2000;
    } verify;

    struct Output {
        std::string out_dir = ".";
        bool emit_svg = false;
    } output;

    ChiProfile make_chi() const;
    void validate() const;
};

RunConfig config_from_json(nlohmann::json doc,
                           const std::vector<std::string>& set_overrides);
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& set_overrides);

} // namespace kpp

#endif
