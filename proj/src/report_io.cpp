#include "kpp/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace kpp::io {

std::string fmt9(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw NumericsError("cannot open for writing: " + path);
    out << content;
}

void write_front_csv(const std::string& path, const pde::Trajectory& traj) {
    std::string s = "t";
    for (double th : traj.theta_levels) s += ",x_front_theta" + fmt9(th);
    s += "\n";
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        s += fmt9(traj.times[j]);
        for (std::size_t k = 0; k < traj.theta_levels.size(); ++k)
            s += "," + fmt9(traj.front_positions[k][j]);
        s += "\n";
    }
    write_text(path, s);
}

void write_sweep_csv(const std::string& path, const std::vector<pde::SweepRow>& rows) {
    std::string s = "c_het,c_theory,c_estimated,rel_err\n";
    for (const auto& r : rows) {
        s += fmt9(r.c_het) + "," + fmt9(r.c_theory) + ",";
        if (r.ok)
            s += fmt9(r.c_est) + "," + fmt9(r.rel_err);
        else
            s += "nan,nan";
        s += "\n";
    }
    write_text(path, s);
}

void write_sweep_svg(const std::string& path, const std::vector<pde::SweepRow>& rows) {
    const double W = 640, H = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    bool first = true;
    for (const auto& r : rows) {
        if (first) {
            x_lo = x_hi = r.c_het;
            y_lo = y_hi = r.c_theory;
            first = false;
        }
        x_lo = std::min(x_lo, r.c_het);
        x_hi = std::max(x_hi, r.c_het);
        y_lo = std::min({y_lo, r.c_theory, r.ok ? r.c_est : r.c_theory});
        y_hi = std::max({y_hi, r.c_theory, r.ok ? r.c_est : r.c_theory});
    }
    if (x_hi == x_lo) x_hi = x_lo + 1;
    const double pad = 0.08 * (y_hi - y_lo == 0 ? 1.0 : y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    auto X = [&](double v) { return ml + (v - x_lo) / (x_hi - x_lo) * (W - ml - mr); };
    auto Y = [&](double v) { return H - mb - (v - y_lo) / (y_hi - y_lo) * (H - mt - mb); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt9(W) + "\" height=\"" +
         fmt9(H) + "\" viewBox=\"0 0 " + fmt9(W) + " " + fmt9(H) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    s += "<line x1=\"" + fmt9(ml) + "\" y1=\"" + fmt9(H - mb) + "\" x2=\"" + fmt9(W - mr) +
         "\" y2=\"" + fmt9(H - mb) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fmt9(ml) + "\" y1=\"" + fmt9(mt) + "\" x2=\"" + fmt9(ml) +
         "\" y2=\"" + fmt9(H - mb) + "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double vx = x_lo + k * (x_hi - x_lo) / 5;
        const double vy = y_lo + k * (y_hi - y_lo) / 5;
        s += "<text x=\"" + fmt9(X(vx)) + "\" y=\"" + fmt9(H - mb + 18) +
             "\" font-size=\"11\" text-anchor=\"middle\">" + fmt9(vx) + "</text>\n";
        s += "<text x=\"" + fmt9(ml - 8) + "\" y=\"" + fmt9(Y(vy) + 4) +
             "\" font-size=\"11\" text-anchor=\"end\">" + fmt9(vy) + "</text>\n";
    }
    s += "<text x=\"" + fmt9((ml + W - mr) / 2) + "\" y=\"" + fmt9(H - 12) +
         "\" font-size=\"13\" text-anchor=\"middle\">c_het</text>\n";
    s += "<text x=\"16\" y=\"" + fmt9((mt + H - mb) / 2) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt9((mt + H - mb) / 2) + ")\">speed</text>\n";
    // theory polyline
    s += "<polyline fill=\"none\" stroke=\"purple\" stroke-width=\"2\" points=\"";
    for (const auto& r : rows) s += fmt9(X(r.c_het)) + "," + fmt9(Y(r.c_theory)) + " ";
    s += "\"/>\n";
    // estimates
    for (const auto& r : rows)
        if (r.ok)
            s += "<circle cx=\"" + fmt9(X(r.c_het)) + "\" cy=\"" + fmt9(Y(r.c_est)) +
                 "\" r=\"4\" fill=\"none\" stroke=\"deeppink\" stroke-width=\"1.5\"/>\n";
    s += "</svg>\n";
    write_text(path, s);
}

void write_eigen_csv(const std::string& path, const eig::EigenResult& result) {
    std::string s = "r,mu_d\n";
    for (std::size_t k = 0; k < result.r_values.size(); ++k)
        s += fmt9(result.r_values[k]) + "," + fmt9(result.mu_d[k]) + "\n";
    s += "#mu_star_estimate," + fmt9(result.mu_star_estimate) + "\n";
    write_text(path, s);
}

void write_wave_csv(const std::string& path, const waves::WaveProfile& wave) {
    std::string s = "x,U\n";
    for (int i = 0; i < wave.grid.nx; ++i)
        s += fmt9(wave.grid.x(i)) + "," + fmt9(wave.U[i]) + "\n";
    write_text(path, s);
}

void write_phi_csv(const std::string& path, const waves::PhiSolution& phi) {
    std::string s = "x,phi\n";
    for (std::size_t i = 0; i < phi.x.size(); ++i)
        s += fmt9(phi.x[i]) + "," + fmt9(phi.phi[i]) + "\n";
    write_text(path, s);
}

namespace {

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

} // namespace

nlohmann::ordered_json speed_report_json(const speeds::SpeedReport& rep, CaseTag tag) {
    nlohmann::ordered_json j;
    j["case"] = case_name(tag);
    j["c_minus"] = rep.c_minus;
    j["c_plus"] = rep.c_plus;
    j["c_int"] = opt_json(rep.c_int);
    j["c_star"] = rep.c_star;
    j["regime"] = speeds::regime_name(rep.regime);
    j["boundary_ambiguity"] = rep.boundary_ambiguity;
    j["lambda_star"] = rep.lambda_star;
    j["lambda_of_cstar"] = opt_json(rep.lambda_of_cstar);
    j["mu_super"] = opt_json(rep.mu_super);
    j["lambda_s"] = opt_json(rep.lambda_s);
    j["lambda_w"] = opt_json(rep.lambda_w);
    return j;
}

nlohmann::ordered_json fit_json(const pde::FitDiagnostics& fit) {
    nlohmann::ordered_json j;
    j["c_est"] = fit.c_est;
    j["intercept"] = fit.intercept;
    j["r2"] = fit.r2;
    j["n_used"] = fit.n_used;
    j["t_lo"] = fit.t_lo;
    j["t_hi"] = fit.t_hi;
    j["bramson"] = fit.bramson;
    if (fit.bramson) j["bramson_k"] = fit.bramson_k;
    return j;
}

nlohmann::ordered_json wave_meta_json(const waves::WaveProfile& wave) {
    nlohmann::ordered_json j;
    j["residual"] = wave.residual;
    j["lambda_fit"] = wave.decay_fit.lambda_fit;
    j["fit_r2"] = wave.decay_fit.r2;
    j["fit_window"] = {wave.decay_fit.window_lo, wave.decay_fit.window_hi};
    j["fit_points"] = wave.decay_fit.n_points;
    j["monotone"] = wave.monotone;
    j["converged"] = wave.converged;
    j["increment"] = wave.increment;
    j["t_elapsed"] = wave.t_elapsed;
    return j;
}

nlohmann::ordered_json phi_meta_json(const waves::PhiSolution& phi) {
    nlohmann::ordered_json j;
    j["x_eps"] = phi.x_eps;
    j["asymptotic_exponent"] = phi.asymptotic_exponent;
    j["eps"] = phi.eps;
    j["x_start"] = phi.x_start;
    return j;
}

nlohmann::ordered_json sign_report_json(const verify::SignReport& rep) {
    nlohmann::ordered_json j;
    j["pass"] = rep.pass;
    j["vacuous"] = rep.vacuous;
    j["worst_residual"] = rep.worst_residual;
    j["worst_point"] = {rep.worst_t, rep.worst_x};
    j["sample_count"] = rep.sample_count;
    j["continuity_worst"] = rep.continuity_worst;
    if (!std::isnan(rep.worst_scaled_residual))
        j["worst_scaled_residual"] = rep.worst_scaled_residual;
    nlohmann::ordered_json jumps = nlohmann::ordered_json::array();
    for (const auto& jc : rep.jump_checks) {
        nlohmann::ordered_json e;
        e["breakpoint"] = jc.breakpoint;
        e["satisfied"] = jc.satisfied;
        e["expected_sign"] = jc.expected_sign;
        e["worst_jump"] = jc.worst_jump;
        jumps.push_back(e);
    }
    j["jump_checks"] = jumps;
    return j;
}

} // namespace kpp::io
