#ifndef KPP_REPORT_IO_HPP
#define KPP_REPORT_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "kpp/eigenproblem.hpp"
#include "kpp/pde.hpp"
#include "kpp/speeds.hpp"
#include "kpp/verify.hpp"
#include "kpp/waves.hpp"

namespace kpp::io {

/// All floats in emitted files carry 9 significant digits; -inf prints as "-inf".
std::string fmt9(double v);

void write_front_csv(const std::string& path, const pde::Trajectory& traj);
void write_sweep_csv(const std::string& path, const std::vector<pde::SweepRow>& rows);

/// Minimal self-contained scatter (estimates) + polyline (theory) plot.
void write_sweep_svg(const std::string& path, const std::vector<pde::SweepRow>& rows);

void write_eigen_csv(const std::string& path, const eig::EigenResult& result);
void write_wave_csv(const std::string& path, const waves::WaveProfile& wave);
void write_phi_csv(const std::string& path, const waves::PhiSolution& phi);

nlohmann::ordered_json speed_report_json(const speeds::SpeedReport& rep, CaseTag tag);
nlohmann::ordered_json fit_json(const pde::FitDiagnostics& fit);
nlohmann::ordered_json wave_meta_json(const waves::WaveProfile& wave);
nlohmann::ordered_json phi_meta_json(const waves::PhiSolution& phi);
nlohmann::ordered_json sign_report_json(const verify::SignReport& rep);

void write_text(const std::string& path, const std::string& content);

} // namespace kpp::io

#endif
