#include "kpp/config.hpp"

#include <fstream>
#include <set>

namespace kpp {

namespace {

using nlohmann::json;

void reject_unknown(const json& block, const std::set<std::string>& allowed,
                    const std::string& where) {
    if (!block.is_object())
        throw ValidationError("config: '" + where + "' must be an object");
    for (const auto& item : block.items())
        if (!allowed.count(item.key()))
            throw ValidationError("config: unknown key '" + where + "." + item.key() + "'");
}

template <typename T>
void read(const json& block, const char* key, T& target) {
    if (block.contains(key)) target = block.at(key).get<T>();
}

void apply_override(json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ValidationError("--set expects key.path=value, got '" + spec + "'");
    const std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ValidationError("--set: empty key in '" + spec + "'");
        if (dot == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

} // namespace

ChiProfile RunConfig::make_chi() const {
    if (chi_variant == "logistic") return ChiProfile::logistic(parameters);
    if (chi_variant == "step") return ChiProfile::step(parameters);
    if (chi_variant == "tabulated") return ChiProfile::tabulated(parameters, chi_table);
    throw ValidationError("config: chi variant must be logistic, step or tabulated");
}

void RunConfig::validate() const {
    parameters.validate();
    grid.validate();
    time.validate();
    wave.grid.validate();
    for (double th : tracking.theta_levels)
        if (!(th > 0.0 && th < 1.0))
            throw ValidationError("config: tracking.theta_levels must lie in (0, 1)");
    if (tracking.theta_levels.empty())
        throw ValidationError("config: tracking.theta_levels must be nonempty");
    if (!(tracking.fit_window_frac > 0.0 && tracking.fit_window_frac < 1.0))
        throw ValidationError("config: tracking.fit_window_frac must lie in (0, 1)");
    if (!(initial.height > 0.0 && initial.height <= 1.0))
        throw ValidationError("config: initial.height must lie in (0, 1]");
    if (!(initial.halfwidth > 0.0))
        throw ValidationError("config: initial.halfwidth must be positive");
    if (eigen.r_list.size() < 3)
        throw ValidationError("config: eigen.r_list needs at least 3 radii");
    if (!(eigen.tol > 0.0))
        throw ValidationError("config: eigen.tol must be positive");
    if (verify.nt < 0 || verify.nx_samples < 0)
        throw ValidationError("config: verify sampling counts must be nonnegative");
    make_chi(); // profile-level validation
}

RunConfig config_from_json(json doc, const std::vector<std::string>& set_overrides) {
    if (!doc.is_object()) throw ValidationError("config: top level must be an object");
    for (const auto& s : set_overrides) apply_override(doc, s);

    reject_unknown(doc,
                   {"parameters", "grid", "time", "tracking", "initial", "sweep",
                    "eigen", "wave", "verify", "output"},
                   "<root>");

    RunConfig cfg;

    if (doc.contains("parameters")) {
        const json& b = doc["parameters"];
        reject_unknown(b,
                       {"alpha", "d_minus", "d_plus", "c_het", "case", "chi_lambda",
                        "degenerate_ok", "chi_variant", "chi_table"},
                       "parameters");
        read(b, "alpha", cfg.parameters.alpha);
        read(b, "d_minus", cfg.parameters.d_minus);
        read(b, "d_plus", cfg.parameters.d_plus);
        read(b, "c_het", cfg.parameters.c_het);
        read(b, "chi_lambda", cfg.parameters.chi_steepness);
        read(b, "degenerate_ok", cfg.parameters.degenerate_ok);
        if (b.contains("case")) {
            const std::string c = b.at("case").get<std::string>();
            if (c == "I")
                cfg.parameters.case_tag = CaseTag::CaseI_decreasing;
            else if (c == "II")
                cfg.parameters.case_tag = CaseTag::CaseII_increasing;
            else
                throw ValidationError("config: parameters.case must be \"I\" or \"II\"");
        }
        read(b, "chi_variant", cfg.chi_variant);
        if (b.contains("chi_table")) {
            for (const auto& row : b.at("chi_table")) {
                if (!row.is_array() || row.size() != 2)
                    throw ValidationError("config: chi_table rows are [x, chi] pairs");
                cfg.chi_table.emplace_back(row[0].get<double>(), row[1].get<double>());
            }
        }
    }

    if (doc.contains("grid")) {
        const json& b = doc["grid"];
        reject_unknown(b, {"x_min", "x_max", "nx"}, "grid");
        read(b, "x_min", cfg.grid.x_min);
        read(b, "x_max", cfg.grid.x_max);
        read(b, "nx", cfg.grid.nx);
    }

    if (doc.contains("time")) {
        const json& b = doc["time"];
        reject_unknown(b,
                       {"dt_safety", "t_end", "scheme", "frame", "snapshot_stride",
                        "advection"},
                       "time");
        read(b, "dt_safety", cfg.time.dt_safety);
        read(b, "t_end", cfg.time.t_end);
        read(b, "snapshot_stride", cfg.time.snapshot_stride);
        if (b.contains("scheme")) {
            const std::string s = b.at("scheme").get<std::string>();
            if (s == "explicit_euler")
                cfg.time.scheme = pde::Scheme::ExplicitEuler;
            else if (s == "strang_cn")
                cfg.time.scheme = pde::Scheme::StrangCN;
            else
                throw ValidationError("config: time.scheme must be explicit_euler or strang_cn");
        }
        if (b.contains("frame")) {
            const std::string f = b.at("frame").get<std::string>();
            if (f == "lab")
                cfg.time.frame = pde::Frame::Lab;
            else if (f == "comoving")
                cfg.time.frame = pde::Frame::Comoving;
            else
                throw ValidationError("config: time.frame must be lab or comoving");
        }
        if (b.contains("advection")) {
            const std::string a = b.at("advection").get<std::string>();
            if (a == "upwind")
                cfg.time.advection = kernels::Advection::Upwind;
            else if (a == "centered")
                cfg.time.advection = kernels::Advection::Centered;
            else
                throw ValidationError("config: time.advection must be upwind or centered");
        }
    }

    if (doc.contains("tracking")) {
        const json& b = doc["tracking"];
        reject_unknown(b, {"theta_levels", "fit_window_frac", "bramson"}, "tracking");
        read(b, "theta_levels", cfg.tracking.theta_levels);
        read(b, "fit_window_frac", cfg.tracking.fit_window_frac);
        read(b, "bramson", cfg.tracking.bramson);
    }

    if (doc.contains("initial")) {
        const json& b = doc["initial"];
        reject_unknown(b, {"center", "halfwidth", "height"}, "initial");
        read(b, "center", cfg.initial.center);
        read(b, "halfwidth", cfg.initial.halfwidth);
        read(b, "height", cfg.initial.height);
    }

    if (doc.contains("sweep")) {
        const json& b = doc["sweep"];
        reject_unknown(b, {"chet_values"}, "sweep");
        read(b, "chet_values", cfg.sweep.chet_values);
    }

    if (doc.contains("eigen")) {
        const json& b = doc["eigen"];
        reject_unknown(b, {"r_list", "tol"}, "eigen");
        read(b, "r_list", cfg.eigen.r_list);
        read(b, "tol", cfg.eigen.tol);
    }

    if (doc.contains("wave")) {
        const json& b = doc["wave"];
        reject_unknown(b, {"x_min", "x_max", "nx", "t_max", "increment_tol"}, "wave");
        read(b, "x_min", cfg.wave.grid.x_min);
        read(b, "x_max", cfg.wave.grid.x_max);
        read(b, "nx", cfg.wave.grid.nx);
        read(b, "t_max", cfg.wave.t_max);
        read(b, "increment_tol", cfg.wave.increment_tol);
    }

    if (doc.contains("verify")) {
        const json& b = doc["verify"];
        reject_unknown(b, {"t_hi", "nt", "nx_samples"}, "verify");
        read(b, "t_hi", cfg.verify.t_hi);
        read(b, "nt", cfg.verify.nt);
        read(b, "nx_samples", cfg.verify.nx_samples);
    }

    if (doc.contains("output")) {
        const json& b = doc["output"];
        reject_unknown(b, {"out_dir", "emit_svg"}, "output");
        read(b, "out_dir", cfg.output.out_dir);
        read(b, "emit_svg", cfg.output.emit_svg);
    }

    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& set_overrides) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        throw ValidationError("config: '" + path + "' is not valid JSON");
    return config_from_json(std::move(doc), set_overrides);
}

} // namespace kpp
