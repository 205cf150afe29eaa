#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef KPP_CLI_PATH
#error "KPP_CLI_PATH must point at the kpp-shift binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
    int exit_code;
    std::string out;
};

Run run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out_file = dir / "stdout.txt";
    const std::string cmd = std::string(KPP_CLI_PATH) + " " + args + " > " +
                            out_file.string() + " 2>" + (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream in(out_file);
    r.out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("kpp_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("speeds subcommand emits the full report") {
    const auto dir = fresh_dir("speeds");
    write_file(dir / "cfg.json",
               R"({"parameters": {"case": "II", "c_het": 3.0},
                   "output": {"out_dir": ")" + dir.string() + R"("}})");
    const Run r = run_cli("speeds -c " + (dir / "cfg.json").string(), dir);
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j["c_star"].get<double>() - 1.4449788301796342) < 1e-7);
    CHECK(j["regime"] == "anomalous");
    CHECK(fs::exists(dir / "speeds.json"));

    SUBCASE("locked regime via --set") {
        const Run r2 = run_cli("speeds -c " + (dir / "cfg.json").string() +
                                   " --set parameters.case=\\\"I\\\" --set parameters.c_het=1.5",
                               dir);
        REQUIRE(r2.exit_code == 0);
        const json j2 = json::parse(r2.out);
        CHECK(j2["c_star"] == 1.5);
        CHECK(j2["regime"] == "locked");
    }
}

TEST_CASE("malformed and invalid configs exit with code 2") {
    const auto dir = fresh_dir("badcfg");
    write_file(dir / "broken.json", "{ not json");
    CHECK(run_cli("speeds -c " + (dir / "broken.json").string(), dir).exit_code == 2);

    write_file(dir / "unknown.json", R"({"parameters": {"alpha": 1, "bogus": 2}})");
    CHECK(run_cli("speeds -c " + (dir / "unknown.json").string(), dir).exit_code == 2);

    write_file(dir / "invalid.json", R"({"parameters": {"alpha": -1}})");
    CHECK(run_cli("speeds -c " + (dir / "invalid.json").string(), dir).exit_code == 2);

    CHECK(run_cli("speeds --set parameters.d_minus=2 --set parameters.d_plus=1", dir)
              .exit_code == 2);
}

TEST_CASE("simulate writes front.csv and a summary") {
    const auto dir = fresh_dir("simulate");
    write_file(dir / "cfg.json", R"({
        "parameters": {"case": "I", "c_het": 1.5},
        "grid": {"x_min": -50, "x_max": 150, "nx": 2001},
        "time": {"t_end": 40},
        "output": {"out_dir": ")" + dir.string() + R"("}})");
    const Run r = run_cli("simulate -c " + (dir / "cfg.json").string(), dir);
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["rel_err"].get<double>() < 0.05);
    CHECK_FALSE(j["domain_exhausted"].get<bool>());

    const std::string front = slurp(dir / "front.csv");
    CHECK(front.rfind("t,x_front_theta0.5,x_front_theta0.01", 0) == 0);
    // Every emitted CSV re-parses under the documented header.
    int lines = 0;
    for (char ch : front)
        if (ch == '\n') ++lines;
    CHECK(lines > 10);
    CHECK(fs::exists(dir / "summary.json"));

    SUBCASE("t_end = 0 is rejected as an empty trajectory") {
        CHECK(run_cli("simulate -c " + (dir / "cfg.json").string() +
                          " --set time.t_end=0",
                      dir).exit_code == 2);
    }
}

TEST_CASE("sweep emits ordered rows and optional SVG") {
    const auto dir = fresh_dir("sweep");
    write_file(dir / "cfg.json", R"({
        "parameters": {"case": "I", "c_het": 1.0},
        "grid": {"x_min": -50, "x_max": 120, "nx": 1701},
        "time": {"t_end": 25},
        "sweep": {"chet_values": [0.5, 1.5]},
        "output": {"out_dir": ")" + dir.string() + R"(", "emit_svg": true}})");
    const Run r = run_cli("sweep -c " + (dir / "cfg.json").string(), dir);
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("c_het,c_theory,c_estimated,rel_err", 0) == 0);
    CHECK(csv.find("\n0.5,1,") != std::string::npos);
    CHECK(csv.find("\n1.5,1.5,") != std::string::npos);
    const std::string svg = slurp(dir / "sweep.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("circle") != std::string::npos);

    SUBCASE("deterministic bytes on a rerun") {
        const std::string first = csv;
        run_cli("sweep -c " + (dir / "cfg.json").string(), dir);
        CHECK(slurp(dir / "sweep.csv") == first);
    }
}

TEST_CASE("eigen subcommand writes the radius scan") {
    const auto dir = fresh_dir("eigen");
    write_file(dir / "cfg.json", R"({
        "parameters": {"case": "I", "c_het": 1.5},
        "output": {"out_dir": ")" + dir.string() + R"("}})");
    const Run r = run_cli("eigen -c " + (dir / "cfg.json").string(), dir);
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(dir / "eigen.csv");
    CHECK(csv.rfind("r,mu_d", 0) == 0);
    CHECK(csv.find("#mu_star_estimate,") != std::string::npos);
    const json j = json::parse(r.out);
    const auto mu = j["mu_d"].get<std::vector<double>>();
    REQUIRE(mu.size() == 4);
    for (std::size_t k = 1; k < mu.size(); ++k) CHECK(mu[k] < mu[k - 1]);
    CHECK(j["mu_star_estimate"].get<double>() < 0.0);
}

TEST_CASE("verify subcommand aggregates the admissible builders") {
    const auto dir = fresh_dir("verify");
    write_file(dir / "cfg.json", R"({
        "parameters": {"case": "II", "c_het": 3.0},
        "verify": {"nt": 80, "nx_samples": 800},
        "output": {"out_dir": ")" + dir.string() + R"("}})");
    const Run r = run_cli("verify -c " + (dir / "cfg.json").string(), dir);
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(slurp(dir / "verify.json"));
    for (const char* name : {"general_super", "general_sub", "case2_super_anomalous",
                             "case2_sub_pull", "case2_sub_full"}) {
        REQUIRE(j.contains(name));
        CHECK(j[name]["pass"].get<bool>());
    }
}

TEST_CASE("environment variable overrides the output directory") {
    const auto dir = fresh_dir("envout");
    const auto target = dir / "redirected";
    setenv("KPP_SHIFT_OUT", target.string().c_str(), 1);
    const Run r = run_cli("speeds", dir);
    unsetenv("KPP_SHIFT_OUT");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(target / "speeds.json"));
}
