#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nuclat/hamiltonian.hpp"

// Black-box tests against the installed command-line binary; its path is
// injected by the build system.
#ifndef NUCLAT_CLI_PATH
#error "NUCLAT_CLI_PATH must point at the CLI binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "nuclat_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = scratch_dir() / ("stdout_" + std::to_string(counter) + ".txt");
    const fs::path err = scratch_dir() / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;

    const std::string cmd = std::string(NUCLAT_CLI_PATH) + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

json parse_json(const RunResult& r) {
    REQUIRE_FALSE(r.out.empty());
    return json::parse(r.out);
}

} // namespace

TEST_CASE("cli dims: exact dimensions, closed-form ratio, per-row errors") {
    const RunResult r = run_cli("dims --L 2,3 --sector deuteron");
    REQUIRE(r.exit_code == 0);
    const json j = parse_json(r);
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["L"] == 2);
    CHECK(j["rows"][0]["exact_dim"] == 4);
    CHECK(j["rows"][1]["exact_dim"] == 4);
    CHECK(j["rows"][0]["n_q_jw"] == 32);
    CHECK(j["rows"][0].contains("ratio"));

    // An impossible spin projection becomes a row-level error, not a crash.
    const RunResult bad = run_cli("dims --L 2 --sector 1,0,3");
    CHECK(bad.exit_code == 0);
    const json jb = parse_json(bad);
    CHECK(jb["rows"][0].contains("error"));
}

TEST_CASE("cli qubits: compact register sizes for the three-nucleon channel") {
    const RunResult r = run_cli("qubits --L 2,3,4 --sector triton");
    REQUIRE(r.exit_code == 0);
    const json j = parse_json(r);
    REQUIRE(j["rows"].size() == 3);
    const long long dims[] = {7, 14, 54};
    const int gray[] = {3, 4, 6};
    for (int i = 0; i < 3; ++i) {
        CHECK(j["rows"][i]["dim"] == dims[i]);
        CHECK(j["rows"][i]["n_q_gray"] == gray[i]);
        CHECK(j["rows"][i]["n_q_jw"] == 4 * (i + 2) * (i + 2) * (i + 2));
        CHECK(j["rows"][i]["n_q_jw_site_variant"] == 3 * (i + 2) * (i + 2) * (i + 2));
    }
}

TEST_CASE("cli ed: frozen smallest-volume two-nucleon energy") {
    const RunResult r = run_cli("ed --L 2 --sector deuteron");
    REQUIRE(r.exit_code == 0);
    const json j = parse_json(r);
    CHECK(j["dim"] == 4);
    CHECK(std::abs(j["energy_mev"].get<double>() - (-24.444135)) <= 1e-4);
    CHECK(j["run_config"]["command"] == "ed");
    CHECK(j["run_config"]["sector"]["name"] == "deuteron");
}

TEST_CASE("cli ed: hard errors exit 1") {
    const RunResult r = run_cli("ed --L 9 --sector deuteron");
    CHECK(r.exit_code == 1);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("cli vqe: converged run exits 0 and writes the trace") {
    const fs::path trace = scratch_dir() / "trace_l2.csv";
    const RunResult r =
        run_cli("vqe --L 2 --sector deuteron --restarts 1 --trace " + trace.string());
    REQUIRE(r.exit_code == 0);
    const json j = parse_json(r);
    CHECK(j["converged"] == true);
    CHECK(std::abs(j["residual_mev"].get<double>()) <= 1e-6);
    CHECK(j["n_qubits"] == 2);
    CHECK(j["lambda"].get<double>() > 0.0);

    const std::string csv = slurp(trace);
    CHECK(csv.rfind("t,energy_mev,residual_mev,grad_norm\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 2);
}

TEST_CASE("cli vqe: an inexpressible ansatz exits 2 but still reports") {
    const fs::path trace = scratch_dir() / "trace_l4_flat.csv";
    const RunResult r = run_cli("vqe --L 4 --sector deuteron --layers 0 --restarts 1 "
                                "--adam-iters 50 --lbfgs-iters 50 --trace " +
                                trace.string());
    CHECK(r.exit_code == 2);
    const json j = parse_json(r);
    CHECK(j["converged"] == false);
    CHECK(j["n_layers"] == 0);
    CHECK(fs::exists(trace));
}

TEST_CASE("cli --deterministic: byte-identical repeat runs") {
    const fs::path a = scratch_dir() / "det_a.json";
    const fs::path b = scratch_dir() / "det_b.json";
    const fs::path ta = scratch_dir() / "det_a.csv";
    const fs::path tb = scratch_dir() / "det_b.csv";

    const std::string common = "vqe --L 2 --sector triton --restarts 1 --deterministic";
    const RunResult r1 = run_cli(common + " --out " + a.string() + " --trace " + ta.string());
    const RunResult r2 = run_cli(common + " --out " + b.string() + " --trace " + tb.string());
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(ta) == slurp(tb));

    // With --out the payload goes to the file and stdout carries a summary.
    CHECK(r1.out.find("VQE") != std::string::npos);

    const RunResult e1 = run_cli("ed --L 3 --sector triton --deterministic --out " + a.string());
    const RunResult e2 = run_cli("ed --L 3 --sector triton --deterministic --out " + b.string());
    REQUIRE(e1.exit_code == 0);
    REQUIRE(e2.exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(e1.out.find("E = ") != std::string::npos);
}

TEST_CASE("cli fit: production-volume couplings hit both targets") {
    const RunResult r = run_cli("fit");
    REQUIRE(r.exit_code == 0);
    const json j = parse_json(r);
    CHECK(std::abs(j["deuteron_energy_mev"].get<double>() - (-2.22)) <= 1e-6);
    CHECK(std::abs(j["triton_energy_mev"].get<double>() - (-8.48)) <= 1e-6);
    const double c2 = j["c2_mev"].get<double>();
    const double c3 = j["c3_mev"].get<double>();
    CHECK(c2 > -144.0);
    CHECK(c2 < -142.0);
    CHECK(c3 > 105.0);
    CHECK(c3 < 108.0);
    CHECK(j.contains("default_couplings"));
}

TEST_CASE("cli sweep: ordered CSV rows with energies shrinking toward zero") {
    const RunResult r = run_cli("sweep --nucleus deuteron --L 2,3,4");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "L,energy_mev");

    std::vector<double> energies;
    while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        energies.push_back(std::stod(line.substr(comma + 1)));
    }
    REQUIRE(energies.size() == 3);
    CHECK(energies[0] < energies[1]);
    CHECK(energies[1] < energies[2]);
    CHECK(energies[2] < 0.0);
}

TEST_CASE("cli sweep: gated four-nucleon volumes are skipped, not fatal") {
    const RunResult r = run_cli("sweep --nucleus he4 --L 2,5");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("--large") != std::string::npos);
    std::istringstream lines(r.out);
    std::string line;
    int rows = 0;
    std::getline(lines, line); // header
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 1); // only L=2 survives
}

TEST_CASE("cli jw-check: the occupation-register suite passes") {
    const RunResult r = run_cli("jw-check");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("pass") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("cli --config: file values drive the solve") {
    const fs::path cfg_path = scratch_dir() / "override.cfg";
    std::ofstream(cfg_path) << "# test configuration\nL = 3\nc2_mev = -100.0\n";

    const RunResult r = run_cli("--config " + cfg_path.string() + " ed --sector deuteron");
    REQUIRE(r.exit_code == 0);
    const json j = parse_json(r);
    CHECK(j["run_config"]["L"] == 3);
    CHECK(j["run_config"]["c2_mev"] == doctest::Approx(-100.0));

    nuclat::LatticeConfig cfg;
    cfg.L = 3;
    cfg.c2_mev = -100.0;
    const double expected =
        nuclat::ground_state(nuclat::build_reduced_hamiltonian(cfg, {1, 1, +2})).energy_mev;
    CHECK(j["energy_mev"].get<double>() == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("cli usage errors are nonzero and never exit code 2") {
    CHECK(run_cli("bogus-subcommand").exit_code != 0);
    CHECK(run_cli("bogus-subcommand").exit_code != 2);
    CHECK(run_cli("vqe --L 2 --sector deuteron --optimizer nonsense").exit_code != 0);
}
