#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

const char* cli_path() {
    const char* p = std::getenv("IGP_CLI_PATH");
    REQUIRE_MESSAGE(p != nullptr, "IGP_CLI_PATH must point at the command-line binary");
    return p;
}

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " 2>&1";
    RunResult r;
    std::FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char ch : text)
        if (ch == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("usage handling") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("--help").output.find("simulate") != std::string::npos);
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("simulate --set nope=1").exit_code == 1);
}

TEST_CASE("simulate writes a trajectory and its manifest") {
    const fs::path dir = fresh_dir("igp_cli_sim");
    const auto r = run_cli("simulate --out " + dir.string() +
                           " --set t_end=5 --set sample_interval=0.5");
    CHECK(r.exit_code == 0);

    const std::string csv = slurp(dir / "trajectory.csv");
    CHECK(csv.rfind("t,x,y,z\n", 0) == 0);
    CHECK(line_count(csv) == 12);  // header + 11 samples
    CHECK(csv.find("\n5,") != std::string::npos);  // exact endpoint row

    const std::string manifest = slurp(dir / "simulate_manifest.txt");
    CHECK(manifest.find("command = simulate") != std::string::npos);
    CHECK(manifest.find("t_end = 5") != std::string::npos);
    CHECK(manifest.find("b1 = 5") != std::string::npos);
}

TEST_CASE("simulate rejects a zero time span as a usage error") {
    const fs::path dir = fresh_dir("igp_cli_sim0");
    const auto r = run_cli("simulate --out " + dir.string() + " --set t_end=0");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("t_end") != std::string::npos);
}

TEST_CASE("an exhausted step budget is a numerical failure") {
    const fs::path dir = fresh_dir("igp_cli_budget");
    const auto r = run_cli("simulate --out " + dir.string() +
                           " --set c=0 --set t_end=1000 --set max_steps=50");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("step budget") != std::string::npos);
}

TEST_CASE("equilibria reports all five points") {
    const fs::path dir = fresh_dir("igp_cli_eq");
    const auto r = run_cli("equilibria --out " + dir.string());
    CHECK(r.exit_code == 0);

    const std::string txt = slurp(dir / "equilibria.txt");
    for (const char* name : {"E0", "E1", "E2", "E3", "E4"})
        CHECK(txt.find(name) != std::string::npos);
    CHECK(txt.find("sigma1") != std::string::npos);
    CHECK(txt.find("(degenerate)") != std::string::npos);  // E2 collapses onto E1 here

    const std::string csv = slurp(dir / "equilibria.csv");
    CHECK(csv.rfind("kind,x,y,z,feasible,stability", 0) == 0);
    CHECK(line_count(csv) == 6);

    const std::string manifest = slurp(dir / "equilibria_manifest.txt");
    CHECK(manifest.find("found = yes") != std::string::npos);
    CHECK(manifest.find("sigma1 = 2.4371785") != std::string::npos);
}

TEST_CASE("equilibria degrades gracefully when no coexistence point exists") {
    const fs::path dir = fresh_dir("igp_cli_eq_none");
    const auto r = run_cli("equilibria --out " + dir.string() + " --set a31=0 --set a32=0");
    CHECK(r.exit_code == 0);
    CHECK(slurp(dir / "equilibria.txt").find("not found") != std::string::npos);
    CHECK(slurp(dir / "equilibria_manifest.txt").find("found = no") != std::string::npos);
}

TEST_CASE("the chaos certificate flips between the switching regimes") {
    const fs::path chaotic_dir = fresh_dir("igp_cli_sil0");
    const auto r0 = run_cli("silnikov --out " + chaotic_dir.string() + " --set c=0");
    CHECK(r0.exit_code == 0);
    const std::string report = slurp(chaotic_dir / "silnikov.txt");
    CHECK(report.find("verdict           : chaotic") != std::string::npos);
    CHECK(slurp(chaotic_dir / "silnikov_manifest.txt").find("delta = 76.97") !=
          std::string::npos);

    const fs::path stable_dir = fresh_dir("igp_cli_sil1");
    const auto r1 = run_cli("silnikov --out " + stable_dir.string());
    CHECK(r1.exit_code == 0);
    CHECK(slurp(stable_dir / "silnikov.txt").find("verdict           : non-chaotic") !=
          std::string::npos);

    const fs::path none_dir = fresh_dir("igp_cli_silnone");
    const auto rn = run_cli("silnikov --out " + none_dir.string() +
                            " --set a31=0 --set a32=0");
    CHECK(rn.exit_code == 0);
    CHECK(slurp(none_dir / "silnikov.txt").find("no coexistence equilibrium") !=
          std::string::npos);
}

TEST_CASE("sweep output is byte-identical across worker counts") {
    const std::string spec =
        " --set from=0.9 --set to=1 --set step=0.05 --set transient=20 --set sample=20"
        " --set refine=false";
    const fs::path d1 = fresh_dir("igp_cli_sweep1");
    const fs::path d2 = fresh_dir("igp_cli_sweep2");
    const auto r1 = run_cli("sweep --jobs 1 --out " + d1.string() + spec);
    const auto r2 = run_cli("sweep --jobs 3 --out " + d2.string() + spec);
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);

    const std::string summary = slurp(d1 / "sweep_summary.csv");
    CHECK(summary.rfind("param,value,lle,verdict", 0) == 0);
    CHECK(line_count(summary) == 4);  // header + c = 0.9, 0.95, 1.0
    CHECK(summary == slurp(d2 / "sweep_summary.csv"));
    CHECK(slurp(d1 / "sweep_extrema.csv") == slurp(d2 / "sweep_extrema.csv"));

    CHECK(slurp(d1 / "sweep_manifest.txt").find("jobs = 1") != std::string::npos);
    CHECK(slurp(d2 / "sweep_manifest.txt").find("jobs = 3") != std::string::npos);
}

TEST_CASE("sweep validates its parameter name") {
    const fs::path dir = fresh_dir("igp_cli_sweep_bad");
    const auto r = run_cli("sweep --out " + dir.string() + " --set parameter=qq");
    CHECK(r.exit_code == 1);
}

TEST_CASE("lyapunov command reports the exponent") {
    const fs::path dir = fresh_dir("igp_cli_lyap");
    const auto r = run_cli("lyapunov --out " + dir.string() + " --set total_time=50");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("lle = ") != std::string::npos);
    CHECK(slurp(dir / "lyapunov.txt").find("largest lyapunov exponent = -0.") !=
          std::string::npos);
    CHECK(slurp(dir / "lyapunov_manifest.txt").find("total_time = 50") != std::string::npos);
}

TEST_CASE("config files feed every command") {
    const fs::path dir = fresh_dir("igp_cli_cfg");
    const fs::path cfg = dir / "run.ini";
    {
        std::ofstream out(cfg);
        out << "[model]\nc = 0\n";
    }
    const auto r = run_cli("silnikov --config " + cfg.string() + " --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(slurp(dir / "silnikov.txt").find("verdict           : chaotic") != std::string::npos);
    CHECK(slurp(dir / "silnikov_manifest.txt").find("config_file = ") != std::string::npos);

    // an override applied on top of the file wins
    const auto r2 = run_cli("silnikov --config " + cfg.string() + " --set c=1 --out " +
                            dir.string());
    CHECK(r2.exit_code == 0);
    CHECK(slurp(dir / "silnikov.txt").find("non-chaotic") != std::string::npos);
}

TEST_CASE("config file mistakes are reported with their location") {
    const fs::path dir = fresh_dir("igp_cli_cfg_bad");
    const fs::path cfg = dir / "bad.ini";
    {
        std::ofstream out(cfg);
        out << "[model]\nbogus = 1\n";
    }
    const auto r = run_cli("simulate --config " + cfg.string() + " --out " + dir.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("bad.ini:2") != std::string::npos);
}
