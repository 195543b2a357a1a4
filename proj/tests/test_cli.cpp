// End-to-end tests for the cevld command-line tool. The binary under test is
// named by the CEVLD_TOOL environment variable (set by CTest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string tool() {
    const char* t = std::getenv("CEVLD_TOOL");
    REQUIRE_MESSAGE(t != nullptr, "CEVLD_TOOL must point at the cevld binary");
    return t;
}

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

RunResult run(const std::string& args) {
    const std::string cmd = tool() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), pipe) != nullptr) r.output += buf;
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cevld_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

} // namespace

TEST_CASE("constants: values and exit code") {
    const auto r = run("constants --beta 0 --gamma 0.5 --sigma 2 --T 1");
    CHECK(r.exit_code == 0);
    const auto j = json::parse(r.output);
    CHECK(j["c_T"].get<double>() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(j["nu_T"].get<double>() == doctest::Approx(1.2337005501361697).epsilon(1e-13));
    CHECK(j["config"]["sigma"].get<double>() == 2.0);
}

TEST_CASE("validation failures exit with code 2 and name the problem") {
    CHECK(run("constants --gamma 0.3").exit_code == 2);      // gamma outside [1/2, 1)
    CHECK(run("constants --sigma 0").exit_code == 2);        // sigma <= 0
    CHECK(run("simulate --eps 0 --steps 4 --paths 1").exit_code == 2);
    CHECK(run("simulate --no-such-flag 1").exit_code == 2);  // unknown flag
    CHECK(run("minimize --N 10").exit_code == 2);            // N below the floor
    CHECK(run("tails --levels 2 --estimator bogus").exit_code == 2);
    const auto msg = run("constants --gamma 0.3");
    CHECK(msg.output.find("gamma") != std::string::npos);
}

TEST_CASE("unwritable output path fails with code 2") {
    const auto r = run("constants -o /nonexistent-dir/x.json");
    CHECK(r.exit_code == 2);
}

TEST_CASE("artifacts are reproducible bit for bit") {
    TempDir tmp;
    const std::string ens = (tmp.path / "a.csv").string();
    const std::string ens2 = (tmp.path / "b.csv").string();
    const std::string flags =
        "simulate --gamma 0.5 --sigma 2 --alpha 1 --x0 1 --eps 0.5 --steps 64 --paths 16 "
        "--seed 910 --hdot 1 -o ";
    CHECK(run(flags + ens).exit_code == 0);
    CHECK(run(flags + ens2).exit_code == 0);
    CHECK(slurp(ens) == slurp(ens2));
    // the header embeds the full resolved config
    const auto text = slurp(ens);
    CHECK(text.find("# seed=910") != std::string::npos);
    CHECK(text.find("# eps=0.5") != std::string::npos);
    CHECK(text.find("# hdot=1") != std::string::npos);

    const std::string f1 = (tmp.path / "f1.csv").string();
    const std::string f2 = (tmp.path / "f2.csv").string();
    const std::string fig =
        "figure1 --gamma 0.5 --alpha 1 --beta 0 --sigma 2 --hdot 1 --x0 0.01 "
        "--eps 0.4,0.2 --paths 50 --steps 100 --seed 7 -o ";
    CHECK(run(fig + f1).exit_code == 0);
    CHECK(run(fig + f2).exit_code == 0);
    CHECK(slurp(f1) == slurp(f2));
    CHECK(slurp(f1).find("eps,t,mean_path,phi_star") != std::string::npos);
}

TEST_CASE("binary ensembles and CSV ensembles carry the same data") {
    TempDir tmp;
    const std::string base =
        "simulate --gamma 0.5 --sigma 2 --alpha 1 --x0 1 --eps 1 --steps 16 --paths 4 --seed 3 ";
    const std::string csvf = (tmp.path / "e.csv").string();
    const std::string binf = (tmp.path / "e.bin").string();
    CHECK(run(base + "-o " + csvf).exit_code == 0);
    CHECK(run(base + "--format bin -o " + binf).exit_code == 0);
    const auto bin = slurp(binf);
    CHECK(bin.substr(0, 8) == std::string("CEVLDE1\n"));
    // 8 magic + 8 N + 8 n_paths + 8 T + 8 seed + 4*17*8 values + 4*8 weights
    CHECK(bin.size() == 8 + 8 + 8 + 8 + 8 + 4 * 17 * 8 + 4 * 8);
}

TEST_CASE("rate pipeline: minimize writes a path the rate command accepts") {
    TempDir tmp;
    const std::string mcsv = (tmp.path / "min.csv").string();
    const std::string mjson = (tmp.path / "min.json").string();
    CHECK(run("minimize --kind terminal --level 1 --N 400 --beta 0 --sigma 2 "
              "--minimizer-csv " +
              mcsv + " -o " + mjson)
              .exit_code == 0);
    const auto mj = json::parse(slurp(mjson));
    CHECK(mj["converged"].get<bool>());
    CHECK(mj["value"].get<double>() == doctest::Approx(0.5).epsilon(0.01));

    const auto r = run("rate --path " + mcsv + " --gamma 0.5 --sigma 2 --beta 0");
    CHECK(r.exit_code == 0);
    const auto rj = json::parse(r.output);
    CHECK_FALSE(rj["rate_I"]["infinite"].get<bool>());
    CHECK(rj["rate_I"]["value"].get<double>() == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("tails ledger: header once, rows appended in level order") {
    TempDir tmp;
    const std::string ledger = (tmp.path / "tails.csv").string();
    const std::string base = "tails --kind terminal --alpha 1 --sigma 2 --scheme cir-exact "
                             "--steps 64 --paths 5000 --seed 11";
    CHECK(run(base + " --levels 2,3 -o " + ledger).exit_code == 0);
    CHECK(run(base + " --levels 4 -o " + ledger).exit_code == 0);
    std::ifstream in(ledger);
    std::string line;
    int headers = 0, rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind("kind,R,", 0) == 0) ++headers;
        else if (line.rfind("terminal,", 0) == 0) ++rows;
    }
    CHECK(headers == 1);
    CHECK(rows == 3);

    // batch parallel flag produces rows in the same order
    const std::string ledger2 = (tmp.path / "tails2.csv").string();
    CHECK(run(base + " --levels 2,3 --parallel -o " + ledger2).exit_code == 0);
    // identical estimates regardless of batch parallelism
    const auto seq = slurp(ledger);
    const auto par = slurp(ledger2);
    CHECK(par.find(seq.substr(seq.find("terminal,2"),
                              seq.find('\n', seq.find("terminal,2")) -
                                  seq.find("terminal,2"))) != std::string::npos);
}

TEST_CASE("CEVLD_OUTPUT_DIR resolves relative outputs") {
    TempDir tmp;
    const std::string cmd = "CEVLD_OUTPUT_DIR=" + tmp.path.string() + " " + tool() +
                            " constants --beta 1 --sigma 1 -o c.json 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(tmp.path / "c.json"));
}

TEST_CASE("check suite passes and exits 0") {
    const auto r = run("check --suite oracle-consistency");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("[PASS]") != std::string::npos);
    CHECK(r.output.find("[FAIL]") == std::string::npos);
    CHECK(run("check --suite nonsense").exit_code == 2);
}

TEST_CASE("--help enumerates every flag of a subcommand") {
    const auto r = run("simulate --help");
    CHECK(r.exit_code == 0);
    for (const char* flag : {"--gamma", "--sigma", "--beta", "--alpha", "--x0", "--T", "--eps",
                             "--steps", "--paths", "--seed", "--scheme", "--hdot", "--control",
                             "--output", "--format"})
        CHECK(r.output.find(flag) != std::string::npos);
}
