#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(MACF_CLI) + " " + args + " > cli_out.txt 2> cli_err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("version and registry") {
    CHECK(run("--version") == 0);
    CHECK(slurp("cli_out.txt").rfind("macf ", 0) == 0);
    CHECK(run("--list-checks") == 0);
    CHECK(slurp("cli_out.txt").find("orbit.line_energy") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("spectra --eps 0.05") == 2);
    CHECK(run("spectra --op 7 --eps 0.05") == 2);
    CHECK(run("spectra --op 1 --eps 0.05 --bogus") == 2);
    CHECK(run("spectra --op 1 --eps 0.05 --grid 11") == 2);
    CHECK(run("simulate --config does_not_exist.cfg") == 2);
    CHECK(slurp("cli_err.txt").find("does_not_exist.cfg") != std::string::npos);
    std::ofstream("bad.cfg") << "epsilon = 0.03\nwhatever = 1\n";
    CHECK(run("simulate --config bad.cfg") == 2);
}

TEST_CASE("spectra report") {
    fs::remove("r.json");
    CHECK(run("spectra --op 1 --eps 0.05 --report r.json") == 0);
    const auto j = nlohmann::json::parse(slurp("r.json"));
    CHECK(j["eigenvalues"].size() == 6);
    for (const auto& c : j["checks"]) {
        CHECK(c.contains("lemma"));
        CHECK(c.contains("margin"));
        CHECK(c["pass"] == true);
    }
}

TEST_CASE("verify-all") {
    CHECK(run("verify-all --n 3 --eps 0.05 --seed 4 --report va1.json") == 0);
    CHECK(run("verify-all --n 3 --eps 0.05 --seed 4 --report va2.json") == 0);
    CHECK(slurp("va1.json") == slurp("va2.json"));
    const auto j = nlohmann::json::parse(slurp("va1.json"));
    CHECK(j["pass"] == true);
    CHECK(j["seed"] == 4);
}

TEST_CASE("orbit and odekit verbs") {
    CHECK(run("orbit --n 2 --csv orbit.csv") == 0);
    CHECK(slurp("orbit.csv").rfind("z,a00,a01,a10,a11\n", 0) == 0);
    CHECK(run("odekit --n 3 --csv sol.csv --report ode.json") == 0);
    CHECK(slurp("cli_out.txt").find("condition B1") != std::string::npos);
    CHECK(nlohmann::json::parse(slurp("ode.json")).size() == 5);
}

TEST_CASE("simulate") {
    fs::remove_all("sim_flat");
    std::ofstream("flat.cfg") << "epsilon = 0.04\nt_end = 0.002\nn = 2\ngrid = 128\ninit.kind = flat\n"
                                 "diag_stride = 10\nout_dir = sim_flat\n";
    CHECK(run("simulate --config flat.cfg") == 0);
    for (const char* f : {"records.csv", "final.macf", "summary.json", "energy.svg"}) CHECK(fs::exists(fs::path("sim_flat") / f));
}
