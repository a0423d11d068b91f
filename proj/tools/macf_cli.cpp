// macf: command line front end for the orbit, odekit, spectra and sim modules.
//
// Exit codes: 0 all checks pass, 1 check failure (or a failed simulation),
// 2 usage or configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "macf/odekit.hpp"
#include "macf/orbit.hpp"
#include "macf/sim.hpp"
#include "macf/spectra.hpp"
#include "macf/verify.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

void print_rows(const std::vector<macf::CheckRow>& rows) {
    for (const auto& r : rows)
        std::printf("%s  %-44s %12.4e %s %.4e  %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.measured,
                    r.relation.c_str(), r.threshold, r.detail.c_str());
}

bool all_pass(const std::vector<macf::CheckRow>& rows) {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw macf::Error("cannot open " + path + " for writing");
    os << text;
    if (!os) throw macf::Error("write failed: " + path);
}

struct CheckOptions {
    std::size_t n = 3;
    std::uint64_t seed = 0;
    std::string report;
    std::string csv;
};

int run_orbit(const CheckOptions& o) {
    auto rows = macf::algebra_checks(o.n, o.seed);
    auto orbit = macf::orbit_checks(o.n, o.seed);
    rows.insert(rows.end(), orbit.begin(), orbit.end());
    print_rows(rows);
    if (!o.csv.empty()) {
        macf::Rng rng(o.seed);
        const auto pair = macf::MinimalPair::from_plus(macf::random_orthogonal(rng, o.n, 1), macf::random_unit(rng, o.n));
        macf::write_profile_csv(o.csv, macf::theta0_profile(pair, macf::uniform_grid(macf::kDefaultZ, macf::kDefaultZPoints)));
    }
    if (!o.report.empty()) write_file(o.report, macf::to_json(rows));
    return all_pass(rows) ? kPass : kFail;
}

int run_odekit(const CheckOptions& o) {
    macf::Rng rng(o.seed);
    const auto prob = macf::sample_problem(o.n, rng, macf::uniform_grid(macf::kDefaultZ, macf::kDefaultZPoints));
    bool ok = true;
    for (const auto& c : macf::check_conditions(prob.rhs)) {
        std::printf("%s  condition %-4s %12.4e <= %.4e\n", c.pass() ? "PASS" : "FAIL", c.condition.c_str(), c.value,
                    c.tolerance);
        ok = ok && c.pass();
    }
    const auto sol = macf::solve_matrix(prob.rhs);
    std::printf("solve_matrix: residual %.4e, scalar residual %.4e, |Qbar| %.4e\n", sol.residual_norm,
                sol.scalar_residual_norm, sol.q_bar.norm());
    if (!o.csv.empty()) macf::write_profile_csv(o.csv, sol.p);

    auto rows = macf::odekit_checks(o.n, o.seed);
    auto canc = macf::cancellation_checks(o.n, o.seed);
    rows.insert(rows.end(), canc.begin(), canc.end());
    print_rows(rows);
    if (!o.report.empty()) write_file(o.report, macf::to_json(rows));
    return ok && all_pass(rows) ? kPass : kFail;
}

struct SpectraOptions {
    int op = 1;
    double eps = 0.05;
    std::size_t grid = 0;
    std::uint64_t seed = 0;
    std::string report;
};

int run_spectra(const SpectraOptions& o) {
    const auto rep = macf::spectral_report(o.op, o.eps, o.grid, o.seed);
    std::printf("L%d  eps = %g  grid = %zu\n", rep.op, rep.epsilon, rep.grid);
    std::printf("eigenvalues:");
    for (double v : rep.eigenvalues) std::printf(" %.6e", v);
    std::printf("\n");
    for (const auto& c : rep.checks)
        std::printf("%s  %-24s margin %11.4e  constant %11.4e  (%s)\n", c.pass ? "PASS" : "FAIL", c.lemma.c_str(),
                    c.margin, c.constant, c.trial.c_str());
    if (!o.report.empty()) write_file(o.report, macf::to_json(rep));
    return rep.all_pass() ? kPass : kFail;
}

int run_simulate(const std::string& config, const std::string& out_dir) {
    macf::RunConfig cfg = macf::load_config(config);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();
    std::optional<macf::MatrixField> start;
    if (cfg.init == macf::InitKind::file) start = macf::read_snapshot(cfg.init_file, {cfg.length, cfg.length});
    const auto result = macf::run(cfg, std::move(start));
    macf::write_run_outputs(cfg, result);

    const auto& last = result.records.back();
    std::printf("steps %zu  t = %.6g  energy %.8e  interface %.6g\n", result.steps, last.time, last.energy,
                last.interface_measure);
    std::printf("max relative energy increase %.3e\n", result.max_energy_increase);
    if (cfg.init == macf::InitKind::circle) {
        const auto mcf = macf::mcf_compare(result.records, cfg.epsilon);
        std::printf("R^2 slope %.6g  deviation from -2: %.4f  (%zu points)\n", mcf.slope, mcf.deviation, mcf.points);
    }
    std::printf("outputs in %s\n", cfg.out_dir.c_str());
    return result.max_energy_increase <= 1e-8 ? kPass : kFail;
}

int run_verify_all(std::size_t n, double eps, std::uint64_t seed, const std::string& report) {
    const auto res = macf::verify_all(n, eps, seed);
    for (const auto& s : res.suites) {
        std::printf("[%s]\n", s.name.c_str());
        print_rows(s.rows);
    }
    std::printf("%zu failure(s)\n", res.failures());
    if (!report.empty()) write_file(report, macf::to_json(res));
    return res.pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix-valued Allen-Cahn toolkit"};
    app.set_version_flag("--version", std::string("macf ") + MACF_VERSION);
    bool list_checks = false;
    app.add_flag("--list-checks", list_checks, "List the check registry and exit");
    app.require_subcommand(0, 1);

    CheckOptions orbit_opt, odekit_opt;
    auto add_check_options = [](CLI::App* sub, CheckOptions& o, const char* csv_help) {
        sub->add_option("--n", o.n, "Matrix size")->check(CLI::Range(2, 8));
        sub->add_option("--seed", o.seed, "Seed for randomized sweeps");
        sub->add_option("--report", o.report, "Write the check rows as JSON");
        sub->add_option("--csv", o.csv, csv_help);
    };
    auto* orbit = app.add_subcommand("orbit", "Algebra and orbit checks");
    add_check_options(orbit, orbit_opt, "Write a minimal orbit profile as CSV");
    auto* odekit = app.add_subcommand("odekit", "Solvability conditions, matrix solve and cancellation checks");
    add_check_options(odekit, odekit_opt, "Write the solved sample profile as CSV");

    SpectraOptions spec_opt;
    auto* spectra = app.add_subcommand("spectra", "Spectrum and lemma checks for one operator L_i");
    spectra->add_option("--op", spec_opt.op, "Operator index")->required()->check(CLI::Range(1, 5));
    spectra->add_option("--eps", spec_opt.eps, "Epsilon")->required()->check(CLI::PositiveNumber);
    spectra->add_option("--grid", spec_opt.grid, "Grid points on [-1, 1] (0: h = eps/20)");
    spectra->add_option("--seed", spec_opt.seed, "Seed for random trial combinations");
    spectra->add_option("--report", spec_opt.report, "Write the JSON report");

    std::string config, out_dir;
    auto* simulate = app.add_subcommand("simulate", "Run a periodic-grid simulation");
    simulate->add_option("--config", config, "key = value configuration file")->required();
    simulate->add_option("--out-dir", out_dir, "Override out_dir from the config");

    std::size_t va_n = 3;
    double va_eps = 0.05;
    std::uint64_t va_seed = 0;
    std::string va_report;
    auto* verify = app.add_subcommand("verify-all", "Every suite for one n and one epsilon");
    verify->add_option("--n", va_n, "Matrix size")->check(CLI::Range(2, 8));
    verify->add_option("--eps", va_eps, "Epsilon for the spectra suite")->check(CLI::PositiveNumber);
    verify->add_option("--seed", va_seed, "Seed for randomized sweeps");
    verify->add_option("--report", va_report, "Write the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        if (list_checks) {
            for (const auto& c : macf::check_registry()) std::printf("%-40s %s\n", c.id.c_str(), c.description.c_str());
            return kPass;
        }
        if (orbit->parsed()) return run_orbit(orbit_opt);
        if (odekit->parsed()) return run_odekit(odekit_opt);
        if (spectra->parsed()) return run_spectra(spec_opt);
        if (simulate->parsed()) return run_simulate(config, out_dir);
        if (verify->parsed()) return run_verify_all(va_n, va_eps, va_seed, va_report);
        std::cerr << app.help();
        return kUsage;
    } catch (const macf::SimulationError& e) {
        std::cerr << "simulation failed: " << e.what() << "\n";
        return kFail;
    } catch (const macf::ConditionViolation& e) {
        std::cerr << "condition " << e.condition() << " violated: " << e.what() << "\n";
        return kFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}
