// Acceptance criteria AC1..AC7. One verdict line per criterion, preceded by
// its sub-checks. Tolerances are fixed here; the exit status is the number
// of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "macf/sim.hpp"
#include "macf/spectra.hpp"
#include "macf/verify.hpp"

using namespace macf;

namespace {

constexpr std::uint64_t kSeed = 0;

// AC budgets in seconds
constexpr double kBudgetAlgebra = 10.0;
constexpr double kBudgetOrbit = 30.0;
constexpr double kBudgetOdekit = 60.0;
constexpr double kBudgetCancellation = 30.0;
constexpr double kBudgetSpectra = 300.0;
constexpr double kBudgetSim = 900.0;

constexpr double kLambda2Spread = 1.25;
constexpr double kSlopeTolerance = 0.05;
constexpr double kDriftTolerance = 0.01;
constexpr double kEnergySlack = 1e-8;
constexpr double kBulkDefect = 1e-3;
constexpr double kDecayFactor = 1.5;
constexpr double kStructuralZero = 1e-10;

struct Sub {
    std::string id;
    double measured;
    std::string relation;
    double threshold;
    bool pass;
};

class Criterion {
public:
    explicit Criterion(std::string name, std::string title) : name_(std::move(name)), title_(std::move(title)) {}

    void at_most(const std::string& id, double v, double thr) { add({id, v, "<=", thr, v <= thr}); }
    void at_least(const std::string& id, double v, double thr) { add({id, v, ">=", thr, v >= thr}); }
    void rows(const std::string& prefix, const std::vector<CheckRow>& rs) {
        for (const auto& r : rs) add({prefix + r.id, r.measured, r.relation, r.threshold, r.pass});
    }
    void add(Sub s) {
        std::printf("    %-4s %-58s %12.4e %s %.4e\n", s.pass ? "ok" : "FAIL", s.id.c_str(), s.measured,
                    s.relation.c_str(), s.threshold);
        std::fflush(stdout);
        subs_.push_back(std::move(s));
    }

    bool finish(double seconds, double budget) {
        at_most("runtime [s]", seconds, budget);
        std::size_t failed = 0;
        for (const auto& s : subs_) failed += s.pass ? 0 : 1;
        std::printf("%s %s  %s  (%zu/%zu sub-checks, %.1f s)\n", name_.c_str(), failed ? "FAIL" : "PASS", title_.c_str(),
                    subs_.size() - failed, subs_.size(), seconds);
        std::fflush(stdout);
        return failed == 0;
    }

private:
    std::string name_;
    std::string title_;
    std::vector<Sub> subs_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
bool criterion(const char* name, const char* title, double budget, F body) {
    std::printf("%s  %s\n", name, title);
    Criterion c(name, title);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.add({std::string("exception: ") + e.what(), 1.0, "<=", 0.0, false});
    }
    return c.finish(seconds_since(t0), budget);
}

RunConfig sim_config(double eps, std::size_t grid, std::size_t n, InitKind init, double phase, double t_end,
                     std::size_t stride) {
    RunConfig cfg;
    cfg.epsilon = eps;
    cfg.grid = grid;
    cfg.n = n;
    cfg.init = init;
    cfg.phase = phase;
    cfg.t_end = t_end;
    cfg.diag_stride = stride;
    cfg.seed = kSeed;
    return cfg;
}

double max_bulk(const RunResult& r) {
    double m = 0.0;
    for (const auto& rec : r.records) m = std::max({m, rec.bulk_defect_plus, rec.bulk_defect_minus});
    return m;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

int main() {
    int failed = 0;

    failed += !criterion("AC1", "exact algebra, n = 2, 3, 4", kBudgetAlgebra, [](Criterion& c) {
        for (std::size_t n : {2u, 3u, 4u}) c.rows("n=" + std::to_string(n) + " ", algebra_checks(n, kSeed));
    });

    failed += !criterion("AC2", "minimal and quasi-minimal orbits, n = 2, 3, 4", kBudgetOrbit, [](Criterion& c) {
        for (std::size_t n : {2u, 3u, 4u}) c.rows("n=" + std::to_string(n) + " ", orbit_checks(n, kSeed));
    });

    failed += !criterion("AC3", "one-dimensional solvability", kBudgetOdekit, [](Criterion& c) {
        for (std::size_t n : {2u, 3u}) c.rows("n=" + std::to_string(n) + " ", odekit_checks(n, kSeed));
    });

    failed += !criterion("AC4", "trilinear cancellation and the bilinear identity", kBudgetCancellation, [](Criterion& c) {
        for (std::size_t n : {2u, 3u}) c.rows("n=" + std::to_string(n) + " ", cancellation_checks(n, kSeed));
    });

    failed += !criterion("AC5", "spectral lower bounds, eps = 0.1, 0.05, 0.025, h = eps/20", kBudgetSpectra, [](Criterion& c) {
        std::vector<double> scaled;
        for (double eps : {0.1, 0.05, 0.025}) {
            char tag[32];
            std::snprintf(tag, sizeof tag, "eps=%g ", eps);
            c.rows(tag, spectra_checks(eps, kSeed));
            scaled.push_back(eigen_smallest(IntervalOperator::standard(1, eps), 2).values[1] * eps * eps);
        }
        const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
        c.at_most("lambda2(L1) eps^2 max/min over the sweep", *hi / *lo, kLambda2Spread);
    });

    failed += !criterion("AC6", "simulation, n = 2, m = 2, 256^2, eps = 0.03, semi-implicit, dt = 0.1 eps^2", kBudgetSim,
                         [](Criterion& c) {
        double energy_worst = -1.0;

        const auto circle = run(sim_config(0.03, 256, 2, InitKind::circle, 0.0, 0.055, 36));
        const auto mcf = mcf_compare(circle.records, 0.03);
        c.at_most("circle: |dR^2/dt + 2|/2", mcf.deviation, kSlopeTolerance);
        energy_worst = std::max(energy_worst, circle.max_energy_increase);

        const auto flat = run(sim_config(0.03, 256, 2, InitKind::flat, 0.0, 0.02, 20));
        double drift = 0.0;
        const double l0 = flat.records.front().interface_measure;
        for (const auto& r : flat.records) drift = std::max(drift, std::abs(r.interface_measure - l0) / l0);
        c.at_most("flat: relative interface drift", drift, kDriftTolerance);
        energy_worst = std::max(energy_worst, flat.max_energy_increase);

        c.at_most("bulk defect outside the 6 eps collar (circle)", max_bulk(circle), kBulkDefect);
        c.at_most("bulk defect outside the 6 eps collar (flat)", max_bulk(flat), kBulkDefect);

        // interface conditions: bulk phase modulated with amplitude 0.5, t = 0.01
        auto phase_run = [](double eps, std::size_t grid, std::size_t n) {
            return run(sim_config(eps, grid, n, InitKind::circle, 0.5, 0.01, 1000000)).records.back();
        };
        const auto a2 = phase_run(0.03, 256, 2), b2 = phase_run(0.015, 512, 2);
        c.at_least("n=2 Neumann residual decay, eps 0.03 -> 0.015", a2.neumann_jump_residual / b2.neumann_jump_residual,
                   kDecayFactor);
        c.at_most("n=2 minimal-pair residual (every O-(2) x O+(2) pair is minimal)",
                  std::max(a2.minimal_pair_residual, b2.minimal_pair_residual), kStructuralZero);
        const auto a3 = phase_run(0.03, 256, 3), b3 = phase_run(0.015, 512, 3);
        c.at_least("n=3 minimal-pair residual decay, eps 0.03 -> 0.015", a3.minimal_pair_residual / b3.minimal_pair_residual,
                   kDecayFactor);
        c.at_least("n=3 Neumann residual decay, eps 0.03 -> 0.015", a3.neumann_jump_residual / b3.neumann_jump_residual,
                   kDecayFactor);

        c.at_most("energy: max relative increase per step", energy_worst, kEnergySlack);
    });

    failed += !criterion("AC7", "determinism of verify-all", 120.0, [](Criterion& c) {
        const std::string a = to_json(verify_all(3, 0.05, kSeed));
        const std::string b = to_json(verify_all(3, 0.05, kSeed));
        c.at_most("in-process JSON reports differ", a == b ? 0.0 : 1.0, 0.0);
#ifdef MACF_CLI
        const std::string cmd = std::string(MACF_CLI) + " verify-all --n 3 --eps 0.05 --seed 0 --report ";
        const int r1 = std::system((cmd + "ac7_a.json > /dev/null").c_str());
        const int r2 = std::system((cmd + "ac7_b.json > /dev/null").c_str());
        c.at_most("CLI exit status", (r1 == 0 && r2 == 0) ? 0.0 : 1.0, 0.0);
        const std::string fa = slurp("ac7_a.json"), fb = slurp("ac7_b.json");
        c.at_most("CLI JSON reports differ", (!fa.empty() && fa == fb) ? 0.0 : 1.0, 0.0);
        c.at_most("CLI report differs from the in-process report", fa == a ? 0.0 : 1.0, 0.0);
#endif
    });

    std::printf("%d criterion/criteria failed\n", failed);
    return failed;
}
