#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "macf/frame.hpp"
#include "macf/matrix.hpp"
#include "macf/odekit.hpp"
#include "macf/rng.hpp"
#include "macf/spectra.hpp"

// Check suites behind `macf verify-all`. Every row is self-describing:
// registry id, measured value, threshold, comparison and verdict.

namespace macf {

struct CheckRow {
    std::string id;
    std::string detail;
    double measured;
    double threshold;
    /// "<=" or ">="
    std::string relation;
    bool pass;
};

struct CheckInfo {
    std::string id;
    std::string description;
};

const std::vector<CheckInfo>& check_registry();

/// Haar-like orthogonal matrix (QR of a Gaussian matrix) with det = sign.
SquareMatrix random_orthogonal(Rng& rng, std::size_t n, int sign = 1);
SquareMatrix random_matrix(Rng& rng, std::size_t n);
UnitVector random_unit(Rng& rng, std::size_t n);

struct SampleProblem {
    Profile exact;
    MatrixRhs rhs;
};

/// P = Σ u_E E over the frame bases, u = a + bs + cs′ + de^{−z²/8} with random
/// coefficients, and F = L_{P0}P evaluated analytically.
SampleProblem sample_problem(std::size_t n, Rng& rng, const std::vector<double>& z);

std::vector<CheckRow> algebra_checks(std::size_t n, std::uint64_t seed);
std::vector<CheckRow> orbit_checks(std::size_t n, std::uint64_t seed);
std::vector<CheckRow> odekit_checks(std::size_t n, std::uint64_t seed);
std::vector<CheckRow> cancellation_checks(std::size_t n, std::uint64_t seed);
/// Lemma suite for L1..L5 at one ε.
std::vector<CheckRow> spectra_checks(double eps, std::uint64_t seed);

/// Observed order log2(e_h/e_{h/2}) of the second-difference residual
/// Θ0'' − f(Θ0) on 2001- and 4001-point grids.
double theta0_residual_order(std::size_t n, std::uint64_t seed);

struct Suite {
    std::string name;
    std::vector<CheckRow> rows;
};

struct VerifyAllResult {
    std::size_t n;
    double epsilon;
    std::uint64_t seed;
    std::vector<Suite> suites;

    bool pass() const;
    std::size_t failures() const;
};

/// algebra, orbit, odekit and cancellation at n, spectra at ε. Suites run
/// concurrently and are collected in a fixed order.
VerifyAllResult verify_all(std::size_t n, double eps, std::uint64_t seed);

/// Deterministic JSON (no timings, fixed key order).
std::string to_json(const VerifyAllResult& r);
std::string to_json(const SpectralReport& r);
std::string to_json(const std::vector<CheckRow>& rows);

}  // namespace macf
