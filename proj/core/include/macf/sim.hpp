#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "macf/error.hpp"
#include "macf/frame.hpp"
#include "macf/matrix.hpp"

// Time evolution of ∂tA = ΔA − ε⁻²(AAᵀA − A) on a periodic grid, and the
// interface diagnostics of the sharp-interface limit.

namespace macf {

class SimulationError : public Error {
public:
    SimulationError(std::size_t step, const std::string& what)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Periodic grid, m ∈ {1, 2}. Node (ix, iy) sits at (ix·hx, iy·hy); cell
/// index k = iy·Nx + ix.
class PeriodicGrid {
public:
    PeriodicGrid(int m, std::array<std::size_t, 2> sizes, std::array<double, 2> lengths = {1.0, 1.0});

    int m() const { return m_; }
    std::size_t size(int axis) const { return sizes_[static_cast<std::size_t>(axis)]; }
    double length(int axis) const { return lengths_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return lengths_[static_cast<std::size_t>(axis)] / static_cast<double>(size(axis)); }
    double max_spacing() const;
    double cell_volume() const;
    std::size_t cells() const { return cells_; }
    std::size_t index(std::size_t ix, std::size_t iy = 0) const { return iy * sizes_[0] + ix; }
    std::array<double, 2> position(std::size_t k) const;
    /// FFT layout {Ny, Nx} or {Nx}.
    std::vector<std::size_t> fft_sizes() const;

    bool operator==(const PeriodicGrid&) const = default;

private:
    int m_;
    std::array<std::size_t, 2> sizes_;
    std::array<double, 2> lengths_;
    std::size_t cells_;
};

/// Matrix field stored component-major: values[c·cells + k], c = r·n + col.
class MatrixField {
public:
    MatrixField(PeriodicGrid grid, std::size_t n, double time = 0.0);

    const PeriodicGrid& grid() const { return grid_; }
    std::size_t n() const { return n_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    SquareMatrix at(std::size_t k) const;
    void set(std::size_t k, const SquareMatrix& a);
    /// Bilinear periodic interpolation at a physical point.
    SquareMatrix interpolate(std::array<double, 2> x) const;

    std::span<double> component(std::size_t c) { return {values_.data() + c * grid_.cells(), grid_.cells()}; }
    std::span<const double> component(std::size_t c) const {
        return {values_.data() + c * grid_.cells(), grid_.cells()};
    }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool all_finite() const;
    /// Cell-wise determinant.
    std::vector<double> determinants() const;

private:
    PeriodicGrid grid_;
    std::size_t n_;
    double time_;
    std::vector<double> values_;
};

enum class Scheme { semi_implicit, explicit_euler };
enum class InitKind { flat, circle, file };

inline constexpr double kStabilityFactor = 0.1;
inline constexpr double kCollarWidth = 6.0;  // in units of ε
inline constexpr double kProbeDistance = 4.0;  // in units of ε

struct RunConfig {
    double epsilon = 0.03;
    double dt = 0.0;  // 0 → kStabilityFactor·ε²
    double t_end = 0.0;
    Scheme scheme = Scheme::semi_implicit;
    std::size_t n = 2;
    int m = 2;
    std::size_t grid = 256;
    double length = 1.0;
    InitKind init = InitKind::circle;
    double radius = 0.35;
    /// Amplitude a of the bulk phase field α(x, y) = a sin(2πx/L) cos(2πy/L).
    double phase = 0.0;
    /// Extra rotation making (A−, A+) non-minimal (n ≥ 3 only).
    double twist = 0.0;
    /// Seeded uniform perturbation of the initial entries.
    double noise = 0.0;
    std::string init_file;
    std::size_t diag_stride = 10;
    std::string out_dir = "sim_out";
    std::uint64_t seed = 0;

    double time_step() const;
    std::size_t total_steps() const;
    PeriodicGrid make_grid() const;
    /// Throws ConfigError on an inconsistent configuration (stability, resolution, ranges).
    void validate() const;
};

/// Bulk phase A+(x) = exp(α(x) G) with G the rotation generator in the (e1, e2)
/// plane for n = 2 and in the (e2, e3) plane (⊥ the layer direction e1) for n ≥ 3.
SquareMatrix bulk_phase(const RunConfig& cfg, std::array<double, 2> x);
/// Signed distance to the configured interface, positive on the A+ side.
double signed_distance(const RunConfig& cfg, std::array<double, 2> x);

/// A(x) = Θ(d(x)/ε) with Θ the (quasi-)minimal orbit joining A−(x) to A+(x).
MatrixField init_well_prepared(const RunConfig& cfg);

/// Reusable time stepper (holds the FFT plans and the implicit symbol).
class Stepper {
public:
    Stepper(const RunConfig& cfg, const PeriodicGrid& grid);
    ~Stepper();
    Stepper(Stepper&&) noexcept;
    Stepper& operator=(Stepper&&) noexcept;

    /// One step; throws SimulationError on non-finite values.
    void step(MatrixField& field, std::size_t step_index);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

MatrixField step(const MatrixField& field, const RunConfig& cfg);

/// Σ h^m (½ Σ_axes ‖forward difference‖² + ε⁻² F(A)).
double energy(const MatrixField& field, double epsilon);

struct Interface {
    std::vector<std::array<double, 2>> points;
    /// Segment endpoints (pairs of point indices) for m = 2.
    std::vector<std::array<std::size_t, 2>> segments;
    /// Total length (m = 2) or number of crossing points (m = 1).
    double measure = 0.0;
    bool empty = true;
};

struct CircleFit {
    std::array<double, 2> center{};
    double radius = 0.0;
    double rms = 0.0;
};

Interface extract_interface(const MatrixField& field);
/// Algebraic (Kåsa) least-squares circle fit; needs ≥ 3 points.
CircleFit fit_circle(const std::vector<std::array<double, 2>>& points);

struct BulkDefect {
    double plus = 0.0;
    double minus = 0.0;
};

/// max ‖AᵀA − I‖ over cells farther than kCollarWidth·ε from the interface, by det sign.
BulkDefect bulk_defect(const MatrixField& field, const Interface& iface, double epsilon);

/// Frobenius-nearest matrix in O⁺(n) (sign = +1) or O⁻(n) (sign = −1).
SquareMatrix polar_projection(const SquareMatrix& a, int sign);
/// min over unit n of ‖M − (I − 2nnᵀ)‖.
double householder_defect(const SquareMatrix& m);

struct InterfaceResiduals {
    double minimal_pair = 0.0;
    double neumann_jump = 0.0;
    /// |∂να+| + |∂να−| for n = 2, NaN otherwise.
    double angle = 0.0;
    std::size_t samples = 0;
    std::size_t skipped = 0;
};

/// Probes at ±kProbeDistance·ε along the normal at each interface point (averaged).
InterfaceResiduals interface_conditions(const MatrixField& field, const Interface& iface, double epsilon);

struct DiagRecord {
    std::size_t step = 0;
    double time = 0.0;
    double energy = 0.0;
    double interface_measure = 0.0;
    std::size_t interface_points = 0;
    double radius_estimate = 0.0;  // NaN unless a circle run
    double fit_rms = 0.0;
    double bulk_defect_plus = 0.0;
    double bulk_defect_minus = 0.0;
    double minimal_pair_residual = 0.0;
    double neumann_jump_residual = 0.0;
    double angle_residual = 0.0;
    std::size_t skipped_probes = 0;
};

DiagRecord diagnose(const MatrixField& field, const RunConfig& cfg, std::size_t step_index);

struct McfComparison {
    double slope = 0.0;
    double deviation = 0.0;
    std::size_t points = 0;
};

/// Least-squares slope of R² against t over records with R > 4ε; deviation = |slope + 2|/2.
McfComparison mcf_compare(const std::vector<DiagRecord>& records, double epsilon);

struct RunResult {
    std::vector<DiagRecord> records;
    MatrixField field;
    /// max over steps of (E_{k+1} − E_k)/(1 + |E_k|).
    double max_energy_increase;
    std::size_t steps;
};

/// Runs from init_well_prepared(cfg), or from `start` (checkpoint) if given,
/// recording diagnostics at multiples of diag_stride and at the final step.
RunResult run(const RunConfig& cfg, std::optional<MatrixField> start = std::nullopt);

// --- I/O ----------------------------------------------------------------

/// Flat "key = value" text; '#' starts a comment. Unknown keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string format_config(const RunConfig& cfg);

void write_records_csv(const std::string& path, const std::vector<DiagRecord>& records);
std::string records_csv(const std::vector<DiagRecord>& records);

/// "MACF1", then little-endian u32 n, u32 m, u32 sizes[m], f64 time, then the
/// cells in row-major grid order, each matrix row-major, as f64.
void write_snapshot(const std::string& path, const MatrixField& field);
MatrixField read_snapshot(const std::string& path, std::array<double, 2> lengths = {1.0, 1.0});

std::string summary_json(const RunConfig& cfg, const RunResult& result);
/// Polyline SVG of y against x.
std::string svg_plot(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel);

/// Writes records.csv, final.macf, summary.json, energy.svg and (circle runs) radius2.svg to cfg.out_dir.
void write_run_outputs(const RunConfig& cfg, const RunResult& result);

}  // namespace macf
