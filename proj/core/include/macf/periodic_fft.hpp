#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace macf {

/// Real-to-complex FFT on a 1-D or 2-D periodic grid (FFTW, deterministic
/// FFTW_ESTIMATE plans). Used to apply Fourier multipliers to scalar fields.
class PeriodicFFT {
public:
    /// sizes = {N} or {Ny, Nx} (row-major: the last index is contiguous).
    explicit PeriodicFFT(std::vector<std::size_t> sizes);
    ~PeriodicFFT();
    PeriodicFFT(const PeriodicFFT&) = delete;
    PeriodicFFT& operator=(const PeriodicFFT&) = delete;
    PeriodicFFT(PeriodicFFT&&) noexcept;
    PeriodicFFT& operator=(PeriodicFFT&&) noexcept;

    std::size_t real_size() const;
    /// Number of stored half-spectrum coefficients.
    std::size_t spectral_size() const;
    const std::vector<std::size_t>& sizes() const;

    /// Wavenumber indices (signed, |k| ≤ N/2) of half-spectrum coefficient c.
    std::vector<long> wavenumbers(std::size_t c) const;

    /// data ← F⁻¹(symbol · F data); symbol has spectral_size() entries.
    void apply_multiplier(std::span<double> data, std::span<const double> symbol);

    void forward(std::span<const double> data, std::vector<std::complex<double>>& out);
    /// Unnormalized inverse (multiply by 1/real_size() yourself).
    void backward(const std::vector<std::complex<double>>& in, std::span<double> data);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace macf
