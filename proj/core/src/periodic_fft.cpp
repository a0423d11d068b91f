#include "macf/periodic_fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "macf/error.hpp"

namespace macf {

namespace {
// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct PeriodicFFT::Impl {
    std::vector<std::size_t> sizes;
    std::size_t real_n = 0;
    std::size_t spec_n = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (real) fftw_free(real);
        if (spec) fftw_free(spec);
    }
};

PeriodicFFT::PeriodicFFT(std::vector<std::size_t> sizes) : impl_(std::make_unique<Impl>()) {
    if (sizes.empty() || sizes.size() > 2) throw DimensionError("PeriodicFFT: 1-D or 2-D grids only");
    for (auto s : sizes)
        if (s < 2) throw DimensionError("PeriodicFFT: each axis needs at least 2 points");
    auto& im = *impl_;
    im.sizes = sizes;
    im.real_n = 1;
    for (auto s : sizes) im.real_n *= s;
    im.spec_n = im.real_n / sizes.back() * (sizes.back() / 2 + 1);
    std::lock_guard lock(planner_mutex());
    im.real = fftw_alloc_real(im.real_n);
    im.spec = fftw_alloc_complex(im.spec_n);
    std::vector<int> dims(sizes.begin(), sizes.end());
    im.fwd = fftw_plan_dft_r2c(static_cast<int>(dims.size()), dims.data(), im.real, im.spec, FFTW_ESTIMATE);
    im.bwd = fftw_plan_dft_c2r(static_cast<int>(dims.size()), dims.data(), im.spec, im.real, FFTW_ESTIMATE);
    if (!im.fwd || !im.bwd) throw Error("PeriodicFFT: FFTW planning failed");
}

PeriodicFFT::~PeriodicFFT() = default;
PeriodicFFT::PeriodicFFT(PeriodicFFT&&) noexcept = default;
PeriodicFFT& PeriodicFFT::operator=(PeriodicFFT&&) noexcept = default;

std::size_t PeriodicFFT::real_size() const { return impl_->real_n; }
std::size_t PeriodicFFT::spectral_size() const { return impl_->spec_n; }
const std::vector<std::size_t>& PeriodicFFT::sizes() const { return impl_->sizes; }

std::vector<long> PeriodicFFT::wavenumbers(std::size_t c) const {
    const auto& sz = impl_->sizes;
    const std::size_t half = sz.back() / 2 + 1;
    auto wrap = [](std::size_t k, std::size_t n) {
        return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
    };
    if (sz.size() == 1) return {static_cast<long>(c)};
    return {wrap(c / half, sz[0]), static_cast<long>(c % half)};
}

void PeriodicFFT::apply_multiplier(std::span<double> data, std::span<const double> symbol) {
    auto& im = *impl_;
    if (data.size() != im.real_n || symbol.size() != im.spec_n)
        throw DimensionError("PeriodicFFT::apply_multiplier: size mismatch");
    std::memcpy(im.real, data.data(), im.real_n * sizeof(double));
    fftw_execute(im.fwd);
    const double scale = 1.0 / static_cast<double>(im.real_n);
    for (std::size_t c = 0; c < im.spec_n; ++c) {
        const double m = symbol[c] * scale;
        im.spec[c][0] *= m;
        im.spec[c][1] *= m;
    }
    fftw_execute(im.bwd);
    std::memcpy(data.data(), im.real, im.real_n * sizeof(double));
}

void PeriodicFFT::forward(std::span<const double> data, std::vector<std::complex<double>>& out) {
    auto& im = *impl_;
    if (data.size() != im.real_n) throw DimensionError("PeriodicFFT::forward: size mismatch");
    std::memcpy(im.real, data.data(), im.real_n * sizeof(double));
    fftw_execute(im.fwd);
    out.resize(im.spec_n);
    for (std::size_t c = 0; c < im.spec_n; ++c) out[c] = {im.spec[c][0], im.spec[c][1]};
}

void PeriodicFFT::backward(const std::vector<std::complex<double>>& in, std::span<double> data) {
    auto& im = *impl_;
    if (in.size() != im.spec_n || data.size() != im.real_n) throw DimensionError("PeriodicFFT::backward: size mismatch");
    for (std::size_t c = 0; c < im.spec_n; ++c) {
        im.spec[c][0] = in[c].real();
        im.spec[c][1] = in[c].imag();
    }
    fftw_execute(im.bwd);
    std::memcpy(data.data(), im.real, im.real_n * sizeof(double));
}

}  // namespace macf
