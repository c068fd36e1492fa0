#include "aal/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "aal/errors.hpp"
#include "aal/units.hpp"

namespace aal {

struct Fft::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    ~Plans() {
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
    }
};

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::shared_ptr<const Fft::Plans> plans_for(std::size_t n);

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
    require(n > 0, "FFT length must be positive");
    plans_ = plans_for(n);
}

namespace {

std::shared_ptr<const Fft::Plans> plans_for(std::size_t n) {
    // FFTW planning is not thread-safe; execution with the new-array interface is.
    std::lock_guard lock(planner_mutex());
    static std::map<std::size_t, std::shared_ptr<const Fft::Plans>> cache;
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    auto plans = std::make_shared<Fft::Plans>();
    std::vector<cplx> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->fwd = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, flags);
    plans->inv = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, flags);
    cache.emplace(n, plans);
    return plans;
}

}  // namespace

void Fft::forward(std::span<cplx> data) const {
    require(data.size() == n_, "FFT length mismatch");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_->fwd, buf, buf);
}

void Fft::inverse(std::span<cplx> data) const {
    require(data.size() == n_, "FFT length mismatch");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_->inv, buf, buf);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : data) v *= scale;
}

std::vector<double> Fft::angular_frequencies(std::size_t n, double sample_rate_ghz) {
    std::vector<double> w(n);
    const double df_thz = sample_rate_ghz * 1e-3 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto signed_k = k < (n + 1) / 2 ? static_cast<double>(k)
                                              : static_cast<double>(k) - static_cast<double>(n);
        w[k] = 2.0 * kPi * signed_k * df_thz;
    }
    return w;
}

}  // namespace aal
