#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace aal {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// In-place complex FFT of a fixed length. Forward is unnormalized; inverse scales by 1/N.
/// Plans are cached per length and shared; execution is reentrant.
class Fft {
public:
    explicit Fft(std::size_t n);

    std::size_t size() const { return n_; }
    void forward(std::span<cplx> data) const;
    void inverse(std::span<cplx> data) const;

    /// Angular frequency [rad/ps] of every FFT bin for a sample rate in GHz.
    static std::vector<double> angular_frequencies(std::size_t n, double sample_rate_ghz);

    struct Plans;  // opaque FFTW plan pair

private:
    std::size_t n_;
    std::shared_ptr<const Plans> plans_;
};

}  // namespace aal
