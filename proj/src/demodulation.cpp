#include "aal/demodulation.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "aal/errors.hpp"
#include "aal/propagation.hpp"
#include "aal/units.hpp"

namespace aal {

namespace {

constexpr int kMaxDecisionIterations = 20;

cplx nearest_point(Modulation m, cplx s) { return constellation(m)[decide(m, s)]; }

// Least-squares complex gain between samples and their decisions, iterated to a fixed point.
bool refine_gain(CVector& r, Modulation m) {
    for (int it = 0; it < kMaxDecisionIterations; ++it) {
        cplx num{};
        double den = 0.0;
        for (const auto& v : r) {
            const cplx d = nearest_point(m, v);
            num += std::conj(d) * v;
            den += std::norm(d);
        }
        const cplx gain = num / den;
        for (auto& v : r) v /= gain;
        if (std::abs(gain - 1.0) < 1e-12) return true;
    }
    return false;
}

}  // namespace

DemodResult demodulate(const WaveformGrid& rx_in, double accumulated_beta2_ps2,
                       Modulation modulation, double rolloff, const SymbolSequence* reference) {
    rx_in.validate();
    const int sps = rx_in.oversampling();
    require(sps >= 2 && rx_in.size() % static_cast<std::size_t>(sps) == 0,
            "waveform length must be a multiple of the oversampling factor");

    WaveformGrid rx = rx_in;
    compensate_dispersion(rx, accumulated_beta2_ps2);

    const std::size_t n = rx.size();
    const std::size_t n_sym = n / static_cast<std::size_t>(sps);
    if (reference) require(reference->size() == n_sym, "reference length mismatch");

    const Fft fft(n);
    const auto h = rrc_response(n, rx.sample_rate_ghz, rx.baud_gbd, rolloff);

    DemodResult out;
    out.decided.modulation = modulation;
    double err_power = 0.0;
    std::size_t evm_count = 0;

    for (int p = 0; p < kPolarizations; ++p) {
        CVector x = rx.pol[p];
        fft.forward(x);
        for (std::size_t k = 0; k < n; ++k) x[k] *= h[k];
        fft.inverse(x);

        CVector r(n_sym);
        for (std::size_t i = 0; i < n_sym; ++i) r[i] = x[i * static_cast<std::size_t>(sps)];
        const double pw =
            std::accumulate(r.begin(), r.end(), 0.0, [](double a, cplx v) { return a + std::norm(v); }) /
            static_cast<double>(n_sym);
        require(pw > 0.0, "received polarization carries no power");
        for (auto& v : r) v /= std::sqrt(pw);

        // Fourth-power estimate: square constellations have E[s^4] real and negative.
        cplx acc{};
        for (const auto& v : r) acc += v * v * v * v;
        const double phase = std::arg(-acc) / 4.0;
        for (auto& v : r) v *= std::polar(1.0, -phase);
        bool converged = refine_gain(r, modulation);
        out.metrics.phase_offset_rad[p] = phase;

        CVector decided(n_sym);
        if (reference) {
            // Pick the quarter turn that best matches the reference.
            int best_k = 0;
            std::size_t best_err = n_sym + 1;
            for (int k = 0; k < 4; ++k) {
                const cplx rot = std::polar(1.0, k * kPi / 2.0);
                std::size_t errs = 0;
                for (std::size_t i = 0; i < n_sym; ++i)
                    errs += decide(modulation, r[i] * rot) != decide(modulation, reference->pol[p][i]);
                if (errs < best_err) {
                    best_err = errs;
                    best_k = k;
                }
            }
            const cplx rot = std::polar(1.0, best_k * kPi / 2.0);
            for (auto& v : r) v *= rot;
            out.metrics.phase_offset_rad[p] -= best_k * kPi / 2.0;
            out.metrics.ambiguity_resolved = true;
        }
        out.metrics.phase_converged = out.metrics.phase_converged && converged;

        for (std::size_t i = 0; i < n_sym; ++i) {
            const auto label = decide(modulation, r[i]);
            decided[i] = constellation(modulation)[label];
            const cplx target = reference ? reference->pol[p][i] : decided[i];
            err_power += std::norm(r[i] - target);
            ++evm_count;
            if (reference) {
                const auto ref_label = decide(modulation, reference->pol[p][i]);
                out.metrics.bit_errors += static_cast<std::size_t>(std::popcount(label ^ ref_label));
            }
        }
        out.metrics.bits += n_sym * static_cast<std::size_t>(bits_per_symbol(modulation));
        out.decided.pol[p] = std::move(decided);
        out.equalized[p] = std::move(r);
    }

    out.metrics.evm = std::sqrt(err_power / static_cast<double>(evm_count));
    if (reference)
        out.metrics.ber =
            static_cast<double>(out.metrics.bit_errors) / static_cast<double>(out.metrics.bits);
    else
        out.metrics.bits = 0;
    return out;
}

}  // namespace aal
