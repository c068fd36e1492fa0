#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "aal/waveform.hpp"

namespace aal {

struct DemodMetrics {
    std::optional<double> ber;  // only with a reference
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    double evm = 0.0;  // RMS, relative to unit symbol power
    std::array<double, kPolarizations> phase_offset_rad{};
    bool phase_converged = true;
    bool ambiguity_resolved = false;
};

struct DemodResult {
    SymbolSequence decided;
    std::array<CVector, kPolarizations> equalized;  // one sample per symbol, unit power
    DemodMetrics metrics;
};

/// Coherent receiver chain: dispersion compensation, matched RRC filter, downsampling,
/// blind phase recovery (4th power; decision-directed refinement) and hard decisions.
/// When `reference` is given, the pi/2 ambiguity is resolved against it and BER/EVM are
/// measured against it.
DemodResult demodulate(const WaveformGrid& rx, double accumulated_beta2_ps2, Modulation modulation,
                       double rolloff, const SymbolSequence* reference = nullptr);

}  // namespace aal
