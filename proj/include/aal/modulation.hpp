#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "aal/fft.hpp"

namespace aal {

enum class Modulation { dp_qpsk, dp_16qam };

std::string_view to_string(Modulation m);
Modulation modulation_from_string(std::string_view text);

/// Bits carried by one symbol on one polarization.
int bits_per_symbol(Modulation m);

/// Unit-average-power Gray-mapped constellation; element i carries bit label i.
std::span<const cplx> constellation(Modulation m);

/// Bit label of the nearest constellation point.
std::uint32_t decide(Modulation m, cplx sample);

/// Pre-FEC BER of the constellation on an AWGN channel at symbol SNR Es/N0 (linear).
double awgn_ber(Modulation m, double snr_linear);

}  // namespace aal
