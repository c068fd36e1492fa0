#include "aal/modulation.hpp"

#include <array>
#include <cmath>
#include <string>

#include "aal/errors.hpp"

namespace aal {

namespace {

// Gray-coded 4-PAM level for a 2-bit label: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
double pam4_level(std::uint32_t bits) {
    switch (bits & 3u) {
        case 0b00: return -3.0;
        case 0b01: return -1.0;
        case 0b11: return 1.0;
        default: return 3.0;
    }
}

std::uint32_t pam4_label(double x) {
    if (x < -2.0) return 0b00;
    if (x < 0.0) return 0b01;
    if (x < 2.0) return 0b11;
    return 0b10;
}

const std::array<cplx, 4> kQpsk = [] {
    std::array<cplx, 4> pts{};
    const double a = 1.0 / std::sqrt(2.0);
    for (std::uint32_t label = 0; label < 4; ++label)
        pts[label] = {(label & 2u) ? -a : a, (label & 1u) ? -a : a};
    return pts;
}();

const std::array<cplx, 16> kQam16 = [] {
    std::array<cplx, 16> pts{};
    const double scale = 1.0 / std::sqrt(10.0);
    for (std::uint32_t label = 0; label < 16; ++label)
        pts[label] = {pam4_level(label >> 2) * scale, pam4_level(label) * scale};
    return pts;
}();

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

std::string_view to_string(Modulation m) {
    return m == Modulation::dp_qpsk ? "DP-QPSK" : "DP-16QAM";
}

Modulation modulation_from_string(std::string_view text) {
    if (text == "DP-QPSK") return Modulation::dp_qpsk;
    if (text == "DP-16QAM") return Modulation::dp_16qam;
    throw PreconditionError("unsupported modulation: " + std::string(text));
}

int bits_per_symbol(Modulation m) { return m == Modulation::dp_qpsk ? 2 : 4; }

std::span<const cplx> constellation(Modulation m) {
    if (m == Modulation::dp_qpsk) return kQpsk;
    return kQam16;
}

std::uint32_t decide(Modulation m, cplx s) {
    if (m == Modulation::dp_qpsk)
        return (s.real() < 0.0 ? 2u : 0u) | (s.imag() < 0.0 ? 1u : 0u);
    const double k = std::sqrt(10.0);
    return (pam4_label(s.real() * k) << 2) | pam4_label(s.imag() * k);
}

double awgn_ber(Modulation m, double snr) {
    require(snr >= 0.0, "SNR must be non-negative");
    if (m == Modulation::dp_qpsk) return qfunc(std::sqrt(snr));
    // Square 16-QAM with Gray labels, exact per-dimension 4-PAM bit error probabilities.
    const double x = std::sqrt(snr / 5.0);
    return (3.0 * qfunc(x) + 2.0 * qfunc(3.0 * x) - qfunc(5.0 * x)) / 4.0;
}

}  // namespace aal
