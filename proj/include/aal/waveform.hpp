#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>

#include "aal/fft.hpp"
#include "aal/modulation.hpp"

namespace aal {

inline constexpr int kPolarizations = 2;

struct SymbolSequence {
    std::array<CVector, kPolarizations> pol;
    Modulation modulation = Modulation::dp_qpsk;
    std::uint64_t seed = 0;

    std::size_t size() const { return pol[0].size(); }
};

/// Sampled dual-polarization optical field. Samples are in sqrt(W).
struct WaveformGrid {
    std::array<CVector, kPolarizations> pol;
    double sample_rate_ghz = 0.0;
    double baud_gbd = 0.0;
    double center_power_dbm = 0.0;

    std::size_t size() const { return pol[0].size(); }
    int oversampling() const;
    /// Total mean power over both polarizations in W.
    double mean_power_w() const;
    void validate() const;
};

struct PulseShape {
    double rolloff = 0.1;
    int oversampling = 2;
    double baud_gbd = 32.0;
};

/// Root-raised-cosine amplitude response sampled on the FFT grid.
std::vector<double> rrc_response(std::size_t n, double sample_rate_ghz, double baud_gbd,
                                 double rolloff);

/// Random Gray-mapped symbols, identical for identical seeds.
SymbolSequence random_symbols(Modulation m, std::size_t n_symbols, std::uint64_t seed);

/// Nyquist (RRC) pulse shaping of a symbol sequence; the result is normalized to 0 dBm.
WaveformGrid shape_symbols(const SymbolSequence& symbols, const PulseShape& shape);

std::pair<SymbolSequence, WaveformGrid> generate_waveform(Modulation m, std::size_t n_symbols,
                                                          const PulseShape& shape,
                                                          std::uint64_t seed);

/// Rescale the field to the given mean power and record it.
void set_power(WaveformGrid& w, double power_dbm);
double measured_power_dbm(const WaveformGrid& w);

/// Add white circular Gaussian noise across the simulation bandwidth so that the signal OSNR
/// in `ref_bandwidth_ghz` (both polarizations) equals `osnr_db`.
void add_awgn_for_osnr(WaveformGrid& w, double osnr_db, double ref_bandwidth_ghz,
                       std::uint64_t seed);

// Flat binary interchange: "AALWAVE1", u32 version, u32 polarizations, u64 samples,
// f64 sample_rate_ghz, f64 baud_gbd, f64 center_power_dbm, then (re, im) f64 pairs for
// polarization x followed by polarization y. Little-endian.
void write_waveform(const WaveformGrid& w, const std::filesystem::path& path);
WaveformGrid read_waveform(const std::filesystem::path& path);

}  // namespace aal
