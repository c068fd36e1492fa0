#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aal/line_model.hpp"
#include "aal/waveform.hpp"

namespace aal {

inline constexpr double kManakovFactor = 8.0 / 9.0;

struct PropagationConfig {
    double step_size_km = 0.1;
    bool include_ase = false;
    double manakov_factor = kManakovFactor;
    std::uint64_t noise_seed = 0;
    /// Single-polarization NLSE test mode: polarization y is ignored and left untouched.
    bool scalar = false;
};

/// Per nonlinear step: position of the step midpoint, mean power there and mean phase rotation.
struct StepTrace {
    double z_km = 0.0;
    double mean_power_w = 0.0;
    double mean_nonlinear_phase_rad = 0.0;
};

/// Symmetric split-step Fourier solution of the Manakov equation through the segments in order.
/// With `launch_power_dbm` set, the input is first rescaled to that power.
WaveformGrid propagate(const WaveformGrid& input, const LinkTopology& segments,
                       std::optional<double> launch_power_dbm, const PropagationConfig& config,
                       std::vector<StepTrace>* trace = nullptr);

/// Remove `accumulated_beta2_ps2` of chromatic dispersion (all-pass, frequency domain).
void compensate_dispersion(WaveformGrid& w, double accumulated_beta2_ps2);

}  // namespace aal
