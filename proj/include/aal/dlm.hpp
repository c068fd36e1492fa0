#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aal/profile.hpp"
#include "aal/waveform.hpp"

namespace aal {

/// What the estimator assumes about the fiber it looks into.
struct LinkHypothesis {
    double length_km = 100.0;
    double dispersion_ps_nm_km = 17.0;
    double gamma_per_w_km = 1.3;
    double wavelength_nm = 1550.0;
};

enum class TxReference { genie, decision_directed };
/// backward: back-propagate rx and compare with the tx reference.
/// forward: propagate the tx reference and compare with rx.
enum class LearningDirection { backward, forward };

std::string_view to_string(TxReference r);
TxReference tx_reference_from_string(std::string_view text);
std::string_view to_string(LearningDirection d);
LearningDirection learning_direction_from_string(std::string_view text);

struct DlmConfig {
    double step_size_km = 1.0;
    int iterations = 200;
    double learning_rate = 1.0;  // relative step, see DlmEstimator
    double amp_jump_threshold_db = 3.0;
    TxReference tx_reference = TxReference::decision_directed;
    LearningDirection direction = LearningDirection::backward;
    std::optional<double> initial_power_dbm;  // disclosed launch power, else 0 dBm
    double backoff = 0.5;
    double growth = 1.2;
    int patience = 25;
    /// Minimum relative reduction of the linear-only residual for the profile to count as informative.
    double min_signature = 0.2;
    double fit_guard_km = 3.0;

    void validate() const;
};

enum class DlmStatus { converged, no_nonlinear_signature, stalled };
std::string_view to_string(DlmStatus s);

struct DlmDiagnostics {
    DlmStatus status = DlmStatus::converged;
    std::string message;
    std::vector<double> loss_history;  // accepted iterates, starting with the initial loss
    double linear_loss = 0.0;          // residual with all nonlinear weights at zero
    int accepted_steps = 0;
    int rejected_steps = 0;
    std::ptrdiff_t alignment_lag = 0;

    bool ok() const { return status == DlmStatus::converged; }
    double final_loss() const { return loss_history.empty() ? 0.0 : loss_history.back(); }
};

struct DlmEstimate {
    PowerProfile profile;
    std::vector<double> power_w;  // raw learned values, may be non-positive
    DlmDiagnostics diagnostics;
};

/// Split-step model with one learnable power per nonlinear kick. Kicks sit on the uniform grid
/// z_k = k L / K (k = 0..K) with trapezoidal weights; linear steps carry dispersion only.
/// Inputs are normalized to unit mean power internally.
class LearnableSsfm {
public:
    LearnableSsfm(const WaveformGrid& tx_ref, const WaveformGrid& rx, const LinkHypothesis& link,
                  double step_size_km, LearningDirection direction);

    std::size_t parameter_count() const { return positions_.size(); }
    const std::vector<double>& positions_km() const { return positions_; }

    /// Mean squared residual after optimal per-polarization phase alignment.
    double loss(std::span<const double> power_w) const;
    /// Same value, plus dJ/dP (per W) by adjoint recursion through the steps.
    double loss_and_gradient(std::span<const double> power_w, std::span<double> gradient) const;
    /// Model output for the given powers (unit mean power input, same grid as rx).
    WaveformGrid output(std::span<const double> power_w) const;

private:
    using Field = std::array<CVector, kPolarizations>;
    void run(std::span<const double> power_w, Field& u) const;
    void disperse(Field& u, bool inverse) const;
    double phase_coefficient(std::size_t k) const;
    double residual(const Field& u, Field* seed) const;

    LearningDirection direction_;
    Field input_;
    Field target_;
    Fft fft_;
    CVector step_response_;  // dispersion over one step
    std::vector<double> positions_;
    std::vector<double> weights_;
    double gamma_eff_ = 0.0;
    double dispersion_sign_ = 1.0;
    double sample_rate_ghz_ = 0.0;
    double baud_gbd_ = 0.0;
};

/// Align rx to tx_ref in time by cross-correlation after linear dispersion compensation.
/// Returns the circular lag applied to rx.
std::ptrdiff_t align_by_cross_correlation(const WaveformGrid& tx_ref, WaveformGrid& rx,
                                          double accumulated_beta2_ps2);

/// Gradient learning of the power profile from a received waveform and its tx reference.
DlmEstimate estimate_power_profile(const WaveformGrid& tx_ref, const WaveformGrid& rx,
                                   const LinkHypothesis& link, const DlmConfig& config);

/// Re-modulate decided symbols through the Nyquist shaper to rebuild the Tx waveform.
WaveformGrid recover_tx_reference(const SymbolSequence& decided, const PulseShape& shape);

struct FittedSpan {
    double start_km = 0.0;
    double end_km = 0.0;
    double loss_db_per_km = 0.0;
    double input_power_dbm = 0.0;
};

struct FittedAmplifier {
    double position_km = 0.0;
    double gain_db = 0.0;
};

struct LinkFit {
    std::vector<FittedSpan> spans;
    std::vector<FittedAmplifier> amplifiers;
};

struct FitConfig {
    double amp_jump_threshold_db = 3.0;
    double guard_km = 0.0;  // kept clear of each detected rise when fitting the span lines
};

/// Least-squares lines per span between detected amplifier jumps.
/// Throws PreconditionError when no span can be fitted or a jump touches the link boundary.
LinkFit fit_link_parameters(const PowerProfile& profile, const FitConfig& config);

}  // namespace aal
