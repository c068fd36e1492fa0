#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aal/line_model.hpp"
#include "aal/modulation.hpp"
#include "aal/units.hpp"

namespace aal {

struct TransceiverMode {
    std::string name;
    double bitrate_gbps = 100.0;
    Modulation modulation = Modulation::dp_qpsk;
    double baud_gbd = 32.0;
    std::string fec = "oFEC";
    double prefec_ber_threshold = 2e-2;
    double tx_osnr_db = kInfinity;
    double min_launch_dbm = -10.0;
    double max_launch_dbm = 5.0;
    double rolloff = 0.1;

    /// Bit rate per occupied optical bandwidth [b/s/Hz].
    double spectral_efficiency() const { return bitrate_gbps / (baud_gbd * (1.0 + rolloff)); }
    void validate() const;
    bool operator==(const TransceiverMode&) const = default;
};

class EmptyCatalogError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NoFeasibleModeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- ASE ----

struct AseSpan {
    double launch_dbm = 0.0;
    double span_loss_db = 16.0;
    double noise_figure_db = 5.0;
};

/// Per span: P_launch + 10 log10(1 mW / (h nu B_ref)) - NF - L_span, gains compensating losses.
double span_osnr_ase(const AseSpan& span, const PhysicalConstants& c);
/// Inverse-linear sum over spans. Throws PreconditionError on an empty list.
double osnr_ase(std::span<const AseSpan> spans, const PhysicalConstants& c);

/// Single amplifier with explicit input power: P_in + 10 log10(1 mW / (h nu B_ref)) - NF.
double amplifier_osnr_ase(double input_power_dbm, double noise_figure_db, const PhysicalConstants& c);

// ---- NLI (single-channel incoherent GN model) ----

struct NliSpan {
    double launch_dbm = 0.0;
    double length_km = 80.0;
    double loss_db_per_km = 0.2;
    double dispersion_ps_nm_km = 17.0;
    double gamma_per_w_km = 1.3;
};

/// Inverse tangent integral Ti2(x) = int_0^x atan(t)/t dt.
double inverse_tangent_integral(double x);

/// NLI power spectral density at the channel centre [W/THz] for one span, from the closed form
/// documented in docs/gn_closed_form.md. Throws PreconditionError for zero dispersion.
double gn_nli_psd(const NliSpan& span, double baud_gbd, double wavelength_nm);

/// OSNR_nli of one span in B_ref; +infinity when gamma is zero.
double span_osnr_nli(const NliSpan& span, double baud_gbd, const PhysicalConstants& c);
/// Incoherent sum over spans.
double osnr_nli(std::span<const NliSpan> spans, double baud_gbd, const PhysicalConstants& c);

// ---- combination ----

/// 1/GSNR = 1/OSNR_ase + 1/OSNR_nli + 1/TxOSNR, linear domain; +infinity allowed.
double gsnr(double osnr_ase_db, double osnr_nli_db, double tx_osnr_db);
/// Inverse-linear sum of any number of dB contributions.
double inverse_sum_db(std::span<const double> contributions_db);

/// GSNR in B_ref at which the mode's analytic back-to-back BER equals its pre-FEC threshold.
double required_gsnr(const TransceiverMode& mode, const PhysicalConstants& c);
/// OSNR in B_ref at which the analytic AWGN BER of `m` at `baud_gbd` equals `ber`.
double osnr_for_ber(Modulation m, double ber, double baud_gbd, const PhysicalConstants& c);
double snr_to_osnr_db(double snr_db, double baud_gbd, const PhysicalConstants& c);
double osnr_to_snr_db(double osnr_db, double baud_gbd, const PhysicalConstants& c);

struct ModeEvaluation {
    TransceiverMode mode;
    double osnr_nli_db = kInfinity;
    double gsnr_db = 0.0;
    double required_gsnr_db = 0.0;
    double margin_db = 0.0;  // gsnr - required - design margin
    bool feasible = false;
};

/// Best feasible mode by spectral efficiency; ties go to higher bitrate, then name order.
/// Throws EmptyCatalogError for no candidates and NoFeasibleModeError when none qualifies.
const TransceiverMode& select_mode(std::span<const ModeEvaluation> candidates);

struct ElementQot {
    std::string id;
    double osnr_ase_db = kInfinity;
    double osnr_nli_db = kInfinity;
};

struct QotReport {
    std::vector<ElementQot> per_element;
    double osnr_ase_db = kInfinity;
    double osnr_nli_db = kInfinity;
    double gsnr_db = kInfinity;
    std::vector<ModeEvaluation> modes;
    std::optional<TransceiverMode> selected_mode;
};

struct QotConfig {
    PhysicalConstants constants;
    double design_margin_db = 1.0;
};

/// Evaluate every candidate mode over a path. Per-element entries and totals refer to the
/// selected mode (or the first candidate when none is feasible).
QotReport design_path(const LinkTopology& path, double launch_dbm,
                      std::span<const TransceiverMode> modes, const QotConfig& config);

// ---- margin analysis ----

struct MarginScenario {
    int min_spans = 1;
    int max_spans = 50;
    double launch_dbm = 0.0;
    double span_loss_db = 16.0;
    double extra_loss_db = 2.0;
    double noise_figure_db = 5.0;
    std::vector<double> tx_osnr_db{kInfinity};
    double baud_gbd = 64.0;
    PhysicalConstants constants;
};

struct MarginPoint {
    int spans = 0;
    double tx_osnr_db = kInfinity;
    double osnr_normal_db = 0.0;
    double osnr_worst_db = 0.0;
    double margin_db = 0.0;
};

/// OSNR degradation at the receiver when every span loses `extra_loss_db` more.
std::vector<MarginPoint> margin_analysis(const MarginScenario& scenario);

}  // namespace aal
