#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "aal/dlm.hpp"
#include "aal/line_model.hpp"
#include "aal/qot.hpp"
#include "aal/scenario.hpp"
#include "aal/waveform.hpp"

namespace aal {

namespace agent {
inline constexpr std::string_view customer_a = "customer-A";
inline constexpr std::string_view customer_b = "customer-B";
inline constexpr std::string_view controller = "carrier-controller";
inline constexpr std::string_view switch_a = "switch-A";
inline constexpr std::string_view switch_b = "switch-B";
inline constexpr std::string_view measurement = "measurement-b";
}  // namespace agent

enum class MessageType {
    path_setup_request,
    catalog_advert,
    common_mode_list,
    switch_command,
    switch_status,
    channel_ready,
    dlm_start,
    dlm_result,
    path_design,
    mode_assignment,
    verification_result,
    error
};
std::string_view to_string(MessageType t);
MessageType message_type_from_string(std::string_view text);

enum class ErrorKind { no_common_mode, no_feasible_mode, dlm_failed };
std::string_view to_string(ErrorKind k);

struct Message {
    MessageType type = MessageType::error;
    std::string sender;
    std::string recipient;
    std::string correlation_id;
    nlohmann::json payload;
};

/// Ordered reliable in-process channel. Every message is logged in send order.
class MessageBus {
public:
    void send(Message m);
    std::optional<Message> receive(std::string_view recipient);
    const std::vector<Message>& transcript() const { return transcript_; }
    std::size_t count(MessageType t) const;

private:
    std::vector<Message> transcript_;
    std::map<std::string, std::deque<Message>, std::less<>> queues_;
};

enum class SwitchPosition { to_measurement, to_carrier_link };
std::string_view to_string(SwitchPosition p);

struct SwitchState {
    SwitchPosition aal_a = SwitchPosition::to_measurement;
    SwitchPosition aal_b = SwitchPosition::to_measurement;
};

class NoCommonModeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DlmFailedError : public std::runtime_error {
public:
    DlmFailedError(const std::string& what, nlohmann::json diagnostics)
        : std::runtime_error(what), diagnostics(std::move(diagnostics)) {}
    nlohmann::json diagnostics;
};

/// Modes of catalog A that B can interoperate with, keyed on (modulation, baud, FEC, bitrate).
/// Throws NoCommonModeError for an empty intersection.
std::vector<TransceiverMode> consistency_check(const ModeCatalog& a, const ModeCatalog& b);

struct AalEstimate {
    Owner aal = Owner::customer_aal_a;
    bool measured = true;  // false: mirrored from the other AAL by declared symmetry
    PowerProfile profile;
    PowerProfile truth;  // simulator ground truth on the same grid, for reports only
    LinkFit fit;
    DlmDiagnostics diagnostics;
    double preprocess_seconds = 0.0;
    double learning_seconds = 0.0;
};

/// Probe waveform and the capture at the measurement receiver for one AAL.
struct AalCapture {
    Owner aal = Owner::customer_aal_a;
    WaveformGrid reference;  // tx reference handed to the estimator (genie or decision-directed)
    WaveformGrid rx;
    double preprocess_seconds = 0.0;
};
AalCapture capture_aal(const Scenario& scenario, Owner aal);
/// Throws DlmFailedError when the estimator or the fit fails.
AalEstimate estimate_aal(const Scenario& scenario, const AalCapture& capture);

/// Probe, capture and estimate every measured AAL; AAL B is mirrored unless measured.
/// Throws DlmFailedError when the estimator or the fit fails.
std::vector<AalEstimate> orchestrate_dlm(const Scenario& scenario);

enum class OutcomeStatus { success, no_common_mode, no_feasible_mode, dlm_failed, verification_failed };
std::string_view to_string(OutcomeStatus s);

struct PhaseTiming {
    std::string phase;
    double seconds = 0.0;
};

struct BerRecord {
    std::string mode;
    double ber = 0.0;
    double threshold = 0.0;
    double gsnr_estimate_db = 0.0;
    bool passed = false;
};

struct ProvisioningOutcome {
    Strategy strategy = Strategy::dlm;
    OutcomeStatus status = OutcomeStatus::success;
    std::string message;
    std::optional<TransceiverMode> selected_mode;
    std::optional<QotReport> qot;
    std::vector<PhaseTiming> phase_timings;
    std::vector<Message> transcript;
    std::vector<AalEstimate> estimates;
    std::vector<BerRecord> measurements;  // verification (dlm) or probes (blackbox)
    std::size_t switch_commands = 0;
};

/// `recorded`: AAL estimates already on record from an earlier run over the same AALs; when given,
/// the probing phase is skipped.
ProvisioningOutcome provision(const Scenario& scenario, std::span<const AalEstimate> recorded = {});
ProvisioningOutcome provision_blackbox(const Scenario& scenario);
/// Dispatch on scenario.strategy.
ProvisioningOutcome run_strategy(const Scenario& scenario);

/// Simulated end-to-end pre-FEC BER of one mode over the true path, ASE and TxOSNR included.
BerRecord measure_end_to_end(const LinkTopology& path, double launch_dbm, const TransceiverMode& mode,
                             const VerificationConfig& config, std::uint64_t seed, const PhysicalConstants& c);

// ---- transcript checks ----

/// Carrier-link parameters or per-element carrier QoT values reaching a customer agent.
std::vector<std::string> scan_information_flow(const Scenario& scenario, const ProvisioningOutcome& outcome);
/// Measurement only while the AAL's switch is at the measurement port; end-to-end traffic only
/// after both switches report the carrier link.
std::vector<std::string> check_switch_safety(const std::vector<Message>& transcript);
/// Every non-error message chains to the request's correlation id.
std::vector<std::string> check_correlation(const std::vector<Message>& transcript);

struct ReplaySummary {
    OutcomeStatus status = OutcomeStatus::success;
    std::optional<std::string> selected_mode;
    std::optional<double> gsnr_db;
    std::optional<double> ber;
};
/// Rebuild the observable outcome from the transcript alone.
ReplaySummary replay_transcript(const std::vector<Message>& transcript);

// ---- reporting ----

std::string timing_table(const ProvisioningOutcome& outcome);
void to_json(nlohmann::json& j, const Message& m);
/// Outcome without the wall-clock phase timings (those go to timing reports).
nlohmann::json outcome_json(const ProvisioningOutcome& outcome);

}  // namespace aal
