#include "aal/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "aal/demodulation.hpp"
#include "aal/errors.hpp"
#include "aal/json_io.hpp"
#include "aal/propagation.hpp"
#include "aal/waveform.hpp"

namespace aal {

using nlohmann::json;

namespace {

constexpr std::pair<MessageType, std::string_view> kTypeNames[] = {
    {MessageType::path_setup_request, "PathSetupRequest"},
    {MessageType::catalog_advert, "CatalogAdvert"},
    {MessageType::common_mode_list, "CommonModeList"},
    {MessageType::switch_command, "SwitchCommand"},
    {MessageType::switch_status, "SwitchStatus"},
    {MessageType::channel_ready, "ChannelReady"},
    {MessageType::dlm_start, "DlmStart"},
    {MessageType::dlm_result, "DlmResult"},
    {MessageType::path_design, "PathDesign"},
    {MessageType::mode_assignment, "ModeAssignment"},
    {MessageType::verification_result, "VerificationResult"},
    {MessageType::error, "Error"},
};

}  // namespace

std::string_view to_string(MessageType t) {
    for (const auto& [k, v] : kTypeNames)
        if (k == t) return v;
    return "?";
}

MessageType message_type_from_string(std::string_view text) {
    for (const auto& [k, v] : kTypeNames)
        if (v == text) return k;
    throw PreconditionError("unknown message type '" + std::string(text) + "'");
}

std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::no_common_mode: return "no-common-mode";
        case ErrorKind::no_feasible_mode: return "no-feasible-mode";
        case ErrorKind::dlm_failed: return "dlm-failed";
    }
    return "?";
}

std::string_view to_string(SwitchPosition p) {
    return p == SwitchPosition::to_measurement ? "to-measurement" : "to-carrier-link";
}

std::string_view to_string(OutcomeStatus s) {
    switch (s) {
        case OutcomeStatus::success: return "success";
        case OutcomeStatus::no_common_mode: return "no-common-mode";
        case OutcomeStatus::no_feasible_mode: return "no-feasible-mode";
        case OutcomeStatus::dlm_failed: return "dlm-failed";
        case OutcomeStatus::verification_failed: return "verification-failed";
    }
    return "?";
}

void MessageBus::send(Message m) {
    queues_[m.recipient].push_back(m);
    transcript_.push_back(std::move(m));
}

std::optional<Message> MessageBus::receive(std::string_view recipient) {
    auto it = queues_.find(recipient);
    if (it == queues_.end() || it->second.empty()) return std::nullopt;
    Message m = std::move(it->second.front());
    it->second.pop_front();
    return m;
}

std::size_t MessageBus::count(MessageType t) const {
    return static_cast<std::size_t>(
        std::count_if(transcript_.begin(), transcript_.end(), [&](const Message& m) { return m.type == t; }));
}

std::vector<TransceiverMode> consistency_check(const ModeCatalog& a, const ModeCatalog& b) {
    auto key = [](const TransceiverMode& m) {
        return std::make_tuple(m.modulation, m.baud_gbd, m.fec, m.bitrate_gbps);
    };
    std::vector<TransceiverMode> common;
    for (const auto& m : a.modes)
        if (std::any_of(b.modes.begin(), b.modes.end(), [&](const TransceiverMode& o) { return key(o) == key(m); }))
            common.push_back(m);
    if (common.empty())
        throw NoCommonModeError("catalogs of " + a.owner + " and " + b.owner + " share no interoperable mode");
    return common;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string aal_name(Owner o) { return o == Owner::customer_aal_a ? "aal_a" : "aal_b"; }

json estimate_json(const AalEstimate& e) {
    return {{"aal", aal_name(e.aal)},
            {"measured", e.measured},
            {"fit", e.fit},
            {"diagnostics", e.diagnostics},
            {"profile", e.profile},
            {"truth", e.truth}};
}

LinkHypothesis hypothesis_for(const Scenario& sc, const LinkTopology& section) {
    LinkHypothesis h = sc.hypothesis;
    h.length_km = sc.hypothesis_length_km.value_or(section.length_km());
    h.wavelength_nm = sc.constants.wavelength_nm;
    return h;
}

AalEstimate mirrored(const AalEstimate& from, Owner to) {
    AalEstimate m = from;
    m.aal = to;
    m.measured = false;
    m.truth = {};
    m.preprocess_seconds = m.learning_seconds = 0.0;
    return m;
}

// Ordered reliable channel plus the switch bank; shared by both strategies.
class Session {
public:
    explicit Session(const Scenario& sc) : corr_("path-" + sc.name + "-" + std::to_string(sc.seeds.probe)) {}

    void send(MessageType t, std::string_view from, std::string_view to, json payload) {
        bus_.send({t, std::string(from), std::string(to), corr_, std::move(payload)});
        // agents consume in order; the transcript keeps the record
        while (bus_.receive(to)) {
        }
    }

    void error_to(std::string_view from, std::initializer_list<std::string_view> to, ErrorKind kind, json detail) {
        for (auto r : to) send(MessageType::error, from, r, {{"kind", std::string(to_string(kind))}, {"detail", detail}});
    }

    void set_switches(SwitchPosition p) {
        for (auto [id, slot] : {std::pair{agent::switch_a, &switches_.aal_a}, std::pair{agent::switch_b, &switches_.aal_b}}) {
            send(MessageType::switch_command, agent::controller, id, {{"position", std::string(to_string(p))}});
            ++switch_commands_;
            *slot = p;
            send(MessageType::switch_status, id, agent::controller, {{"position", std::string(to_string(*slot))}});
        }
    }

    const SwitchState& switches() const { return switches_; }
    const std::vector<Message>& transcript() const { return bus_.transcript(); }
    std::size_t switch_commands() const { return switch_commands_; }

private:
    std::string corr_;
    MessageBus bus_;
    SwitchState switches_;
    std::size_t switch_commands_ = 0;
};

std::vector<AalEstimate> run_dlm(const Scenario& sc, Session* session) {
    std::vector<AalEstimate> out;
    std::vector<Owner> targets{Owner::customer_aal_a};
    if (sc.measurement.measure_aal_b) targets.push_back(Owner::customer_aal_b);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const Owner aal = targets[i];
        if (session) {
            const auto pos = aal == Owner::customer_aal_a ? session->switches().aal_a : session->switches().aal_b;
            if (pos != SwitchPosition::to_measurement)
                throw std::logic_error("probe requested while " + aal_name(aal) + " is switched to the carrier link");
            session->send(MessageType::dlm_start, agent::controller, agent::measurement,
                          {{"aal", aal_name(aal)},
                           {"probe", {{"modulation", std::string(to_string(sc.probe.modulation))},
                                      {"baud_gbd", sc.probe.baud_gbd},
                                      {"symbols", sc.probe.symbols}}}});
        }
        try {
            out.push_back(estimate_aal(sc, capture_aal(sc, aal)));
        } catch (const DlmFailedError& e) {
            if (session)
                session->send(MessageType::dlm_result, agent::measurement, agent::controller,
                              {{"aal", aal_name(aal)}, {"ok", false}, {"diagnostics", e.diagnostics}});
            throw;
        }
        if (session) {
            const auto& e = out.back();
            session->send(MessageType::dlm_result, agent::measurement, agent::controller,
                          {{"aal", aal_name(aal)}, {"ok", true}, {"profile", e.profile}, {"fit", e.fit}, {"diagnostics", e.diagnostics}});
        }
    }
    if (!sc.measurement.measure_aal_b) out.push_back(mirrored(out.front(), Owner::customer_aal_b));
    return out;
}

// Controller-side path: AAL sections from the fits, carrier section from the carrier's own records.
LinkTopology assemble_path(const Scenario& sc, const std::vector<AalEstimate>& est, const TopologyView& carrier_view) {
    LinkTopology::Builder b(sc.constants, sc.topology_options);
    auto add_aal = [&](const AalEstimate& e) {
        const std::string prefix = e.aal == Owner::customer_aal_a ? "aal-a" : "aal-b";
        for (std::size_t i = 0; i < e.fit.spans.size(); ++i) {
            if (i > 0)
                b.amplifier(prefix + "-amp" + std::to_string(i), e.aal,
                            {std::max(0.0, e.fit.amplifiers[i - 1].gain_db), sc.qot.aal_amp_nf_db});
            const auto& s = e.fit.spans[i];
            b.fiber(prefix + "-span" + std::to_string(i + 1), e.aal,
                    {s.end_km - s.start_km, std::max(0.0, s.loss_db_per_km), sc.hypothesis.dispersion_ps_nm_km,
                     sc.hypothesis.gamma_per_w_km, "fitted"});
        }
    };
    add_aal(est.front());
    for (const auto& s : carrier_view.segments) {
        if (s.owner != Owner::carrier) continue;
        if (s.fiber)
            b.fiber(s.id, Owner::carrier, *s.fiber);
        else
            b.amplifier(s.id, Owner::carrier, *s.amplifier);
    }
    add_aal(est.back());
    return b.build();
}

json design_for_customers(const QotReport& r, const LinkTopology& path) {
    json elements = json::array();
    for (std::size_t i = 0; i < r.per_element.size(); ++i)
        if (path.segments()[i].owner != Owner::carrier) elements.push_back(r.per_element[i]);
    return {{"per_element", elements},
            {"carrier_link", "aggregated into totals"},
            {"osnr_ase_db", number_or_inf(r.osnr_ase_db)},
            {"osnr_nli_db", number_or_inf(r.osnr_nli_db)},
            {"gsnr_db", number_or_inf(r.gsnr_db)},
            {"modes", r.modes},
            {"selected_mode", r.selected_mode ? json(r.selected_mode->name) : json(nullptr)}};
}

json mode_names(const std::vector<TransceiverMode>& modes) {
    json j = json::array();
    for (const auto& m : modes) j.push_back(m.name);
    return j;
}

json ber_json(const BerRecord& b) {
    return {{"mode", b.mode},
            {"ber", b.ber},
            {"threshold", b.threshold},
            {"gsnr_estimate_db", number_or_inf(b.gsnr_estimate_db)},
            {"passed", b.passed}};
}

// Request, catalog exchange and consistency check. Returns the common list or nothing on error.
std::optional<std::vector<TransceiverMode>> open_session(const Scenario& sc, Session& s, ProvisioningOutcome& out) {
    s.send(MessageType::path_setup_request, agent::customer_a, agent::controller,
           {{"from", agent::customer_a},
            {"to", agent::customer_b},
            {"strategy", std::string(to_string(sc.strategy))},
            {"launch_dbm", sc.launch_dbm}});
    s.send(MessageType::catalog_advert, agent::customer_a, agent::controller,
           {{"owner", sc.catalog_a.owner}, {"vendor", sc.catalog_a.vendor}, {"version", sc.catalog_a.version}, {"modes", sc.catalog_a.modes}});
    s.send(MessageType::catalog_advert, agent::customer_b, agent::controller,
           {{"owner", sc.catalog_b.owner}, {"vendor", sc.catalog_b.vendor}, {"version", sc.catalog_b.version}, {"modes", sc.catalog_b.modes}});
    try {
        auto common = consistency_check(sc.catalog_a, sc.catalog_b);
        for (auto r : {agent::customer_a, agent::customer_b})
            s.send(MessageType::common_mode_list, agent::controller, r, {{"modes", mode_names(common)}});
        return common;
    } catch (const NoCommonModeError& e) {
        s.error_to(agent::controller, {agent::customer_a, agent::customer_b}, ErrorKind::no_common_mode, e.what());
        out.status = OutcomeStatus::no_common_mode;
        out.message = e.what();
        return std::nullopt;
    }
}

void finish(ProvisioningOutcome& out, const Session& s, Clock::time_point t_start) {
    out.transcript = s.transcript();
    out.switch_commands = s.switch_commands();
    out.phase_timings.push_back({"total", seconds_since(t_start)});
}

ModeEvaluation blackbox_evaluation(const TransceiverMode& m, const BerRecord& b, double margin_db, double launch_dbm,
                                   const PhysicalConstants& c) {
    ModeEvaluation ev;
    ev.mode = m;
    ev.osnr_nli_db = std::nan("");
    ev.gsnr_db = b.gsnr_estimate_db;
    ev.required_gsnr_db = required_gsnr(m, c);
    ev.margin_db = ev.gsnr_db - ev.required_gsnr_db - margin_db;
    ev.feasible = b.passed && ev.margin_db >= 0.0 && launch_dbm >= m.min_launch_dbm && launch_dbm <= m.max_launch_dbm;
    return ev;
}

}  // namespace

AalCapture capture_aal(const Scenario& sc, Owner aal) {
    AalCapture out;
    out.aal = aal;
    const std::uint64_t seed_offset = aal == Owner::customer_aal_a ? 0 : 1000;
    const LinkTopology section = sc.section(aal);
    const LinkHypothesis hyp = hypothesis_for(sc, section);

    auto t0 = Clock::now();
    const PulseShape shape{sc.probe.rolloff, sc.probe.oversampling, sc.probe.baud_gbd};
    auto [symbols, tx] = generate_waveform(sc.probe.modulation, sc.probe.symbols, shape, sc.seeds.probe + seed_offset);
    PropagationConfig pc;
    pc.step_size_km = sc.probe.sim_step_km;
    pc.include_ase = sc.probe.include_ase;
    pc.noise_seed = sc.seeds.noise + seed_offset;
    out.rx = propagate(tx, section, sc.launch_dbm, pc);

    out.reference = tx;
    if (sc.dlm.tx_reference == TxReference::decision_directed) {
        const double beta2 = dispersion_to_beta2(hyp.dispersion_ps_nm_km, hyp.wavelength_nm);
        auto demod = demodulate(out.rx, beta2 * hyp.length_km, sc.probe.modulation, sc.probe.rolloff);
        out.reference = recover_tx_reference(demod.decided, shape);
    }
    out.preprocess_seconds = seconds_since(t0);
    return out;
}

AalEstimate estimate_aal(const Scenario& sc, const AalCapture& cap) {
    AalEstimate out;
    out.aal = cap.aal;
    out.preprocess_seconds = cap.preprocess_seconds;
    const LinkTopology section = sc.section(cap.aal);
    const LinkHypothesis hyp = hypothesis_for(sc, section);

    auto t0 = Clock::now();
    DlmEstimate est = estimate_power_profile(cap.reference, cap.rx, hyp, sc.dlm);
    out.learning_seconds = seconds_since(t0);
    out.profile = est.profile;
    out.diagnostics = est.diagnostics;
    const double grid = est.profile.size() > 1 ? est.profile.distance_km[1] : hyp.length_km;
    out.truth = true_power_profile(section, sc.launch_dbm, grid);

    json diag = est.diagnostics;
    diag["aal"] = aal_name(cap.aal);
    if (!est.diagnostics.ok())
        throw DlmFailedError("DLM on " + aal_name(cap.aal) + " failed (" + std::string(to_string(est.diagnostics.status)) +
                                 "): " + est.diagnostics.message,
                             diag);
    try {
        out.fit = fit_link_parameters(est.profile, {sc.dlm.amp_jump_threshold_db, sc.dlm.fit_guard_km});
    } catch (const PreconditionError& e) {
        throw DlmFailedError("linear fit of the " + aal_name(cap.aal) + " profile failed: " + e.what(), diag);
    }
    return out;
}

std::vector<AalEstimate> orchestrate_dlm(const Scenario& scenario) {
    scenario.validate_for_provisioning();
    return run_dlm(scenario, nullptr);
}

BerRecord measure_end_to_end(const LinkTopology& path, double launch_dbm, const TransceiverMode& mode,
                             const VerificationConfig& config, std::uint64_t seed, const PhysicalConstants& c) {
    const PulseShape shape{mode.rolloff, 2, mode.baud_gbd};
    auto [symbols, w] = generate_waveform(mode.modulation, config.symbols, shape, seed);
    if (std::isfinite(mode.tx_osnr_db)) add_awgn_for_osnr(w, mode.tx_osnr_db, c.ref_bandwidth_ghz, seed + 101);
    PropagationConfig pc;
    pc.step_size_km = config.sim_step_km;
    pc.include_ase = config.include_ase;
    pc.noise_seed = seed + 202;
    const WaveformGrid rx = propagate(w, path, launch_dbm, pc);
    const auto r = demodulate(rx, path.accumulated_beta2_ps2(), mode.modulation, mode.rolloff, &symbols);
    BerRecord b;
    b.mode = mode.name;
    b.ber = *r.metrics.ber;
    b.threshold = mode.prefec_ber_threshold;
    b.passed = b.ber <= b.threshold;
    // zero counted errors only bound the GSNR from below
    const double floor = 0.5 / static_cast<double>(r.metrics.bits);
    const double ber_for_estimate = std::clamp(b.ber, floor, 0.499);
    b.gsnr_estimate_db = osnr_for_ber(mode.modulation, ber_for_estimate, mode.baud_gbd, c);
    return b;
}

ProvisioningOutcome provision(const Scenario& sc, std::span<const AalEstimate> recorded) {
    sc.validate_for_provisioning();
    const auto t_start = Clock::now();
    ProvisioningOutcome out;
    out.strategy = Strategy::dlm;
    Session s(sc);

    auto common = open_session(sc, s, out);
    if (!common) {
        finish(out, s, t_start);
        return out;
    }

    if (!recorded.empty()) {
        out.estimates.assign(recorded.begin(), recorded.end());
    } else {
        s.set_switches(SwitchPosition::to_measurement);
        try {
            out.estimates = run_dlm(sc, &s);
        } catch (const DlmFailedError& e) {
            s.error_to(agent::controller, {agent::customer_a, agent::customer_b}, ErrorKind::dlm_failed,
                       {{"message", e.what()}, {"diagnostics", e.diagnostics}});
            out.status = OutcomeStatus::dlm_failed;
            out.message = e.what();
            finish(out, s, t_start);
            return out;
        }
    }
    if (out.estimates.size() != 2) throw PreconditionError("recorded estimates must cover AAL A and AAL B");
    double pre = 0.0, learn = 0.0;
    for (const auto& e : out.estimates) {
        pre += e.preprocess_seconds;
        learn += e.learning_seconds;
    }
    out.phase_timings.push_back({"DLM preprocess", pre});
    out.phase_timings.push_back({"DLM learning", learn});

    // path design at the carrier controller: fits + the carrier's own link records
    auto t0 = Clock::now();
    const LinkTopology truth = sc.topology();
    const TopologyView carrier_view = visible_view(truth, Role::carrier);
    const LinkTopology path = assemble_path(sc, out.estimates, carrier_view);
    const double design_launch = out.estimates.front().fit.spans.front().input_power_dbm;
    QotReport report = design_path(path, design_launch, *common, {sc.constants, sc.qot.design_margin_db});
    out.qot = report;
    out.phase_timings.push_back({"path design", seconds_since(t0)});
    for (auto r : {agent::customer_a, agent::customer_b})
        s.send(MessageType::path_design, agent::controller, r, design_for_customers(report, path));

    if (!report.selected_mode) {
        s.error_to(agent::controller, {agent::customer_a, agent::customer_b}, ErrorKind::no_feasible_mode,
                   "no common mode meets its required GSNR plus design margin");
        out.status = OutcomeStatus::no_feasible_mode;
        out.message = "no feasible mode";
        finish(out, s, t_start);
        return out;
    }
    out.selected_mode = report.selected_mode;

    t0 = Clock::now();
    s.set_switches(SwitchPosition::to_carrier_link);
    for (auto r : {agent::customer_a, agent::customer_b})
        s.send(MessageType::mode_assignment, agent::controller, r,
               {{"mode", *out.selected_mode}, {"gsnr_db", number_or_inf(report.gsnr_db)}});
    if (s.switches().aal_a != SwitchPosition::to_carrier_link || s.switches().aal_b != SwitchPosition::to_carrier_link)
        throw std::logic_error("verification attempted before both switches reached the carrier link");
    BerRecord v = measure_end_to_end(truth, sc.launch_dbm, *out.selected_mode, sc.verification, sc.seeds.verification, sc.constants);
    out.measurements.push_back(v);
    json vj = ber_json(v);
    vj["probe"] = false;
    s.send(MessageType::verification_result, agent::customer_b, agent::controller, vj);
    s.send(MessageType::verification_result, agent::customer_b, agent::customer_a, vj);
    out.phase_timings.push_back({"transceiver start", seconds_since(t0)});
    if (!v.passed) {
        out.status = OutcomeStatus::verification_failed;
        out.message = "verification BER above the pre-FEC threshold";
    }
    finish(out, s, t_start);
    return out;
}

ProvisioningOutcome provision_blackbox(const Scenario& sc) {
    sc.validate_for_provisioning();
    const auto t_start = Clock::now();
    ProvisioningOutcome out;
    out.strategy = Strategy::blackbox;
    Session s(sc);

    auto common = open_session(sc, s, out);
    if (!common) {
        finish(out, s, t_start);
        return out;
    }

    // the carrier only prepares an empty channel
    s.set_switches(SwitchPosition::to_carrier_link);
    for (auto r : {agent::customer_a, agent::customer_b}) s.send(MessageType::channel_ready, agent::controller, r, json::object());

    auto t0 = Clock::now();
    const LinkTopology truth = sc.topology();
    std::vector<std::pair<double, TransceiverMode>> order;
    for (const auto& m : *common) order.emplace_back(required_gsnr(m, sc.constants), m);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    QotReport report;
    report.osnr_ase_db = report.osnr_nli_db = std::nan("");
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < order.size(); ++i) {
        double remaining_best = 0.0;
        for (std::size_t k = i; k < order.size(); ++k)
            remaining_best = std::max(remaining_best, order[k].second.spectral_efficiency());
        if (best && report.modes[*best].mode.spectral_efficiency() > remaining_best) break;
        const auto& m = order[i].second;
        if (s.switches().aal_a != SwitchPosition::to_carrier_link || s.switches().aal_b != SwitchPosition::to_carrier_link)
            throw std::logic_error("probe attempted before both switches reached the carrier link");
        BerRecord b = measure_end_to_end(truth, sc.launch_dbm, m, sc.verification, sc.seeds.verification + 7919 * i, sc.constants);
        out.measurements.push_back(b);
        json bj = ber_json(b);
        bj["probe"] = true;
        s.send(MessageType::verification_result, agent::customer_b, agent::customer_a, bj);
        report.modes.push_back(blackbox_evaluation(m, b, sc.qot.design_margin_db, sc.launch_dbm, sc.constants));
        try {
            const auto& pick = select_mode(report.modes);
            for (std::size_t k = 0; k < report.modes.size(); ++k)
                if (report.modes[k].mode.name == pick.name) best = k;
        } catch (const NoFeasibleModeError&) {
        }
    }
    out.phase_timings.push_back({"end-to-end probing", seconds_since(t0)});

    if (!best) {
        report.gsnr_db = std::nan("");
        out.qot = report;
        s.error_to(agent::customer_a, {agent::customer_b, agent::controller}, ErrorKind::no_feasible_mode,
                   "no probed mode met its pre-FEC threshold");
        out.status = OutcomeStatus::no_feasible_mode;
        out.message = "no feasible mode";
        finish(out, s, t_start);
        return out;
    }
    t0 = Clock::now();
    report.selected_mode = report.modes[*best].mode;
    report.gsnr_db = report.modes[*best].gsnr_db;
    out.qot = report;
    out.selected_mode = report.selected_mode;
    for (auto r : {agent::customer_b, agent::controller})
        s.send(MessageType::mode_assignment, agent::customer_a, r,
               {{"mode", *out.selected_mode}, {"gsnr_db", number_or_inf(report.gsnr_db)}});
    out.phase_timings.push_back({"transceiver start", seconds_since(t0)});
    finish(out, s, t_start);
    return out;
}

ProvisioningOutcome run_strategy(const Scenario& scenario) {
    return scenario.strategy == Strategy::dlm ? provision(scenario) : provision_blackbox(scenario);
}

// ---- transcript checks ----

namespace {

void collect_numbers(const json& j, std::vector<double>& out) {
    if (j.is_number())
        out.push_back(j.get<double>());
    else if (j.is_structured())
        for (const auto& v : j) collect_numbers(v, out);
}

bool close_to(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

std::vector<std::string> scan_information_flow(const Scenario& scenario, const ProvisioningOutcome& outcome) {
    std::vector<std::string> findings;
    const LinkTopology truth = scenario.topology();

    std::set<std::string> carrier_ids;
    std::vector<double> secret;
    for (const auto& s : truth.segments()) {
        if (s.owner != Owner::carrier) continue;
        carrier_ids.insert(s.id);
        if (s.is_fiber()) {
            const auto& f = s.fiber();
            secret.insert(secret.end(), {f.length_km, f.loss_db_per_km, f.dispersion_ps_nm_km, f.gamma_per_w_km, f.loss_db()});
        } else {
            secret.insert(secret.end(), {s.amplifier().gain_db, s.amplifier().noise_figure_db});
        }
    }
    if (outcome.qot)
        for (const auto& e : outcome.qot->per_element)
            if (carrier_ids.count(e.id)) {
                if (std::isfinite(e.osnr_ase_db)) secret.push_back(e.osnr_ase_db);
                if (std::isfinite(e.osnr_nli_db)) secret.push_back(e.osnr_nli_db);
            }
    // values customers legitimately know (catalogs, configuration, constants)
    json pub = to_json(scenario);
    pub.erase("topology");
    std::vector<double> known;
    collect_numbers(pub, known);
    // zero is also every empty counter and error-free BER
    std::erase_if(secret, [&](double v) {
        return v == 0.0 || std::any_of(known.begin(), known.end(), [&](double k) { return close_to(v, k); });
    });

    static const std::set<std::string> param_keys{"length_km", "loss_db_per_km", "dispersion_ps_nm_km",
                                                  "gamma_per_w_km", "gain_db", "noise_figure_db"};
    for (std::size_t i = 0; i < outcome.transcript.size(); ++i) {
        const auto& m = outcome.transcript[i];
        if (m.recipient != agent::customer_a && m.recipient != agent::customer_b) continue;
        const std::string where = "message " + std::to_string(i) + " (" + std::string(to_string(m.type)) + " to " + m.recipient + ")";
        std::function<void(const json&)> walk = [&](const json& j) {
            if (j.is_string() && carrier_ids.count(j.get<std::string>()))
                findings.push_back(where + ": names carrier element " + j.get<std::string>());
            if (j.is_number()) {
                double v = j.get<double>();
                for (double sv : secret)
                    if (close_to(v, sv)) {
                        findings.push_back(where + ": carries carrier value " + std::to_string(v));
                        break;
                    }
            }
            if (j.is_object()) {
                bool carrier_owned = j.contains("owner") && j["owner"] == std::string(to_string(Owner::carrier));
                for (auto it = j.begin(); it != j.end(); ++it) {
                    if (carrier_owned && param_keys.count(it.key()))
                        findings.push_back(where + ": carrier-owned object exposes " + it.key());
                    walk(it.value());
                }
            } else if (j.is_array()) {
                for (const auto& v : j) walk(v);
            }
        };
        walk(m.payload);
    }

    // the other direction must hold: the carrier sees both catalogs
    for (auto who : {agent::customer_a, agent::customer_b}) {
        bool seen = std::any_of(outcome.transcript.begin(), outcome.transcript.end(), [&](const Message& m) {
            return m.type == MessageType::catalog_advert && m.sender == who && m.recipient == agent::controller;
        });
        if (!seen) findings.push_back(std::string(who) + " catalog never reached the carrier controller");
    }
    return findings;
}

std::vector<std::string> check_switch_safety(const std::vector<Message>& transcript) {
    std::vector<std::string> findings;
    std::map<std::string, std::string> pos{{std::string(agent::switch_a), "to-measurement"},
                                           {std::string(agent::switch_b), "to-measurement"}};
    for (std::size_t i = 0; i < transcript.size(); ++i) {
        const auto& m = transcript[i];
        const std::string where = "message " + std::to_string(i);
        if (m.type == MessageType::switch_status) pos[m.sender] = m.payload.at("position").get<std::string>();
        if (m.type == MessageType::dlm_start) {
            const auto sw = m.payload.at("aal") == "aal_a" ? std::string(agent::switch_a) : std::string(agent::switch_b);
            if (pos[sw] != "to-measurement") findings.push_back(where + ": DLM probe while " + sw + " is " + pos[sw]);
        }
        if (m.type == MessageType::verification_result) {
            for (const auto& [sw, p] : pos)
                if (p != "to-carrier-link") findings.push_back(where + ": end-to-end traffic while " + sw + " is " + p);
        }
    }
    return findings;
}

std::vector<std::string> check_correlation(const std::vector<Message>& transcript) {
    std::vector<std::string> findings;
    if (transcript.empty()) return findings;
    if (transcript.front().type != MessageType::path_setup_request)
        findings.push_back("transcript does not start with a PathSetupRequest");
    const auto& id = transcript.front().correlation_id;
    if (id.empty()) findings.push_back("request has no correlation id");
    for (std::size_t i = 0; i < transcript.size(); ++i)
        if (transcript[i].type != MessageType::error && transcript[i].correlation_id != id)
            findings.push_back("message " + std::to_string(i) + " breaks the correlation chain");
    return findings;
}

ReplaySummary replay_transcript(const std::vector<Message>& transcript) {
    ReplaySummary r;
    for (const auto& m : transcript) {
        switch (m.type) {
            case MessageType::error: {
                const auto kind = m.payload.at("kind").get<std::string>();
                if (kind == "no-common-mode") r.status = OutcomeStatus::no_common_mode;
                if (kind == "no-feasible-mode") r.status = OutcomeStatus::no_feasible_mode;
                if (kind == "dlm-failed") r.status = OutcomeStatus::dlm_failed;
                break;
            }
            case MessageType::path_design:
                r.gsnr_db = number_or_inf(m.payload.at("gsnr_db"));
                break;
            case MessageType::mode_assignment:
                r.selected_mode = m.payload.at("mode").at("name").get<std::string>();
                r.gsnr_db = number_or_inf(m.payload.at("gsnr_db"));
                break;
            default:
                break;
        }
    }
    for (const auto& m : transcript) {
        if (m.type != MessageType::verification_result) continue;
        const bool probe = m.payload.at("probe").get<bool>();
        if (!probe || (r.selected_mode && m.payload.at("mode") == *r.selected_mode)) {
            r.ber = m.payload.at("ber").get<double>();
            if (!probe && !m.payload.at("passed").get<bool>()) r.status = OutcomeStatus::verification_failed;
        }
    }
    return r;
}

std::string timing_table(const ProvisioningOutcome& outcome) {
    std::ostringstream os;
    char line[128];
    std::snprintf(line, sizeof line, "%-22s %12s\n", "Phase", "Time [s]");
    os << line;
    os << std::string(35, '-') << '\n';
    for (const auto& p : outcome.phase_timings) {
        std::snprintf(line, sizeof line, "%-22s %12.3f\n", p.phase.c_str(), p.seconds);
        os << line;
    }
    return os.str();
}

void to_json(json& j, const Message& m) {
    j = {{"type", std::string(to_string(m.type))},
         {"sender", m.sender},
         {"recipient", m.recipient},
         {"correlation_id", m.correlation_id},
         {"payload", m.payload}};
}

json outcome_json(const ProvisioningOutcome& o) {
    json j;
    j["strategy"] = std::string(to_string(o.strategy));
    j["status"] = std::string(to_string(o.status));
    j["message"] = o.message;
    j["selected_mode"] = o.selected_mode ? json(*o.selected_mode) : json(nullptr);
    j["qot"] = o.qot ? json(*o.qot) : json(nullptr);
    j["per_element_decomposed"] = o.qot && !o.qot->per_element.empty();
    j["estimates"] = json::array();
    for (const auto& e : o.estimates) j["estimates"].push_back(estimate_json(e));
    j["measurements"] = json::array();
    for (const auto& b : o.measurements) j["measurements"].push_back(ber_json(b));
    j["switch_commands"] = o.switch_commands;
    j["transcript"] = o.transcript;
    return j;
}

}  // namespace aal
