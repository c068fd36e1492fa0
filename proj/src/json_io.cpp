#include "aal/json_io.hpp"

#include <cmath>

#include "aal/errors.hpp"

namespace aal {

using nlohmann::json;

json number_or_inf(double v) {
    if (v == kInfinity) return "inf";
    if (v == -kInfinity) return "-inf";
    return v;
}

double number_or_inf(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInfinity;
        if (s == "-inf") return -kInfinity;
        throw SchemaError("expected a number or \"inf\", got \"" + s + "\"");
    }
    if (!j.is_number()) throw SchemaError("expected a number, got " + j.dump());
    return j.get<double>();
}

void to_json(json& j, const FiberSpan& f) {
    j = {{"length_km", f.length_km},
         {"loss_db_per_km", f.loss_db_per_km},
         {"dispersion_ps_nm_km", f.dispersion_ps_nm_km},
         {"gamma_per_w_km", f.gamma_per_w_km}};
    if (!f.effective_area_note.empty()) j["effective_area_note"] = f.effective_area_note;
}

void to_json(json& j, const Amplifier& a) {
    j = {{"gain_db", a.gain_db}, {"noise_figure_db", a.noise_figure_db}};
}

void to_json(json& j, const TransceiverMode& m) {
    j = {{"name", m.name},
         {"bitrate_gbps", m.bitrate_gbps},
         {"modulation", std::string(to_string(m.modulation))},
         {"baud_gbd", m.baud_gbd},
         {"fec", m.fec},
         {"prefec_ber_threshold", m.prefec_ber_threshold},
         {"tx_osnr_db", number_or_inf(m.tx_osnr_db)},
         {"min_launch_dbm", m.min_launch_dbm},
         {"max_launch_dbm", m.max_launch_dbm},
         {"rolloff", m.rolloff}};
}

void from_json(const json& j, TransceiverMode& m) {
    m.name = j.at("name").get<std::string>();
    m.bitrate_gbps = j.at("bitrate_gbps").get<double>();
    m.modulation = modulation_from_string(j.at("modulation").get<std::string>());
    m.baud_gbd = j.at("baud_gbd").get<double>();
    m.fec = j.at("fec").get<std::string>();
    m.prefec_ber_threshold = j.at("prefec_ber_threshold").get<double>();
    m.tx_osnr_db = number_or_inf(j.at("tx_osnr_db"));
    m.min_launch_dbm = j.at("min_launch_dbm").get<double>();
    m.max_launch_dbm = j.at("max_launch_dbm").get<double>();
    m.rolloff = j.at("rolloff").get<double>();
}

void to_json(json& j, const ModeEvaluation& e) {
    j = {{"mode", e.mode.name},
         {"osnr_nli_db", number_or_inf(e.osnr_nli_db)},
         {"gsnr_db", number_or_inf(e.gsnr_db)},
         {"required_gsnr_db", e.required_gsnr_db},
         {"margin_db", number_or_inf(e.margin_db)},
         {"feasible", e.feasible}};
}

void to_json(json& j, const ElementQot& e) {
    j = {{"id", e.id}, {"osnr_ase_db", number_or_inf(e.osnr_ase_db)}, {"osnr_nli_db", number_or_inf(e.osnr_nli_db)}};
}

void to_json(json& j, const QotReport& r) {
    j = {{"per_element", r.per_element},
         {"osnr_ase_db", number_or_inf(r.osnr_ase_db)},
         {"osnr_nli_db", number_or_inf(r.osnr_nli_db)},
         {"gsnr_db", number_or_inf(r.gsnr_db)},
         {"modes", r.modes},
         {"selected_mode", r.selected_mode ? json(r.selected_mode->name) : json(nullptr)}};
}

void to_json(json& j, const PowerProfile& p) {
    j = {{"distance_km", p.distance_km}, {"power_dbm", p.power_dbm}};
}

void to_json(json& j, const LinkFit& f) {
    j["spans"] = json::array();
    for (const auto& s : f.spans)
        j["spans"].push_back({{"start_km", s.start_km},
                              {"end_km", s.end_km},
                              {"loss_db_per_km", s.loss_db_per_km},
                              {"input_power_dbm", s.input_power_dbm}});
    j["amplifiers"] = json::array();
    for (const auto& a : f.amplifiers) j["amplifiers"].push_back({{"position_km", a.position_km}, {"gain_db", a.gain_db}});
}

void from_json(const json& j, LinkFit& f) {
    f = {};
    for (const auto& s : j.at("spans"))
        f.spans.push_back({s.at("start_km").get<double>(), s.at("end_km").get<double>(),
                           s.at("loss_db_per_km").get<double>(), s.at("input_power_dbm").get<double>()});
    for (const auto& a : j.at("amplifiers"))
        f.amplifiers.push_back({a.at("position_km").get<double>(), a.at("gain_db").get<double>()});
}

void to_json(json& j, const DlmDiagnostics& d) {
    j = {{"status", std::string(to_string(d.status))},
         {"message", d.message},
         {"initial_loss", d.loss_history.empty() ? 0.0 : d.loss_history.front()},
         {"final_loss", d.final_loss()},
         {"linear_loss", d.linear_loss},
         {"accepted_steps", d.accepted_steps},
         {"rejected_steps", d.rejected_steps},
         {"alignment_lag", d.alignment_lag}};
}

void to_json(json& j, const MarginPoint& p) {
    j = {{"span_count", p.spans},
         {"tx_osnr_db", number_or_inf(p.tx_osnr_db)},
         {"osnr_normal_db", number_or_inf(p.osnr_normal_db)},
         {"osnr_worst_db", number_or_inf(p.osnr_worst_db)},
         {"margin_db", p.margin_db}};
}

}  // namespace aal
