#include "aal/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "aal/errors.hpp"
#include "aal/json_io.hpp"
#include "aal/protocol.hpp"
#include "aal/qot.hpp"
#include "aal/scenario.hpp"

namespace aal::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string scenario;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::string strategy;
    bool self_check = false;
    // dlm only
    std::string aal = "a";
    std::string export_dir;
    std::string tx_file;
    std::string rx_file;
};

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
    if (!out) throw IoError("write failed for " + p.string());
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

Scenario load(const Options& o) {
    Scenario s = load_scenario(o.scenario);
    if (o.seed) apply_seed_override(s, *o.seed);
    if (!o.strategy.empty()) {
        try {
            s.strategy = strategy_from_string(o.strategy);
        } catch (const std::exception& e) {
            throw SchemaError(std::string("--strategy: ") + e.what());
        }
    }
    return s;
}

fs::path out_dir(const Options& o) {
    fs::path p(o.out);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory " + p.string() + ": " + ec.message());
    return p;
}

std::string profile_csv(const std::vector<AalEstimate>& estimates) {
    std::string s = "aal,distance_km,estimated_dbm,truth_dbm\n";
    for (const auto& e : estimates) {
        const char* name = e.aal == Owner::customer_aal_a ? "aal_a" : "aal_b";
        for (std::size_t i = 0; i < e.profile.size(); ++i) {
            s += name;
            s += "," + num(e.profile.distance_km[i]) + "," + num(e.profile.power_dbm[i]) + ",";
            if (i < e.truth.size()) s += num(e.truth.power_dbm[i]);
            s += "\n";
        }
    }
    return s;
}

json fits_json(const Scenario& sc, const std::vector<AalEstimate>& estimates) {
    json fits = json::array();
    for (const auto& e : estimates)
        fits.push_back({{"aal", e.aal == Owner::customer_aal_a ? "aal_a" : "aal_b"},
                        {"measured", e.measured},
                        {"fit", e.fit},
                        {"diagnostics", e.diagnostics}});
    return {{"scenario", to_json(sc)}, {"fits", fits}};
}

std::string qot_csv(const QotReport& r) {
    std::string s = "element,osnr_ase_db,osnr_nli_db,gsnr_db\n";
    for (const auto& e : r.per_element) {
        const double parts[] = {e.osnr_ase_db, e.osnr_nli_db};
        s += e.id + "," + num(e.osnr_ase_db) + "," + num(e.osnr_nli_db) + "," + num(inverse_sum_db(parts)) + "\n";
    }
    s += "total," + num(r.osnr_ase_db) + "," + num(r.osnr_nli_db) + "," + num(r.gsnr_db) + "\n";
    return s;
}

json timing_json(const ProvisioningOutcome& o) {
    json j = json::array();
    for (const auto& p : o.phase_timings) j.push_back({{"phase", p.phase}, {"seconds", p.seconds}});
    return j;
}

int exit_for(OutcomeStatus s) {
    switch (s) {
        case OutcomeStatus::success: return ok;
        case OutcomeStatus::no_common_mode: return no_common_mode;
        case OutcomeStatus::no_feasible_mode: return no_feasible_mode;
        case OutcomeStatus::dlm_failed: return dlm_failed;
        case OutcomeStatus::verification_failed: return verification_failed;
    }
    return internal_error;
}

int cmd_provision(const Options& o) {
    const Scenario sc = load(o);
    sc.validate_for_provisioning();
    const fs::path dir = out_dir(o);
    const ProvisioningOutcome outcome = run_strategy(sc);

    json report = outcome_json(outcome);
    report["scenario"] = to_json(sc);
    write_json(dir / "outcome.json", report);
    if (outcome.qot) write_text(dir / "qot.csv", qot_csv(*outcome.qot));
    if (!outcome.estimates.empty()) {
        write_text(dir / "profile.csv", profile_csv(outcome.estimates));
        write_json(dir / "fit.json", fits_json(sc, outcome.estimates));
    }
    write_text(dir / "timing.txt", timing_table(outcome));
    write_json(dir / "timing.json", timing_json(outcome));

    std::cout << "status: " << to_string(outcome.status) << "\n";
    if (outcome.selected_mode) std::cout << "selected mode: " << outcome.selected_mode->name << "\n";
    if (outcome.qot) std::cout << "GSNR: " << num(outcome.qot->gsnr_db) << " dB\n";
    for (const auto& m : outcome.measurements)
        std::cout << "BER " << m.mode << ": " << m.ber << " (threshold " << m.threshold << ")\n";
    if (!outcome.message.empty() && outcome.status != OutcomeStatus::success) std::cerr << outcome.message << "\n";
    std::cout << timing_table(outcome);

    if (o.self_check) {
        std::vector<std::string> findings = scan_information_flow(sc, outcome);
        for (auto& f : check_switch_safety(outcome.transcript)) findings.push_back(f);
        for (auto& f : check_correlation(outcome.transcript)) findings.push_back(f);
        const ReplaySummary r = replay_transcript(outcome.transcript);
        const std::optional<std::string> selected =
            outcome.selected_mode ? std::optional<std::string>(outcome.selected_mode->name) : std::nullopt;
        if (r.status != outcome.status || r.selected_mode != selected)
            findings.push_back("transcript replay disagrees with the outcome");
        for (const auto& f : findings) std::cerr << "self-check: " << f << "\n";
        if (!findings.empty()) return self_check_failed;
        std::cout << "self-check: ok\n";
    }
    return exit_for(outcome.status);
}

int cmd_dlm(const Options& o) {
    const Scenario sc = load(o);
    if (o.aal != "a" && o.aal != "b") throw SchemaError("--aal must be 'a' or 'b'");
    const Owner aal = o.aal == "a" ? Owner::customer_aal_a : Owner::customer_aal_b;
    if (sc.section(aal).segments().empty()) throw SchemaError("scenario has no topology for the selected AAL");
    if (o.tx_file.empty() != o.rx_file.empty()) throw SchemaError("--tx and --rx must be given together");
    const fs::path dir = out_dir(o);

    AalCapture cap;
    if (!o.tx_file.empty()) {
        cap.aal = aal;
        cap.reference = read_waveform(o.tx_file);
        cap.rx = read_waveform(o.rx_file);
    } else {
        cap = capture_aal(sc, aal);
    }
    if (!o.export_dir.empty()) {
        fs::create_directories(o.export_dir);
        write_waveform(cap.reference, fs::path(o.export_dir) / "tx.wfm");
        write_waveform(cap.rx, fs::path(o.export_dir) / "rx.wfm");
    }
    try {
        const AalEstimate est = estimate_aal(sc, cap);
        write_text(dir / "profile.csv", profile_csv({est}));
        write_json(dir / "fit.json", fits_json(sc, {est}));
        for (std::size_t i = 0; i < est.fit.spans.size(); ++i) {
            const auto& s = est.fit.spans[i];
            std::cout << "span " << i + 1 << ": " << num(s.start_km) << "-" << num(s.end_km) << " km, loss "
                      << num(s.loss_db_per_km) << " dB/km, input " << num(s.input_power_dbm) << " dBm\n";
        }
        for (const auto& a : est.fit.amplifiers)
            std::cout << "amplifier at " << num(a.position_km) << " km: gain " << num(a.gain_db) << " dB\n";
    } catch (const DlmFailedError& e) {
        write_json(dir / "fit.json", {{"scenario", to_json(sc)}, {"error", e.what()}, {"diagnostics", e.diagnostics}});
        std::cerr << e.what() << "\n";
        return dlm_failed;
    }
    return ok;
}

int cmd_margin(const Options& o) {
    const Scenario sc = load(o);
    if (!sc.margin) throw SchemaError("scenario has no 'margin' section");
    const fs::path dir = out_dir(o);
    const auto points = margin_analysis(*sc.margin);

    std::string csv = "span_count,tx_osnr_db,margin_db\n";
    for (const auto& p : points) csv += std::to_string(p.spans) + "," + num(p.tx_osnr_db) + "," + num(p.margin_db) + "\n";
    write_text(dir / "margin.csv", csv);
    write_json(dir / "margin.json", {{"scenario", to_json(sc)}, {"points", points}});
    std::cout << "wrote " << points.size() << " margin points\n";

    if (o.self_check) {
        std::vector<std::string> findings;
        std::map<double, const MarginPoint*> last;
        for (const auto& p : points) {
            const std::string where = "N=" + std::to_string(p.spans) + " tx_osnr=" + num(p.tx_osnr_db);
            if (std::isinf(p.tx_osnr_db) && std::abs(p.margin_db - sc.margin->extra_loss_db) > 1e-9)
                findings.push_back(where + ": margin differs from the extra loss");
            if (p.margin_db > sc.margin->extra_loss_db + 1e-9) findings.push_back(where + ": margin above the extra loss");
            auto it = last.find(p.tx_osnr_db);
            if (it != last.end() && p.margin_db < it->second->margin_db - 1e-12)
                findings.push_back(where + ": margin decreased with span count");
            last[p.tx_osnr_db] = &p;
        }
        for (const auto& f : findings) std::cerr << "self-check: " << f << "\n";
        if (!findings.empty()) return self_check_failed;
        std::cout << "self-check: ok\n";
    }
    return ok;
}

void common_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--scenario", o.scenario, "scenario file")->required();
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed-override", o.seed, "derive every seed from this value");
    cmd->add_option("--strategy", o.strategy, "dlm or blackbox");
    cmd->add_flag("--self-check", o.self_check, "verify invariants on the produced reports");
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Path provisioning across alien access links"};
    app.require_subcommand(1);
    Options o;
    auto* provision_cmd = app.add_subcommand("provision", "run the provisioning protocol end to end");
    common_flags(provision_cmd, o);
    auto* dlm_cmd = app.add_subcommand("dlm", "estimate one AAL power profile");
    common_flags(dlm_cmd, o);
    dlm_cmd->add_option("--aal", o.aal, "a or b");
    dlm_cmd->add_option("--export-waveforms", o.export_dir, "write tx.wfm and rx.wfm here");
    dlm_cmd->add_option("--tx", o.tx_file, "pre-captured tx reference waveform");
    dlm_cmd->add_option("--rx", o.rx_file, "pre-captured received waveform");
    auto* margin_cmd = app.add_subcommand("margin", "OSNR margin versus span count");
    common_flags(margin_cmd, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage_error;
    }

    try {
        if (provision_cmd->parsed()) return cmd_provision(o);
        if (dlm_cmd->parsed()) return cmd_dlm(o);
        return cmd_margin(o);
    } catch (const SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const PreconditionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return internal_error;
    }
}

}  // namespace aal::cli
