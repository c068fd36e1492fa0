#include "doctest.h"

#include <algorithm>

#include "aal/errors.hpp"
#include "aal/json_io.hpp"
#include "aal/protocol.hpp"
#include "small_scenario.hpp"

using namespace aal;

namespace {

TransceiverMode mode(std::string name, Modulation m, double rate, std::string fec = "oFEC") {
    TransceiverMode t;
    t.name = std::move(name);
    t.modulation = m;
    t.bitrate_gbps = rate;
    t.fec = std::move(fec);
    return t;
}

const TransceiverMode kQpsk = mode("100G-DP-QPSK", Modulation::dp_qpsk, 100);
const TransceiverMode kQam = mode("200G-DP-16QAM", Modulation::dp_16qam, 200);

ModeCatalog catalog(std::string owner, std::vector<TransceiverMode> modes) {
    return {std::move(owner), "v", "1", std::move(modes)};
}

std::vector<MessageType> types(const std::vector<Message>& t) {
    std::vector<MessageType> out;
    for (const auto& m : t) out.push_back(m.type);
    return out;
}

std::size_t count(const std::vector<Message>& t, MessageType type) {
    return static_cast<std::size_t>(std::count_if(t.begin(), t.end(), [&](const Message& m) { return m.type == type; }));
}

Scenario small(SmallScenario s = {}) { return parse_scenario(s.yaml()); }

// One DLM provisioning of the default small scenario, shared by several cases.
const ProvisioningOutcome& nominal() {
    static const ProvisioningOutcome o = provision(small());
    return o;
}

}  // namespace

TEST_CASE("consistency check") {
    SUBCASE("identical catalogs give the identity") {
        auto common = consistency_check(catalog("A", {kQpsk, kQam}), catalog("B", {kQpsk, kQam}));
        REQUIRE(common.size() == 2);
        CHECK(common[0] == kQpsk);
        CHECK(common[1] == kQam);
    }
    SUBCASE("order follows catalog A") {
        auto common = consistency_check(catalog("A", {kQam, kQpsk}), catalog("B", {kQpsk, kQam}));
        CHECK(common[0].name == kQam.name);
    }
    SUBCASE("names do not matter, the interoperability key does") {
        auto renamed = kQpsk;
        renamed.name = "vendor-b-qpsk";
        auto common = consistency_check(catalog("A", {kQpsk, kQam}), catalog("B", {renamed}));
        REQUIRE(common.size() == 1);
        CHECK(common[0].name == kQpsk.name);
    }
    SUBCASE("disjoint catalogs") {
        CHECK_THROWS_AS(consistency_check(catalog("A", {kQpsk}), catalog("B", {kQam})), NoCommonModeError);
        auto other_fec = mode("100G-DP-QPSK", Modulation::dp_qpsk, 100, "SD-FEC");
        CHECK_THROWS_AS(consistency_check(catalog("A", {kQpsk}), catalog("B", {other_fec})), NoCommonModeError);
    }
}

TEST_CASE("message bus keeps per-recipient order and a full transcript") {
    MessageBus bus;
    bus.send({MessageType::catalog_advert, "x", "r1", "c", {{"i", 1}}});
    bus.send({MessageType::catalog_advert, "x", "r2", "c", {{"i", 2}}});
    bus.send({MessageType::error, "x", "r1", "c", {{"i", 3}}});
    CHECK(bus.transcript().size() == 3);
    CHECK(bus.count(MessageType::catalog_advert) == 2);
    CHECK(bus.receive("r1")->payload["i"] == 1);
    CHECK(bus.receive("r1")->payload["i"] == 3);
    CHECK_FALSE(bus.receive("r1"));
    CHECK(bus.receive("r2")->payload["i"] == 2);
    CHECK_FALSE(bus.receive("nobody"));
}

TEST_CASE("message type names round trip") {
    for (auto t : {MessageType::path_setup_request, MessageType::dlm_result, MessageType::verification_result,
                   MessageType::error})
        CHECK(message_type_from_string(to_string(t)) == t);
    CHECK_THROWS_AS(message_type_from_string("Nope"), PreconditionError);
}

TEST_CASE("DLM provisioning on a small link") {
    const auto& o = nominal();
    REQUIRE(o.status == OutcomeStatus::success);
    REQUIRE(o.selected_mode);
    CHECK(o.selected_mode->name == "200G-DP-16QAM");
    REQUIRE(o.measurements.size() == 1);
    CHECK(o.measurements[0].ber <= o.selected_mode->prefec_ber_threshold);

    const auto& t = o.transcript;
    const auto ty = types(t);
    REQUIRE(ty.size() > 8);
    CHECK(ty[0] == MessageType::path_setup_request);
    CHECK(ty[1] == MessageType::catalog_advert);
    CHECK(ty[2] == MessageType::catalog_advert);
    CHECK(ty[3] == MessageType::common_mode_list);
    CHECK(ty[4] == MessageType::common_mode_list);
    CHECK(ty[5] == MessageType::switch_command);
    CHECK(t[5].payload["position"] == "to-measurement");

    auto first = [&](MessageType m) { return std::find(ty.begin(), ty.end(), m) - ty.begin(); };
    CHECK(first(MessageType::dlm_start) < first(MessageType::dlm_result));
    CHECK(first(MessageType::dlm_result) < first(MessageType::path_design));
    CHECK(first(MessageType::path_design) < first(MessageType::mode_assignment));
    CHECK(first(MessageType::mode_assignment) < first(MessageType::verification_result));

    SUBCASE("AAL B is mirrored from the single measurement") {
        CHECK(count(t, MessageType::dlm_start) == 1);
        CHECK(count(t, MessageType::dlm_result) == 1);
        REQUIRE(o.estimates.size() == 2);
        CHECK(o.estimates[0].measured);
        CHECK_FALSE(o.estimates[1].measured);
        CHECK(o.estimates[1].fit.spans.size() == o.estimates[0].fit.spans.size());
    }
    SUBCASE("four switch commands, each acknowledged") {
        CHECK(o.switch_commands == 4);
        CHECK(count(t, MessageType::switch_command) == 4);
        CHECK(count(t, MessageType::switch_status) == 4);
    }
    SUBCASE("fitted AAL parameters") {
        const auto& fit = o.estimates[0].fit;
        REQUIRE(fit.spans.size() == 2);
        REQUIRE(fit.amplifiers.size() == 1);
        for (const auto& s : fit.spans) CHECK(std::abs(s.loss_db_per_km - 0.2) < 0.05);
        CHECK(std::abs(fit.spans[0].input_power_dbm - 8.0) < 0.7);
        CHECK(std::abs(fit.amplifiers[0].gain_db - 6.0) < 1.0);
    }
    SUBCASE("design GSNR tracks the true-topology design") {
        const Scenario sc = small();
        auto truth = design_path(sc.topology(), sc.launch_dbm, sc.catalog_a.modes, {sc.constants, 1.0});
        REQUIRE(o.qot);
        CHECK(std::abs(o.qot->gsnr_db - truth.gsnr_db) < 1.0);
    }
    SUBCASE("transcript checks are clean") {
        CHECK(scan_information_flow(small(), o).empty());
        CHECK(check_switch_safety(t).empty());
        CHECK(check_correlation(t).empty());
    }
    SUBCASE("customer-bound path design hides carrier elements") {
        for (const auto& m : t) {
            if (m.type != MessageType::path_design) continue;
            for (const auto& e : m.payload["per_element"]) CHECK(e["id"].get<std::string>().rfind("c-", 0) != 0);
        }
    }
    SUBCASE("replay reproduces the outcome") {
        auto r = replay_transcript(t);
        CHECK(r.status == o.status);
        REQUIRE(r.selected_mode);
        CHECK(*r.selected_mode == o.selected_mode->name);
        REQUIRE(r.gsnr_db);
        CHECK(*r.gsnr_db == o.qot->gsnr_db);
        REQUIRE(r.ber);
        CHECK(*r.ber == o.measurements[0].ber);
    }
    SUBCASE("timing table has the fixed rows") {
        const auto table = timing_table(o);
        for (auto row : {"DLM preprocess", "DLM learning", "path design", "transceiver start", "total"})
            CHECK(table.find(row) != std::string::npos);
        CHECK(outcome_json(o).dump().find("seconds") == std::string::npos);
    }
}

TEST_CASE("same seeds give the same outcome") {
    auto again = provision(small());
    CHECK(outcome_json(again).dump() == outcome_json(nominal()).dump());
}

TEST_CASE("recorded AAL estimates skip probing") {
    const auto& first = nominal();
    auto o = provision(small(), first.estimates);
    CHECK(o.status == OutcomeStatus::success);
    CHECK(o.selected_mode->name == first.selected_mode->name);
    CHECK(o.qot->gsnr_db == first.qot->gsnr_db);
    CHECK(count(o.transcript, MessageType::dlm_start) == 0);
    CHECK(o.switch_commands == 2);
    CHECK(check_switch_safety(o.transcript).empty());
    CHECK_THROWS_AS(provision(small(), std::span(first.estimates).first(1)), PreconditionError);
}

TEST_CASE("both AALs measured") {
    SmallScenario s;
    s.measure_b = true;
    auto o = provision(small(s));
    CHECK(o.status == OutcomeStatus::success);
    CHECK(count(o.transcript, MessageType::dlm_result) == 2);
    REQUIRE(o.estimates.size() == 2);
    CHECK(o.estimates[1].measured);
    CHECK(check_switch_safety(o.transcript).empty());
}

TEST_CASE("disjoint catalogs stop before any switch command") {
    SmallScenario s;
    s.modes_a = "qpsk";
    s.modes_b = "16qam";
    for (std::string strategy : {"dlm", "blackbox"}) {
        s.strategy = strategy;
        auto o = run_strategy(small(s));
        CHECK(o.status == OutcomeStatus::no_common_mode);
        CHECK(o.switch_commands == 0);
        CHECK(count(o.transcript, MessageType::switch_command) == 0);
        CHECK(count(o.transcript, MessageType::error) == 2);
        CHECK_FALSE(o.selected_mode);
        CHECK(replay_transcript(o.transcript).status == OutcomeStatus::no_common_mode);
    }
}

TEST_CASE("raised noise figures select QPSK") {
    SmallScenario s;
    s.nf_db = 16.0;
    auto o = provision(small(s));
    REQUIRE(o.status == OutcomeStatus::success);
    CHECK(o.selected_mode->name == "100G-DP-QPSK");
}

TEST_CASE("no feasible mode") {
    SmallScenario s;
    s.nf_db = 30.0;
    s.modes_a = s.modes_b = "16qam";
    auto o = provision(small(s));
    CHECK(o.status == OutcomeStatus::no_feasible_mode);
    CHECK(count(o.transcript, MessageType::verification_result) == 0);
    CHECK(count(o.transcript, MessageType::mode_assignment) == 0);
    auto b = provision_blackbox(small(s));
    CHECK(b.status == OutcomeStatus::no_feasible_mode);
    CHECK(replay_transcript(b.transcript).status == OutcomeStatus::no_feasible_mode);
}

TEST_CASE("DLM failure halts before path design") {
    SmallScenario s;
    s.aal_gamma = 0.0;
    auto o = provision(small(s));
    CHECK(o.status == OutcomeStatus::dlm_failed);
    CHECK(count(o.transcript, MessageType::path_design) == 0);
    CHECK(count(o.transcript, MessageType::error) == 2);
    auto result = std::find_if(o.transcript.begin(), o.transcript.end(),
                               [](const Message& m) { return m.type == MessageType::dlm_result; });
    REQUIRE(result != o.transcript.end());
    CHECK(result->payload["ok"] == false);
    CHECK(result->payload["diagnostics"].contains("status"));
    CHECK_THROWS_AS(orchestrate_dlm(small(s)), DlmFailedError);
}

TEST_CASE("blackbox strategy") {
    SmallScenario s;
    s.strategy = "blackbox";
    auto o = run_strategy(small(s));
    REQUIRE(o.status == OutcomeStatus::success);
    CHECK(o.strategy == Strategy::blackbox);
    REQUIRE(o.qot);
    CHECK(o.qot->per_element.empty());
    CHECK(o.estimates.empty());
    CHECK(count(o.transcript, MessageType::dlm_start) == 0);
    CHECK(count(o.transcript, MessageType::path_design) == 0);
    CHECK(scan_information_flow(small(s), o).empty());
    CHECK(check_switch_safety(o.transcript).empty());
    CHECK(check_correlation(o.transcript).empty());
    auto r = replay_transcript(o.transcript);
    REQUIRE(r.selected_mode);
    CHECK(*r.selected_mode == o.selected_mode->name);

    SUBCASE("probing is cheapest first") {
        REQUIRE(o.measurements.size() == 2);
        CHECK(o.measurements[0].mode == "100G-DP-QPSK");
    }
    SUBCASE("single-mode catalog probes once") {
        SmallScenario one = s;
        one.modes_a = one.modes_b = "qpsk";
        auto single = provision_blackbox(small(one));
        CHECK(single.measurements.size() == 1);
        CHECK(count(single.transcript, MessageType::verification_result) == 1);
    }
}

TEST_CASE("strategies agree at zero design margin") {
    for (double nf : {5.0, 16.0}) {
        SmallScenario s;
        s.nf_db = nf;
        s.design_margin_db = 0.0;
        auto d = provision(small(s));
        auto b = provision_blackbox(small(s));
        REQUIRE(d.selected_mode);
        REQUIRE(b.selected_mode);
        CHECK(d.selected_mode->name == b.selected_mode->name);
    }
}

TEST_CASE("transcript checks catch planted violations") {
    const auto& o = nominal();
    const Scenario sc = small();

    SUBCASE("carrier span length sent to a customer") {
        auto leaked = o;
        leaked.transcript.push_back({MessageType::path_design, std::string(agent::controller),
                                     std::string(agent::customer_a), o.transcript[0].correlation_id,
                                     {{"span", 0.21}}});
        CHECK_FALSE(scan_information_flow(sc, leaked).empty());
    }
    SUBCASE("carrier element id sent to a customer") {
        auto leaked = o;
        leaked.transcript.push_back({MessageType::mode_assignment, std::string(agent::controller),
                                     std::string(agent::customer_b), o.transcript[0].correlation_id,
                                     {{"note", "c-amp1"}}});
        CHECK_FALSE(scan_information_flow(sc, leaked).empty());
    }
    SUBCASE("carrier-owned object with parameters") {
        auto leaked = o;
        leaked.transcript.push_back({MessageType::path_design, std::string(agent::controller),
                                     std::string(agent::customer_b), o.transcript[0].correlation_id,
                                     {{"element", {{"owner", "carrier"}, {"gain_db", 1.0}}}}});
        CHECK_FALSE(scan_information_flow(sc, leaked).empty());
    }
    SUBCASE("values sent to the carrier are not leaks") {
        auto fine = o;
        fine.transcript.push_back({MessageType::dlm_result, std::string(agent::measurement),
                                   std::string(agent::controller), o.transcript[0].correlation_id,
                                   {{"span", 0.21}}});
        CHECK(scan_information_flow(sc, fine).empty());
    }
    SUBCASE("probe after switching to the carrier link") {
        auto t = o.transcript;
        t.push_back({MessageType::dlm_start, std::string(agent::controller), std::string(agent::measurement),
                     t[0].correlation_id, {{"aal", "aal_a"}}});
        CHECK_FALSE(check_switch_safety(t).empty());
    }
    SUBCASE("verification while still at the measurement port") {
        std::vector<Message> t(o.transcript.begin(), o.transcript.begin() + 3);
        t.push_back({MessageType::verification_result, std::string(agent::customer_b), std::string(agent::controller),
                     t[0].correlation_id, {{"probe", false}}});
        CHECK_FALSE(check_switch_safety(t).empty());
    }
    SUBCASE("broken correlation chain") {
        auto t = o.transcript;
        t[3].correlation_id = "other";
        CHECK_FALSE(check_correlation(t).empty());
    }
}
