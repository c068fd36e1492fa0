#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "aal/dlm.hpp"
#include "aal/line_model.hpp"
#include "aal/qot.hpp"

namespace aal {

struct SegmentDecl {
    std::string id;
    LineElement element;
};

struct ModeCatalog {
    std::string owner;
    std::string vendor;
    std::string version;
    std::vector<TransceiverMode> modes;

    /// Throws PreconditionError on duplicate names or invalid modes.
    void validate() const;
};

struct ProbeConfig {
    Modulation modulation = Modulation::dp_qpsk;
    double baud_gbd = 32.0;
    std::size_t symbols = 1u << 14;
    double rolloff = 0.1;
    int oversampling = 2;
    double sim_step_km = 0.1;
    bool include_ase = false;
};

struct VerificationConfig {
    std::size_t symbols = 1u << 14;
    double sim_step_km = 0.5;
    bool include_ase = true;
};

struct MeasurementPlan {
    bool measure_aal_b = false;  // otherwise AAL B is assumed to mirror AAL A
};

struct ScenarioQot {
    double design_margin_db = 1.0;
    /// Noise figure assumed for AAL amplifiers during path design; DLM does not observe it.
    double aal_amp_nf_db = 5.0;
};

struct Seeds {
    std::uint64_t probe = 1;
    std::uint64_t noise = 2;
    std::uint64_t verification = 3;
};

enum class Strategy { dlm, blackbox };
std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view text);

struct Scenario {
    std::string name = "unnamed";
    Strategy strategy = Strategy::dlm;
    Seeds seeds;
    PhysicalConstants constants;
    TopologyOptions topology_options;
    double launch_dbm = 0.0;
    std::vector<SegmentDecl> aal_a;
    std::vector<SegmentDecl> carrier;
    std::vector<SegmentDecl> aal_b;
    ModeCatalog catalog_a{"customer-A", "", "", {}};
    ModeCatalog catalog_b{"customer-B", "", "", {}};
    DlmConfig dlm;
    LinkHypothesis hypothesis;  // length is filled per AAL unless given
    std::optional<double> hypothesis_length_km;
    ProbeConfig probe;
    VerificationConfig verification;
    MeasurementPlan measurement;
    ScenarioQot qot;
    std::optional<MarginScenario> margin;

    bool has_path() const { return !aal_a.empty() || !carrier.empty() || !aal_b.empty(); }
    LinkTopology topology() const;
    LinkTopology section(Owner owner) const;
    /// Checks the path-level rules (AALs bounded by fibers, catalogs present).
    void validate_for_provisioning() const;
};

/// Parse a YAML scenario. Unknown keys and type mismatches raise SchemaError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Derive all seeds from one value.
void apply_seed_override(Scenario& s, std::uint64_t seed);

/// Fully resolved scenario, defaults expanded.
nlohmann::json to_json(const Scenario& s);

}  // namespace aal
