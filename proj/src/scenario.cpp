#include "aal/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include <yaml-cpp/yaml.h>

#include "aal/errors.hpp"
#include "aal/json_io.hpp"

namespace aal {

std::string_view to_string(Strategy s) { return s == Strategy::dlm ? "dlm" : "blackbox"; }

Strategy strategy_from_string(std::string_view text) {
    if (text == "dlm") return Strategy::dlm;
    if (text == "blackbox") return Strategy::blackbox;
    throw PreconditionError("unknown strategy '" + std::string(text) + "'");
}

void ModeCatalog::validate() const {
    std::set<std::string> names;
    for (const auto& m : modes) {
        m.validate();
        require(names.insert(m.name).second, "catalog of " + owner + " repeats mode name " + m.name);
    }
}

namespace {

// Map node reader that remembers which keys were used so leftovers can be reported.
class Fields {
public:
    Fields(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.IsMap()) fail("expected a mapping");
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return static_cast<bool>(node_[key]);
    }

    YAML::Node get(const std::string& key) {
        used_.insert(key);
        return node_[key];
    }

    YAML::Node need(const std::string& key) {
        auto n = get(key);
        if (!n) fail("missing required key '" + key + "'");
        return n;
    }

    std::string sub(const std::string& key) const { return path_ + "." + key; }

    template <class T>
    void read(const std::string& key, T& out) {
        if (auto n = get(key)) out = convert<T>(n, sub(key));
    }

    void read_db(const std::string& key, double& out) {
        if (auto n = get(key)) out = to_double_inf(n, sub(key));
    }

    void finish() const {
        for (const auto& kv : node_) {
            auto k = kv.first.as<std::string>();
            if (!used_.count(k)) throw SchemaError(path_ + ": unknown key '" + k + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_ + ": " + what); }

    template <class T>
    static T convert(const YAML::Node& n, const std::string& where) {
        if (!n.IsScalar()) throw SchemaError(where + ": expected a scalar");
        try {
            if constexpr (std::is_same_v<T, double>) {
                double v = n.as<double>();
                if (!std::isfinite(v)) throw SchemaError(where + ": expected a finite number");
                return v;
            } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t> ||
                                 std::is_same_v<T, int>) {
                // reject fractional values silently truncated by yaml-cpp
                auto text = n.Scalar();
                if (text.find_first_of(".eE") != std::string::npos && text.find("0x") != 0)
                    throw SchemaError(where + ": expected an integer");
                return n.as<T>();
            } else {
                return n.as<T>();
            }
        } catch (const YAML::BadConversion&) {
            throw SchemaError(where + ": cannot read '" + n.Scalar() + "'");
        }
    }

    static double to_double_inf(const YAML::Node& n, const std::string& where) {
        if (!n.IsScalar()) throw SchemaError(where + ": expected a scalar");
        const auto& t = n.Scalar();
        if (t == "inf" || t == ".inf" || t == "+inf" || t == "Infinity") return kInfinity;
        try {
            double v = n.as<double>();
            if (std::isnan(v)) throw SchemaError(where + ": NaN is not allowed");
            return v;
        } catch (const YAML::BadConversion&) {
            throw SchemaError(where + ": cannot read '" + t + "'");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> used_;
};

template <class Fn>
auto checked(const std::string& where, Fn&& fn) {
    try {
        return fn();
    } catch (const PreconditionError& e) {
        throw SchemaError(where + ": " + e.what());
    }
}

std::vector<SegmentDecl> read_segments(const YAML::Node& n, const std::string& path) {
    std::vector<SegmentDecl> out;
    if (!n) return out;
    if (!n.IsSequence()) throw SchemaError(path + ": expected a list of segments");
    for (std::size_t i = 0; i < n.size(); ++i) {
        const std::string here = path + "[" + std::to_string(i) + "]";
        Fields item(n[i], here);
        bool is_fiber = item.has("fiber");
        bool is_amp = item.has("amplifier");
        if (is_fiber == is_amp) item.fail("each segment is exactly one of 'fiber' or 'amplifier'");
        item.finish();
        if (is_fiber) {
            Fields f(n[i]["fiber"], here + ".fiber");
            FiberSpan s;
            SegmentDecl d;
            d.id = Fields::convert<std::string>(f.need("id"), f.sub("id"));
            s.length_km = Fields::convert<double>(f.need("length_km"), f.sub("length_km"));
            f.read("loss_db_per_km", s.loss_db_per_km);
            f.read("dispersion_ps_nm_km", s.dispersion_ps_nm_km);
            f.read("gamma_per_w_km", s.gamma_per_w_km);
            f.read("effective_area_note", s.effective_area_note);
            f.finish();
            d.element = s;
            out.push_back(std::move(d));
        } else {
            Fields f(n[i]["amplifier"], here + ".amplifier");
            Amplifier a;
            SegmentDecl d;
            d.id = Fields::convert<std::string>(f.need("id"), f.sub("id"));
            a.gain_db = Fields::convert<double>(f.need("gain_db"), f.sub("gain_db"));
            f.read("noise_figure_db", a.noise_figure_db);
            f.finish();
            d.element = a;
            out.push_back(std::move(d));
        }
    }
    return out;
}

TransceiverMode read_mode(const YAML::Node& n, const std::string& path) {
    Fields f(n, path);
    TransceiverMode m;
    m.name = Fields::convert<std::string>(f.need("name"), f.sub("name"));
    m.bitrate_gbps = Fields::convert<double>(f.need("bitrate_gbps"), f.sub("bitrate_gbps"));
    auto mod = Fields::convert<std::string>(f.need("modulation"), f.sub("modulation"));
    m.modulation = checked(f.sub("modulation"), [&] { return modulation_from_string(mod); });
    m.baud_gbd = Fields::convert<double>(f.need("baud_gbd"), f.sub("baud_gbd"));
    f.read("fec", m.fec);
    m.prefec_ber_threshold = Fields::convert<double>(f.need("prefec_ber_threshold"), f.sub("prefec_ber_threshold"));
    f.read_db("tx_osnr_db", m.tx_osnr_db);
    f.read("min_launch_dbm", m.min_launch_dbm);
    f.read("max_launch_dbm", m.max_launch_dbm);
    f.read("rolloff", m.rolloff);
    f.finish();
    return m;
}

ModeCatalog read_catalog(const YAML::Node& n, const std::string& path, const std::string& owner) {
    Fields f(n, path);
    ModeCatalog c;
    c.owner = owner;
    f.read("vendor", c.vendor);
    f.read("version", c.version);
    auto modes = f.need("modes");
    if (!modes.IsSequence()) f.fail("'modes' must be a list");
    for (std::size_t i = 0; i < modes.size(); ++i)
        c.modes.push_back(read_mode(modes[i], f.sub("modes") + "[" + std::to_string(i) + "]"));
    f.finish();
    checked(path, [&] {
        c.validate();
        return 0;
    });
    return c;
}

MarginScenario read_margin(const YAML::Node& n, const std::string& path, const PhysicalConstants& c) {
    Fields f(n, path);
    MarginScenario m;
    m.constants = c;
    f.read("min_spans", m.min_spans);
    f.read("max_spans", m.max_spans);
    f.read("launch_dbm", m.launch_dbm);
    f.read("span_loss_db", m.span_loss_db);
    f.read("extra_loss_db", m.extra_loss_db);
    f.read("noise_figure_db", m.noise_figure_db);
    f.read("baud_gbd", m.baud_gbd);
    if (auto tx = f.get("tx_osnr_db")) {
        if (!tx.IsSequence()) f.fail("'tx_osnr_db' must be a list");
        m.tx_osnr_db.clear();
        for (std::size_t i = 0; i < tx.size(); ++i)
            m.tx_osnr_db.push_back(Fields::to_double_inf(tx[i], f.sub("tx_osnr_db")));
    }
    f.finish();
    if (m.min_spans < 1 || m.max_spans < m.min_spans) f.fail("span range must satisfy 1 <= min_spans <= max_spans");
    if (m.tx_osnr_db.empty()) f.fail("'tx_osnr_db' must not be empty");
    if (m.extra_loss_db < 0.0) f.fail("'extra_loss_db' must be non-negative");
    return m;
}

void validate_section(const std::vector<SegmentDecl>& segs, const std::string& name) {
    if (segs.empty()) return;
    if (!std::holds_alternative<FiberSpan>(segs.front().element) ||
        !std::holds_alternative<FiberSpan>(segs.back().element))
        throw SchemaError("topology." + name + " must begin and end with a fiber");
}

}  // namespace

LinkTopology Scenario::section(Owner owner) const {
    LinkTopology::Builder b(constants, topology_options);
    const auto& segs = owner == Owner::customer_aal_a ? aal_a : owner == Owner::carrier ? carrier : aal_b;
    for (const auto& s : segs) {
        if (std::holds_alternative<FiberSpan>(s.element))
            b.fiber(s.id, owner, std::get<FiberSpan>(s.element));
        else
            b.amplifier(s.id, owner, std::get<Amplifier>(s.element));
    }
    return b.build();
}

LinkTopology Scenario::topology() const {
    return LinkTopology::Builder(constants, topology_options)
        .append(section(Owner::customer_aal_a))
        .append(section(Owner::carrier))
        .append(section(Owner::customer_aal_b))
        .build();
}

void Scenario::validate_for_provisioning() const {
    if (aal_a.empty() || aal_b.empty()) throw SchemaError("provisioning needs topology.aal_a and topology.aal_b");
    validate_section(aal_a, "aal_a");
    validate_section(aal_b, "aal_b");
    if (catalog_a.modes.empty() || catalog_b.modes.empty())
        throw SchemaError("provisioning needs catalogs for customer_a and customer_b");
    checked("topology", [&] { return topology(); });
}

Scenario parse_scenario(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw SchemaError(std::string("scenario is not valid YAML: ") + e.what());
    }
    if (!root || root.IsNull()) throw SchemaError("scenario is empty");
    Fields f(root, "scenario");
    Scenario s;
    f.read("name", s.name);
    if (auto n = f.get("strategy"))
        s.strategy = checked("scenario.strategy", [&] { return strategy_from_string(Fields::convert<std::string>(n, "scenario.strategy")); });
    if (auto n = f.get("seeds")) {
        Fields g(n, "scenario.seeds");
        g.read("probe", s.seeds.probe);
        g.read("noise", s.seeds.noise);
        g.read("verification", s.seeds.verification);
        g.finish();
    }
    if (auto n = f.get("constants")) {
        Fields g(n, "scenario.constants");
        g.read("wavelength_nm", s.constants.wavelength_nm);
        g.read("ref_bandwidth_ghz", s.constants.ref_bandwidth_ghz);
        g.finish();
        checked("scenario.constants", [&] {
            s.constants.validate();
            return 0;
        });
    }
    f.read("enforce_nf_floor", s.topology_options.enforce_nf_floor);
    f.read("launch_dbm", s.launch_dbm);

    if (auto n = f.get("topology")) {
        Fields g(n, "scenario.topology");
        s.aal_a = read_segments(g.get("aal_a"), g.sub("aal_a"));
        s.carrier = read_segments(g.get("carrier"), g.sub("carrier"));
        s.aal_b = read_segments(g.get("aal_b"), g.sub("aal_b"));
        g.finish();
        checked("scenario.topology", [&] { return s.topology(); });
    }
    if (auto n = f.get("catalogs")) {
        Fields g(n, "scenario.catalogs");
        if (auto a = g.get("customer_a")) s.catalog_a = read_catalog(a, g.sub("customer_a"), "customer-A");
        if (auto b = g.get("customer_b")) s.catalog_b = read_catalog(b, g.sub("customer_b"), "customer-B");
        g.finish();
    }

    s.dlm.initial_power_dbm = s.launch_dbm;
    if (auto n = f.get("dlm")) {
        Fields g(n, "scenario.dlm");
        auto& d = s.dlm;
        g.read("step_size_km", d.step_size_km);
        g.read("iterations", d.iterations);
        g.read("learning_rate", d.learning_rate);
        g.read("amp_jump_threshold_db", d.amp_jump_threshold_db);
        if (auto r = g.get("tx_reference"))
            d.tx_reference = checked(g.sub("tx_reference"), [&] { return tx_reference_from_string(Fields::convert<std::string>(r, g.sub("tx_reference"))); });
        if (auto r = g.get("direction"))
            d.direction = checked(g.sub("direction"), [&] { return learning_direction_from_string(Fields::convert<std::string>(r, g.sub("direction"))); });
        bool disclosed = true;
        g.read("launch_disclosed", disclosed);
        if (!disclosed) d.initial_power_dbm.reset();
        if (auto r = g.get("initial_power_dbm")) d.initial_power_dbm = Fields::convert<double>(r, g.sub("initial_power_dbm"));
        g.read("backoff", d.backoff);
        g.read("growth", d.growth);
        g.read("patience", d.patience);
        g.read("min_signature", d.min_signature);
        g.read("fit_guard_km", d.fit_guard_km);
        g.read("measure_aal_b", s.measurement.measure_aal_b);
        if (auto h = g.get("hypothesis")) {
            Fields hy(h, g.sub("hypothesis"));
            if (auto l = hy.get("length_km")) s.hypothesis_length_km = Fields::convert<double>(l, hy.sub("length_km"));
            hy.read("dispersion_ps_nm_km", s.hypothesis.dispersion_ps_nm_km);
            hy.read("gamma_per_w_km", s.hypothesis.gamma_per_w_km);
            hy.finish();
        }
        g.finish();
        checked("scenario.dlm", [&] {
            d.validate();
            return 0;
        });
    }
    s.hypothesis.wavelength_nm = s.constants.wavelength_nm;

    if (auto n = f.get("probe")) {
        Fields g(n, "scenario.probe");
        auto& p = s.probe;
        if (auto m = g.get("modulation"))
            p.modulation = checked(g.sub("modulation"), [&] { return modulation_from_string(Fields::convert<std::string>(m, g.sub("modulation"))); });
        g.read("baud_gbd", p.baud_gbd);
        g.read("symbols", p.symbols);
        g.read("rolloff", p.rolloff);
        g.read("oversampling", p.oversampling);
        g.read("sim_step_km", p.sim_step_km);
        g.read("include_ase", p.include_ase);
        g.finish();
        if (p.symbols < 64) g.fail("'symbols' must be at least 64");
        if (p.oversampling < 2) g.fail("'oversampling' must be at least 2");
        if (!(p.sim_step_km > 0.0)) g.fail("'sim_step_km' must be positive");
        if (!(p.baud_gbd > 0.0)) g.fail("'baud_gbd' must be positive");
        if (p.rolloff < 0.0 || p.rolloff > 1.0) g.fail("'rolloff' must lie in [0, 1]");
    }
    if (auto n = f.get("verification")) {
        Fields g(n, "scenario.verification");
        g.read("symbols", s.verification.symbols);
        g.read("sim_step_km", s.verification.sim_step_km);
        g.read("include_ase", s.verification.include_ase);
        g.finish();
        if (s.verification.symbols < 64) g.fail("'symbols' must be at least 64");
        if (!(s.verification.sim_step_km > 0.0)) g.fail("'sim_step_km' must be positive");
    }
    if (auto n = f.get("qot")) {
        Fields g(n, "scenario.qot");
        g.read("design_margin_db", s.qot.design_margin_db);
        g.read("aal_amp_nf_db", s.qot.aal_amp_nf_db);
        g.finish();
        if (s.qot.design_margin_db < 0.0) g.fail("'design_margin_db' must be non-negative");
    }
    if (auto n = f.get("margin")) s.margin = read_margin(n, "scenario.margin", s.constants);
    f.finish();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read scenario " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

void apply_seed_override(Scenario& s, std::uint64_t seed) {
    s.seeds.probe = seed;
    s.seeds.noise = seed + 1;
    s.seeds.verification = seed + 2;
}

namespace {

nlohmann::json segments_json(const std::vector<SegmentDecl>& segs) {
    auto out = nlohmann::json::array();
    for (const auto& d : segs) {
        nlohmann::json body;
        if (std::holds_alternative<FiberSpan>(d.element)) {
            body = std::get<FiberSpan>(d.element);
            body["id"] = d.id;
            out.push_back({{"fiber", body}});
        } else {
            body = std::get<Amplifier>(d.element);
            body["id"] = d.id;
            out.push_back({{"amplifier", body}});
        }
    }
    return out;
}

nlohmann::json catalog_json(const ModeCatalog& c) {
    return {{"owner", c.owner}, {"vendor", c.vendor}, {"version", c.version}, {"modes", c.modes}};
}

}  // namespace

nlohmann::json to_json(const Scenario& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["strategy"] = std::string(to_string(s.strategy));
    j["seeds"] = {{"probe", s.seeds.probe}, {"noise", s.seeds.noise}, {"verification", s.seeds.verification}};
    j["constants"] = {{"wavelength_nm", s.constants.wavelength_nm}, {"ref_bandwidth_ghz", s.constants.ref_bandwidth_ghz}};
    j["enforce_nf_floor"] = s.topology_options.enforce_nf_floor;
    j["launch_dbm"] = s.launch_dbm;
    j["topology"] = {{"aal_a", segments_json(s.aal_a)}, {"carrier", segments_json(s.carrier)}, {"aal_b", segments_json(s.aal_b)}};
    j["catalogs"] = {{"customer_a", catalog_json(s.catalog_a)}, {"customer_b", catalog_json(s.catalog_b)}};
    const auto& d = s.dlm;
    j["dlm"] = {{"step_size_km", d.step_size_km},
                {"iterations", d.iterations},
                {"learning_rate", d.learning_rate},
                {"amp_jump_threshold_db", d.amp_jump_threshold_db},
                {"tx_reference", std::string(to_string(d.tx_reference))},
                {"direction", std::string(to_string(d.direction))},
                {"initial_power_dbm", d.initial_power_dbm ? nlohmann::json(*d.initial_power_dbm) : nlohmann::json(nullptr)},
                {"backoff", d.backoff},
                {"growth", d.growth},
                {"patience", d.patience},
                {"min_signature", d.min_signature},
                {"fit_guard_km", d.fit_guard_km},
                {"measure_aal_b", s.measurement.measure_aal_b},
                {"hypothesis",
                 {{"length_km", s.hypothesis_length_km ? nlohmann::json(*s.hypothesis_length_km) : nlohmann::json("per-AAL fiber length")},
                  {"dispersion_ps_nm_km", s.hypothesis.dispersion_ps_nm_km},
                  {"gamma_per_w_km", s.hypothesis.gamma_per_w_km}}}};
    const auto& p = s.probe;
    j["probe"] = {{"modulation", std::string(to_string(p.modulation))},
                  {"baud_gbd", p.baud_gbd},
                  {"symbols", p.symbols},
                  {"rolloff", p.rolloff},
                  {"oversampling", p.oversampling},
                  {"sim_step_km", p.sim_step_km},
                  {"include_ase", p.include_ase}};
    j["verification"] = {{"symbols", s.verification.symbols},
                         {"sim_step_km", s.verification.sim_step_km},
                         {"include_ase", s.verification.include_ase}};
    j["qot"] = {{"design_margin_db", s.qot.design_margin_db},
                {"aal_amp_nf_db", s.qot.aal_amp_nf_db},
                {"ref_bandwidth_ghz", s.constants.ref_bandwidth_ghz},
                {"required_gsnr_model", "analytic AWGN BER of the constellation (stand-in for measured back-to-back curves)"}};
    if (s.margin) {
        const auto& m = *s.margin;
        auto tx = nlohmann::json::array();
        for (double v : m.tx_osnr_db) tx.push_back(number_or_inf(v));
        j["margin"] = {{"min_spans", m.min_spans},
                       {"max_spans", m.max_spans},
                       {"launch_dbm", m.launch_dbm},
                       {"span_loss_db", m.span_loss_db},
                       {"extra_loss_db", m.extra_loss_db},
                       {"noise_figure_db", m.noise_figure_db},
                       {"tx_osnr_db", tx},
                       {"baud_gbd", m.baud_gbd}};
    }
    return j;
}

}  // namespace aal
