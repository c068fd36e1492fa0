#include "aal/line_model.hpp"

#include <algorithm>
#include <cmath>

#include "aal/errors.hpp"

namespace aal {

void PhysicalConstants::validate() const {
    require(ref_bandwidth_ghz > 0.0, "reference bandwidth must be positive");
    require(wavelength_nm > 0.0, "wavelength must be positive");
}

void PowerProfile::validate() const {
    require(distance_km.size() == power_dbm.size(), "profile grids differ in length");
    require(!distance_km.empty(), "profile is empty");
    require(distance_km.front() == 0.0, "profile must start at 0 km");
    for (std::size_t i = 1; i < distance_km.size(); ++i)
        require(distance_km[i] > distance_km[i - 1], "profile distance must increase strictly");
}

std::string_view to_string(Owner owner) {
    switch (owner) {
        case Owner::customer_aal_a: return "customer-AAL-A";
        case Owner::carrier: return "carrier";
        case Owner::customer_aal_b: return "customer-AAL-B";
    }
    return "?";
}

std::string_view to_string(Role role) {
    switch (role) {
        case Role::customer_a: return "customer-A";
        case Role::customer_b: return "customer-B";
        case Role::carrier: return "carrier";
        case Role::omniscient_test: return "omniscient-test";
    }
    return "?";
}

Owner owner_from_string(std::string_view text) {
    for (auto o : {Owner::customer_aal_a, Owner::carrier, Owner::customer_aal_b})
        if (text == to_string(o)) return o;
    throw PreconditionError("unknown segment owner: " + std::string(text));
}

Role role_from_string(std::string_view text) {
    for (auto r : {Role::customer_a, Role::customer_b, Role::carrier, Role::omniscient_test})
        if (text == to_string(r)) return r;
    throw PreconditionError("unknown role: " + std::string(text));
}

LinkTopology::Builder::Builder(PhysicalConstants constants, TopologyOptions options)
    : constants_(constants), options_(options) {
    constants_.validate();
}

LinkTopology::Builder& LinkTopology::Builder::fiber(std::string id, Owner owner, FiberSpan span) {
    require(std::isfinite(span.length_km) && span.length_km > 0.0,
            "fiber '" + id + "': length must be positive and finite");
    require(span.loss_db_per_km >= 0.0, "fiber '" + id + "': loss must be non-negative");
    require(span.gamma_per_w_km >= 0.0, "fiber '" + id + "': nonlinear coefficient must be non-negative");
    Segment seg{std::move(id), owner, span,
                dispersion_to_beta2(span.dispersion_ps_nm_km, constants_.wavelength_nm)};
    segments_.push_back(std::move(seg));
    return *this;
}

LinkTopology::Builder& LinkTopology::Builder::amplifier(std::string id, Owner owner, Amplifier amp) {
    require(amp.gain_db >= 0.0, "amplifier '" + id + "': gain must be non-negative");
    if (options_.enforce_nf_floor)
        require(amp.noise_figure_db >= 3.0, "amplifier '" + id + "': noise figure below 3 dB");
    segments_.push_back(Segment{std::move(id), owner, amp, 0.0});
    return *this;
}

LinkTopology::Builder& LinkTopology::Builder::append(const LinkTopology& other) {
    for (const auto& seg : other.segments()) {
        if (seg.is_fiber())
            fiber(seg.id, seg.owner, seg.fiber());
        else
            amplifier(seg.id, seg.owner, seg.amplifier());
    }
    return *this;
}

LinkTopology LinkTopology::Builder::build() const {
    std::vector<std::string> ids;
    for (const auto& s : segments_) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    require(std::adjacent_find(ids.begin(), ids.end()) == ids.end(), "segment ids must be unique");
    LinkTopology t;
    t.constants_ = constants_;
    t.segments_ = segments_;
    return t;
}

double LinkTopology::length_km() const {
    double total = 0.0;
    for (const auto& s : segments_)
        if (s.is_fiber()) total += s.fiber().length_km;
    return total;
}

double LinkTopology::accumulated_beta2_ps2() const {
    double total = 0.0;
    for (const auto& s : segments_)
        if (s.is_fiber()) total += s.beta2_ps2_per_km * s.fiber().length_km;
    return total;
}

LinkTopology LinkTopology::section(Owner owner) const {
    LinkTopology t;
    t.constants_ = constants_;
    for (const auto& s : segments_)
        if (s.owner == owner) t.segments_.push_back(s);
    return t;
}

std::vector<double> segment_input_powers(const LinkTopology& topology, double launch_power_dbm) {
    std::vector<double> powers;
    powers.reserve(topology.segments().size() + 1);
    double p = launch_power_dbm;
    for (const auto& seg : topology.segments()) {
        powers.push_back(p);
        if (seg.is_fiber())
            p -= seg.fiber().loss_db();
        else
            p += seg.amplifier().gain_db;
    }
    powers.push_back(p);
    return powers;
}

PowerProfile true_power_profile(const LinkTopology& topology, double launch_power_dbm,
                                double resolution_km) {
    require(resolution_km > 0.0, "profile resolution must be positive");

    // Segment start positions and input powers.
    const auto& segs = topology.segments();
    const auto inputs = segment_input_powers(topology, launch_power_dbm);
    const double total = topology.length_km();

    auto power_at = [&](double z) {
        // Right-continuous: amplifiers located exactly at z are already applied.
        double start = 0.0;
        double p = launch_power_dbm;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            if (segs[i].is_fiber()) {
                const auto& f = segs[i].fiber();
                const double end = start + f.length_km;
                if (z < end - 1e-9 || i + 1 == segs.size()) {
                    return inputs[i] - f.loss_db_per_km * (z - start);
                }
                start = end;
            }
            p = inputs[i + 1];
        }
        return p;
    };

    PowerProfile profile;
    const auto n = static_cast<std::size_t>(std::floor(total / resolution_km + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        const double z = static_cast<double>(i) * resolution_km;
        if (i > 0 && z > total - 1e-9) break;
        profile.distance_km.push_back(z);
    }
    if (total > 0.0) profile.distance_km.push_back(total);
    for (double z : profile.distance_km) profile.power_dbm.push_back(power_at(z));
    return profile;
}

TopologyView visible_view(const LinkTopology& topology, Role role) {
    TopologyView view;
    view.role = role;
    for (const auto& seg : topology.segments()) {
        SegmentView sv{seg.id, seg.owner, seg.is_fiber(), std::nullopt, std::nullopt};
        bool readable = false;
        bool structural = false;
        switch (role) {
            case Role::omniscient_test:
                readable = true;
                structural = true;
                break;
            case Role::carrier:
                readable = seg.owner == Owner::carrier;
                structural = true;
                break;
            case Role::customer_a:
                structural = seg.owner == Owner::customer_aal_a;
                break;
            case Role::customer_b:
                structural = seg.owner == Owner::customer_aal_b;
                break;
        }
        if (!structural) continue;
        if (readable) {
            if (seg.is_fiber())
                sv.fiber = seg.fiber();
            else
                sv.amplifier = seg.amplifier();
        }
        view.segments.push_back(std::move(sv));
    }
    return view;
}

TopologyView visible_view(const LinkTopology& topology, std::string_view role) {
    return visible_view(topology, role_from_string(role));
}

}  // namespace aal
