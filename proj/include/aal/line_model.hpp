#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aal/profile.hpp"
#include "aal/units.hpp"

namespace aal {

struct FiberSpan {
    double length_km = 0.0;
    double loss_db_per_km = 0.2;
    double dispersion_ps_nm_km = 17.0;
    double gamma_per_w_km = 1.3;
    std::string effective_area_note;

    double loss_db() const { return length_km * loss_db_per_km; }
    bool operator==(const FiberSpan&) const = default;
};

struct Amplifier {
    double gain_db = 0.0;
    double noise_figure_db = 5.0;

    bool operator==(const Amplifier&) const = default;
};

enum class Owner { customer_aal_a, carrier, customer_aal_b };
enum class Role { customer_a, customer_b, carrier, omniscient_test };

std::string_view to_string(Owner owner);
std::string_view to_string(Role role);
Owner owner_from_string(std::string_view text);
/// Throws PreconditionError for names outside {customer-A, customer-B, carrier, omniscient-test}.
Role role_from_string(std::string_view text);

using LineElement = std::variant<FiberSpan, Amplifier>;

struct Segment {
    std::string id;
    Owner owner = Owner::carrier;
    LineElement element;
    double beta2_ps2_per_km = 0.0;  // fibers only, derived at build time

    bool is_fiber() const { return std::holds_alternative<FiberSpan>(element); }
    const FiberSpan& fiber() const { return std::get<FiberSpan>(element); }
    const Amplifier& amplifier() const { return std::get<Amplifier>(element); }
};

struct TopologyOptions {
    bool enforce_nf_floor = true;  // noise figure >= 3 dB
};

/// The physical line system. Immutable once built.
class LinkTopology {
public:
    class Builder {
    public:
        explicit Builder(PhysicalConstants constants = {}, TopologyOptions options = {});
        Builder& fiber(std::string id, Owner owner, FiberSpan span);
        Builder& amplifier(std::string id, Owner owner, Amplifier amp);
        Builder& append(const LinkTopology& other);
        LinkTopology build() const;

    private:
        PhysicalConstants constants_;
        TopologyOptions options_;
        std::vector<Segment> segments_;
    };

    LinkTopology() = default;

    const std::vector<Segment>& segments() const { return segments_; }
    const PhysicalConstants& constants() const { return constants_; }
    double length_km() const;
    /// Sum of beta2 * L over all fibers [ps^2].
    double accumulated_beta2_ps2() const;
    bool empty() const { return segments_.empty(); }

    /// Segments owned by `owner`, in order, as a standalone topology.
    LinkTopology section(Owner owner) const;

private:
    PhysicalConstants constants_;
    std::vector<Segment> segments_;
};

/// Signal power (dBm) at the input of every segment plus the final output, given the launch power.
std::vector<double> segment_input_powers(const LinkTopology& topology, double launch_power_dbm);

/// Ground-truth power profile: linear in dB along fibers, right-continuous steps at amplifiers.
PowerProfile true_power_profile(const LinkTopology& topology, double launch_power_dbm,
                                double resolution_km);

struct SegmentView {
    std::string id;
    Owner owner = Owner::carrier;
    bool is_fiber = true;
    std::optional<FiberSpan> fiber;
    std::optional<Amplifier> amplifier;

    bool masked() const { return !fiber && !amplifier; }
    bool operator==(const SegmentView&) const = default;
};

struct TopologyView {
    Role role = Role::omniscient_test;
    std::vector<SegmentView> segments;
};

/// Role-filtered copy of the topology. Carriers read carrier segments; AAL parameters stay
/// masked for everyone; customers see only the structure of their own AAL.
TopologyView visible_view(const LinkTopology& topology, Role role);
TopologyView visible_view(const LinkTopology& topology, std::string_view role);

}  // namespace aal
