#pragma once

#include <vector>

namespace aal {

/// Optical power versus distance along a link.
struct PowerProfile {
    std::vector<double> distance_km;
    std::vector<double> power_dbm;

    std::size_t size() const { return distance_km.size(); }
    double length_km() const { return distance_km.empty() ? 0.0 : distance_km.back(); }

    /// Throws PreconditionError unless the grids match and distance increases strictly from 0.
    void validate() const;
};

}  // namespace aal
