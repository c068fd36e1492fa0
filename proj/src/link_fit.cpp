#include <cmath>
#include <string>

#include "aal/dlm.hpp"
#include "aal/errors.hpp"

namespace aal {

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double at(double z) const { return intercept + slope * z; }
};

Line least_squares(const std::vector<double>& z, const std::vector<double>& p) {
    const double n = static_cast<double>(z.size());
    double sz = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        sz += z[i];
        sp += p[i];
    }
    const double mz = sz / n, mp = sp / n;
    double szz = 0.0, szp = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        szz += (z[i] - mz) * (z[i] - mz);
        szp += (z[i] - mz) * (p[i] - mp);
    }
    Line line;
    line.slope = szp / szz;
    line.intercept = mp - line.slope * mz;
    return line;
}

// Maximal run of rising samples [first, last] (point indices) whose net rise marks an amplifier.
struct Rise {
    std::size_t first;
    std::size_t last;
};

}  // namespace

LinkFit fit_link_parameters(const PowerProfile& profile, const FitConfig& config) {
    profile.validate();
    require(config.amp_jump_threshold_db > 0.0, "amplifier jump threshold must be positive");
    require(config.guard_km >= 0.0, "fit guard must be non-negative");
    const auto& z = profile.distance_km;
    const auto& p = profile.power_dbm;
    const std::size_t n = z.size();
    require(n >= 3, "no detectable spans: profile has fewer than 3 points");

    // An ideal amplifier is a single-step rise; an estimated one is smeared over several steps,
    // so the whole rising run is measured against the threshold.
    std::vector<Rise> rises;
    for (std::size_t i = 0; i + 1 < n;) {
        if (p[i + 1] <= p[i]) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j + 1 < n && p[j + 1] > p[j]) ++j;
        if (p[j] - p[i] > config.amp_jump_threshold_db) rises.push_back({i, j});
        i = j;
    }
    for (const auto& r : rises)
        require(r.first > 0 && r.last < n - 1, "amplifier jump at the link boundary");

    // Fit windows between rises, keeping `guard_km` clear of every rise.
    const std::size_t spans = rises.size() + 1;
    std::vector<Line> lines;
    for (std::size_t s = 0; s < spans; ++s) {
        const double lo = s == 0 ? -1.0 : z[rises[s - 1].last] + config.guard_km;
        const double hi = s + 1 == spans ? z.back() + 1.0 : z[rises[s].first] - config.guard_km;
        std::vector<double> zs, ps;
        for (std::size_t i = 0; i < n; ++i) {
            const bool after_prev = s == 0 ? true : (i > rises[s - 1].last && z[i] >= lo);
            const bool before_next = s + 1 == spans ? true : (i < rises[s].first && z[i] <= hi);
            if (after_prev && before_next) {
                zs.push_back(z[i]);
                ps.push_back(p[i]);
            }
        }
        require(zs.size() >= 3, "span " + std::to_string(s + 1) + " has fewer than 3 usable points");
        lines.push_back(least_squares(zs, ps));
    }

    // Amplifier position: first point of the rise at or above the midpoint of the two lines.
    LinkFit fit;
    std::vector<double> bounds{0.0};
    for (std::size_t a = 0; a < rises.size(); ++a) {
        double pos = z[rises[a].last];
        for (std::size_t j = rises[a].first + 1; j <= rises[a].last; ++j) {
            const double mid = 0.5 * (lines[a].at(z[j]) + lines[a + 1].at(z[j]));
            if (p[j] >= mid) {
                pos = z[j];
                break;
            }
        }
        bounds.push_back(pos);
        fit.amplifiers.push_back({pos, lines[a + 1].at(pos) - lines[a].at(pos)});
    }
    bounds.push_back(z.back());
    for (std::size_t s = 0; s < spans; ++s)
        fit.spans.push_back({bounds[s], bounds[s + 1], std::max(0.0, -lines[s].slope),
                             lines[s].at(bounds[s])});
    return fit;
}

}  // namespace aal
