#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "aal/errors.hpp"
#include "aal/qot.hpp"

namespace aal {

double inverse_tangent_integral(double x) {
    if (x < 0.0) return -inverse_tangent_integral(-x);
    if (x == 0.0) return 0.0;
    if (x > 1.0) return inverse_tangent_integral(1.0 / x) + 0.5 * kPi * std::log(x);
    auto f = [](double t) { return t == 0.0 ? 1.0 : std::atan(t) / t; };
    return boost::math::quadrature::gauss<double, 30>::integrate(f, 0.0, x);
}

namespace {

// int over the hexagon |f1|,|f2|,|f1+f2| < B/2 of 1/(c^2 + k^2 f1^2 f2^2):
// square part exactly, minus the two corner triangles by a 3-point rule
double hexagon_kernel(double c, double k, double bw) {
    double square = 4.0 / (c * k) * inverse_tangent_integral(k * bw * bw / (4.0 * c));
    const double x = bw / 2.0;
    const std::array<std::array<double, 2>, 3> v{{{x, 0.0}, {0.0, x}, {x, x}}};
    const std::array<std::array<double, 3>, 3> bary{{{2.0 / 3, 1.0 / 6, 1.0 / 6},
                                                     {1.0 / 6, 2.0 / 3, 1.0 / 6},
                                                     {1.0 / 6, 1.0 / 6, 2.0 / 3}}};
    double mean = 0.0;
    for (const auto& w : bary) {
        double f1 = w[0] * v[0][0] + w[1] * v[1][0] + w[2] * v[2][0];
        double f2 = w[0] * v[0][1] + w[1] * v[1][1] + w[2] * v[2][1];
        double u = f1 * f2;
        mean += 1.0 / (3.0 * (c * c + k * k * u * u));
    }
    return square - 2.0 * (bw * bw / 8.0) * mean;
}

}  // namespace

double gn_nli_psd(const NliSpan& span, double baud_gbd, double wavelength_nm) {
    require(std::isfinite(span.launch_dbm), "NLI span launch power must be finite");
    require(span.length_km > 0.0, "NLI span length must be positive");
    require(span.loss_db_per_km >= 0.0, "NLI span loss must be non-negative");
    require(baud_gbd > 0.0, "baud must be positive");
    require(span.gamma_per_w_km >= 0.0, "gamma must be non-negative");
    if (span.dispersion_ps_nm_km == 0.0)
        throw PreconditionError("GN closed form is singular at zero dispersion");
    if (span.gamma_per_w_km == 0.0) return 0.0;

    const double beta2 = dispersion_to_beta2(span.dispersion_ps_nm_km, wavelength_nm);
    const double k = 4.0 * kPi * kPi * std::abs(beta2);
    const double bw = baud_gbd * 1e-3;
    const double big_a = db_per_km_to_neper(span.loss_db_per_km);
    const double len = span.length_km;
    const double b = 1.0 / len;
    const double rho = std::exp(-big_a * len);
    const double g = dbm_to_watt(span.launch_dbm) / bw;

    auto weighted = [&](double c) { return c * c * hexagon_kernel(c, k, bw); };
    double bracket;
    if (big_a == 0.0) {
        bracket = 2.0 * hexagon_kernel(b, k, bw);
    } else {
        double first = (1.0 - rho) * (1.0 - rho) * hexagon_kernel(big_a, k, bw);
        double a2 = big_a * big_a, b2 = b * b;
        double diff;
        if (std::abs(a2 - b2) < 1e-6 * b2) {
            const double eps = 1e-4;
            double cp = std::sqrt(a2 * (1.0 + eps)), cm = std::sqrt(a2 * (1.0 - eps));
            diff = (weighted(cp) - weighted(cm)) / (2.0 * eps * a2);
        } else {
            diff = (weighted(big_a) - weighted(b)) / (a2 - b2);
        }
        bracket = first + 2.0 * rho * diff;
    }
    const double gamma = span.gamma_per_w_km;
    return 16.0 / 27.0 * gamma * gamma * g * g * g * bracket;
}

double span_osnr_nli(const NliSpan& span, double baud_gbd, const PhysicalConstants& c) {
    double psd = gn_nli_psd(span, baud_gbd, c.wavelength_nm);
    if (psd <= 0.0) return kInfinity;
    double bref_thz = c.ref_bandwidth_ghz * 1e-3;
    return linear_to_db(dbm_to_watt(span.launch_dbm) / (psd * bref_thz));
}

double osnr_nli(std::span<const NliSpan> spans, double baud_gbd, const PhysicalConstants& c) {
    require(!spans.empty(), "osnr_nli needs at least one span");
    std::vector<double> parts;
    parts.reserve(spans.size());
    for (const auto& s : spans) parts.push_back(span_osnr_nli(s, baud_gbd, c));
    return inverse_sum_db(parts);
}

}  // namespace aal
