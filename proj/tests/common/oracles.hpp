#pragma once

#include <cmath>
#include <complex>

// Independent reference computations shared by the unit and acceptance tests.
namespace oracle {

// Direct midpoint quadrature of the single-channel GN integral, SI units, exact span kernel.
// Returns the NLI PSD at the channel centre in W/Hz for one span.
inline double gn_quadrature(double power_w, double baud_hz, double length_m, double alpha_db_per_m,
                     double d_s_per_m2, double gamma_per_w_m, int n) {
    const double c = 299792458.0, lam = 1550e-9;
    const double beta2 = -d_s_per_m2 * lam * lam / (2.0 * M_PI * c);
    const double a = alpha_db_per_m * std::log(10.0) / 20.0;  // field attenuation
    const double g = power_w / baud_hz;
    const double df = baud_hz / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double f1 = -baud_hz / 2 + (i + 0.5) * df;
        for (int j = 0; j < n; ++j) {
            double f2 = -baud_hz / 2 + (j + 0.5) * df;
            if (std::abs(f1 + f2) >= baud_hz / 2) continue;
            double w = 4.0 * M_PI * M_PI * beta2 * f1 * f2;
            std::complex<double> denom(2.0 * a, -w);
            std::complex<double> num = 1.0 - std::exp(-2.0 * a * length_m) * std::polar(1.0, w * length_m);
            sum += std::norm(num / denom);
        }
    }
    return 16.0 / 27.0 * gamma_per_w_m * gamma_per_w_m * g * g * g * sum * df * df;
}

inline double oracle_osnr_nli_db(int spans, double launch_dbm, double baud_gbd, double length_km, int n = 1200) {
    double p = 1e-3 * std::pow(10.0, launch_dbm / 10.0);
    double psd = spans * gn_quadrature(p, baud_gbd * 1e9, length_km * 1e3, 0.2e-3, 17e-6, 1.3e-3, n);
    return 10.0 * std::log10(p / (psd * 12.5e9));
}

inline double ase_constant_db() {
    const double h = 6.62607015e-34, nu = 299792458.0 / 1550e-9;
    return 10.0 * std::log10(1e-3 / (h * nu * 12.5e9));
}

}  // namespace oracle
