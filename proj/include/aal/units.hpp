#pragma once

#include <cmath>
#include <limits>

namespace aal {

inline constexpr double kPlanck = 6.62607015e-34;       // J s
inline constexpr double kSpeedOfLight = 299792458.0;    // m/s
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

inline double db_to_linear(double db) {
    if (db == kInfinity) return kInfinity;
    return std::pow(10.0, db / 10.0);
}

inline double linear_to_db(double lin) {
    if (lin == kInfinity) return kInfinity;
    return 10.0 * std::log10(lin);
}

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }

/// Power attenuation coefficient in 1/km from a loss in dB/km.
inline double db_per_km_to_neper(double loss_db_per_km) {
    return loss_db_per_km * std::log(10.0) / 10.0;
}

/// Group velocity dispersion beta2 [ps^2/km] from D [ps/(nm km)] at the given wavelength.
inline double dispersion_to_beta2(double d_ps_nm_km, double wavelength_nm) {
    const double c_nm_per_ps = kSpeedOfLight * 1e-3;  // 1 m/s = 1e9 nm / 1e12 ps
    return -d_ps_nm_km * wavelength_nm * wavelength_nm / (2.0 * kPi * c_nm_per_ps);
}

struct PhysicalConstants {
    double wavelength_nm = 1550.0;
    double ref_bandwidth_ghz = 12.5;

    double carrier_freq_thz() const { return kSpeedOfLight / (wavelength_nm * 1e-9) * 1e-12; }
    double photon_energy_j() const { return kPlanck * carrier_freq_thz() * 1e12; }

    /// 10 log10(1 mW / (h nu B_ref)); the dB offset between launch power and ASE-limited OSNR.
    double ase_reference_db() const {
        return linear_to_db(1e-3 / (photon_energy_j() * ref_bandwidth_ghz * 1e9));
    }

    void validate() const;
};

}  // namespace aal
