#include "aal/propagation.hpp"

#include <cmath>
#include <map>
#include <random>

#include "aal/errors.hpp"
#include "aal/units.hpp"

namespace aal {

namespace {

class LinearStepper {
public:
    LinearStepper(const Fft& fft, const std::vector<double>& omega, double alpha_np, double beta2)
        : fft_(fft), omega_(omega), alpha_(alpha_np), beta2_(beta2) {}

    void apply(CVector& field, double distance_km) {
        if (distance_km <= 0.0) return;
        const auto& h = response(distance_km);
        fft_.forward(field);
        for (std::size_t k = 0; k < field.size(); ++k) field[k] *= h[k];
        fft_.inverse(field);
    }

private:
    const CVector& response(double d) {
        auto it = cache_.find(d);
        if (it != cache_.end()) return it->second;
        CVector h(omega_.size());
        const double amp = std::exp(-alpha_ / 2.0 * d);
        for (std::size_t k = 0; k < h.size(); ++k)
            h[k] = amp * std::polar(1.0, beta2_ / 2.0 * omega_[k] * omega_[k] * d);
        return cache_.emplace(d, std::move(h)).first->second;
    }

    const Fft& fft_;
    const std::vector<double>& omega_;
    double alpha_;
    double beta2_;
    std::map<double, CVector> cache_;
};

// Step lengths covering `length`: full steps plus a shorter last step for any remainder.
std::vector<double> step_grid(double length, double step) {
    std::vector<double> steps;
    const double ratio = length / step;
    auto full = static_cast<std::size_t>(std::floor(ratio + 1e-6 / step));
    for (std::size_t i = 0; i < full; ++i) steps.push_back(step);
    const double rest = length - static_cast<double>(full) * step;
    if (rest > 1e-6) steps.push_back(rest);
    if (steps.empty()) steps.push_back(length);
    return steps;
}

}  // namespace

WaveformGrid propagate(const WaveformGrid& input, const LinkTopology& segments,
                       std::optional<double> launch_power_dbm, const PropagationConfig& config,
                       std::vector<StepTrace>* trace) {
    input.validate();
    require(config.step_size_km > 0.0 && std::isfinite(config.step_size_km),
            "propagation step size must be positive");

    WaveformGrid w = input;
    if (launch_power_dbm) set_power(w, *launch_power_dbm);

    const std::size_t n = w.size();
    const Fft fft(n);
    const auto omega = Fft::angular_frequencies(n, w.sample_rate_ghz);
    const int npol = config.scalar ? 1 : kPolarizations;
    const double photon_j = segments.constants().photon_energy_j();
    std::mt19937_64 rng(config.noise_seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    double z = 0.0;
    std::vector<double> power(n);
    for (const auto& seg : segments.segments()) {
        if (!seg.is_fiber()) {
            const auto& amp = seg.amplifier();
            const double g = db_to_linear(amp.gain_db);
            const double field_gain = std::sqrt(g);
            for (int p = 0; p < npol; ++p)
                for (auto& v : w.pol[p]) v *= field_gain;
            if (config.include_ase && g > 1.0) {
                // NF h nu (G - 1) over both polarizations, white across the sample rate.
                const double psd = db_to_linear(amp.noise_figure_db) * photon_j * (g - 1.0);
                const double var_per_pol = psd * w.sample_rate_ghz * 1e9 / 2.0;
                const double sigma = std::sqrt(var_per_pol / 2.0);
                for (int p = 0; p < npol; ++p)
                    for (auto& v : w.pol[p]) v += sigma * cplx(normal(rng), normal(rng));
            }
            continue;
        }

        const auto& f = seg.fiber();
        const double alpha = db_per_km_to_neper(f.loss_db_per_km);
        const double gamma_eff = f.gamma_per_w_km * config.manakov_factor;
        std::vector<LinearStepper> linear;
        linear.reserve(npol);
        for (int p = 0; p < npol; ++p) linear.emplace_back(fft, omega, alpha, seg.beta2_ps2_per_km);

        double pending = 0.0;
        for (double h : step_grid(f.length_km, config.step_size_km)) {
            pending += h / 2.0;
            for (int p = 0; p < npol; ++p) linear[p].apply(w.pol[p], pending);
            pending = h / 2.0;

            // Exact integral of the decaying power over the step, referenced to the midpoint.
            const double h_eff = alpha > 0.0 ? 2.0 / alpha * std::sinh(alpha * h / 2.0) : h;
            for (std::size_t i = 0; i < n; ++i) {
                double s = std::norm(w.pol[0][i]);
                if (npol == 2) s += std::norm(w.pol[1][i]);
                power[i] = s;
            }
            double sum_power = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const cplx rot = std::polar(1.0, gamma_eff * power[i] * h_eff);
                for (int p = 0; p < npol; ++p) w.pol[p][i] *= rot;
                sum_power += power[i];
            }
            if (trace) {
                const double mean = sum_power / static_cast<double>(n);
                trace->push_back({z + h / 2.0, mean, gamma_eff * mean * h_eff});
            }
            z += h;
        }
        for (int p = 0; p < npol; ++p) linear[p].apply(w.pol[p], pending);
    }
    w.center_power_dbm = measured_power_dbm(w);
    return w;
}

void compensate_dispersion(WaveformGrid& w, double accumulated_beta2_ps2) {
    const std::size_t n = w.size();
    const Fft fft(n);
    const auto omega = Fft::angular_frequencies(n, w.sample_rate_ghz);
    CVector h(n);
    for (std::size_t k = 0; k < n; ++k)
        h[k] = std::polar(1.0, -accumulated_beta2_ps2 / 2.0 * omega[k] * omega[k]);
    for (auto& p : w.pol) {
        fft.forward(p);
        for (std::size_t k = 0; k < n; ++k) p[k] *= h[k];
        fft.inverse(p);
    }
}

}  // namespace aal
