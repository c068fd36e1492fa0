#include "aal/dlm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aal/errors.hpp"
#include "aal/propagation.hpp"
#include "aal/units.hpp"

namespace aal {

std::string_view to_string(TxReference r) {
    return r == TxReference::genie ? "genie" : "decision-directed";
}

TxReference tx_reference_from_string(std::string_view text) {
    if (text == "genie") return TxReference::genie;
    if (text == "decision-directed") return TxReference::decision_directed;
    throw PreconditionError("unknown tx reference mode: " + std::string(text));
}

std::string_view to_string(LearningDirection d) {
    return d == LearningDirection::backward ? "backward" : "forward";
}

LearningDirection learning_direction_from_string(std::string_view text) {
    if (text == "backward") return LearningDirection::backward;
    if (text == "forward") return LearningDirection::forward;
    throw PreconditionError("unknown learning direction: " + std::string(text));
}

std::string_view to_string(DlmStatus s) {
    switch (s) {
        case DlmStatus::converged: return "converged";
        case DlmStatus::no_nonlinear_signature: return "no-nonlinear-signature";
        case DlmStatus::stalled: return "stalled";
    }
    return "?";
}

void DlmConfig::validate() const {
    require(step_size_km > 0.0, "DLM step size must be positive");
    require(iterations >= 1, "DLM needs at least one iteration");
    require(learning_rate > 0.0, "DLM learning rate must be positive");
    require(amp_jump_threshold_db > 0.0, "amplifier jump threshold must be positive");
    require(backoff > 0.0 && backoff < 1.0, "learning-rate backoff must lie in (0, 1)");
    require(growth >= 1.0, "learning-rate growth must be >= 1");
    require(patience >= 1, "patience must be >= 1");
    require(fit_guard_km >= 0.0, "fit guard must be non-negative");
}

namespace {

std::array<CVector, kPolarizations> normalized(const WaveformGrid& w) {
    const double scale = 1.0 / std::sqrt(w.mean_power_w());
    auto out = w.pol;
    for (auto& p : out)
        for (auto& v : p) v *= scale;
    return out;
}

}  // namespace

LearnableSsfm::LearnableSsfm(const WaveformGrid& tx_ref, const WaveformGrid& rx,
                             const LinkHypothesis& link, double step_size_km,
                             LearningDirection direction)
    : direction_(direction), fft_(rx.size()), sample_rate_ghz_(rx.sample_rate_ghz), baud_gbd_(rx.baud_gbd) {
    tx_ref.validate();
    rx.validate();
    require(tx_ref.size() == rx.size(), "tx reference and rx differ in length");
    require(std::abs(tx_ref.sample_rate_ghz - rx.sample_rate_ghz) < 1e-9,
            "tx reference and rx differ in sample rate");
    require(link.length_km > 0.0, "hypothesis length must be positive");
    require(step_size_km > 0.0, "DLM step size must be positive");

    const auto steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(link.length_km / step_size_km)));
    const double h = link.length_km / static_cast<double>(steps);
    for (std::size_t k = 0; k <= steps; ++k) {
        positions_.push_back(static_cast<double>(k) * h);
        weights_.push_back(k == 0 || k == steps ? h / 2.0 : h);
    }
    gamma_eff_ = link.gamma_per_w_km * kManakovFactor;

    const double beta2 = dispersion_to_beta2(link.dispersion_ps_nm_km, link.wavelength_nm);
    const auto omega = Fft::angular_frequencies(rx.size(), rx.sample_rate_ghz);
    step_response_.resize(omega.size());
    for (std::size_t k = 0; k < omega.size(); ++k)
        step_response_[k] = std::polar(1.0, beta2 / 2.0 * omega[k] * omega[k] * h);

    if (direction_ == LearningDirection::backward) {
        input_ = normalized(rx);
        target_ = normalized(tx_ref);
        dispersion_sign_ = -1.0;
    } else {
        input_ = normalized(tx_ref);
        target_ = normalized(rx);
        dispersion_sign_ = 1.0;
    }
}

double LearnableSsfm::phase_coefficient(std::size_t k) const {
    return dispersion_sign_ * gamma_eff_ * weights_[k];
}

void LearnableSsfm::disperse(Field& u, bool inverse) const {
    // inverse undoes one model step in the model's own direction.
    const bool conj = (dispersion_sign_ < 0.0) != inverse;
    for (auto& p : u) {
        fft_.forward(p);
        if (conj)
            for (std::size_t k = 0; k < p.size(); ++k) p[k] *= std::conj(step_response_[k]);
        else
            for (std::size_t k = 0; k < p.size(); ++k) p[k] *= step_response_[k];
        fft_.inverse(p);
    }
}

namespace {

void kick(std::array<CVector, kPolarizations>& u, double theta) {
    const std::size_t n = u[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::norm(u[0][i]) + std::norm(u[1][i]);
        const cplx rot = std::polar(1.0, theta * s);
        u[0][i] *= rot;
        u[1][i] *= rot;
    }
}

}  // namespace

void LearnableSsfm::run(std::span<const double> power_w, Field& u) const {
    require(power_w.size() == parameter_count(), "parameter count mismatch");
    const std::size_t last = parameter_count() - 1;
    u = input_;
    for (std::size_t step = 0; step <= last; ++step) {
        const std::size_t k = direction_ == LearningDirection::backward ? last - step : step;
        if (step > 0) disperse(u, false);
        kick(u, phase_coefficient(k) * power_w[k]);
    }
}

double LearnableSsfm::residual(const Field& u, Field* seed) const {
    const double n = static_cast<double>(u[0].size());
    double total = 0.0;
    for (int p = 0; p < kPolarizations; ++p) {
        cplx c{};
        for (std::size_t i = 0; i < u[p].size(); ++i) c += std::conj(u[p][i]) * target_[p][i];
        const cplx rot = std::abs(c) > 0.0 ? c / std::abs(c) : cplx{1.0, 0.0};
        for (std::size_t i = 0; i < u[p].size(); ++i) total += std::norm(u[p][i] * rot - target_[p][i]);
        if (seed) {
            (*seed)[p].resize(u[p].size());
            const cplx back = std::conj(rot);
            for (std::size_t i = 0; i < u[p].size(); ++i)
                (*seed)[p][i] = (u[p][i] - target_[p][i] * back) / n;
        }
    }
    return total / n;
}

double LearnableSsfm::loss(std::span<const double> power_w) const {
    Field u;
    run(power_w, u);
    return residual(u, nullptr);
}

WaveformGrid LearnableSsfm::output(std::span<const double> power_w) const {
    WaveformGrid w;
    run(power_w, w.pol);
    w.sample_rate_ghz = sample_rate_ghz_;
    w.baud_gbd = baud_gbd_;
    w.center_power_dbm = 0.0;
    return w;
}

double LearnableSsfm::loss_and_gradient(std::span<const double> power_w,
                                        std::span<double> gradient) const {
    require(gradient.size() == parameter_count(), "gradient size mismatch");
    Field u;
    run(power_w, u);
    Field g;
    const double value = residual(u, &g);

    const std::size_t last = parameter_count() - 1;
    const std::size_t n = u[0].size();
    for (std::size_t step = last + 1; step-- > 0;) {
        const std::size_t k = direction_ == LearningDirection::backward ? last - step : step;
        const double coeff = phase_coefficient(k);
        const double theta = coeff * power_w[k];
        double dtheta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = std::norm(u[0][i]) + std::norm(u[1][i]);
            const cplx w = std::conj(g[0][i]) * u[0][i] + std::conj(g[1][i]) * u[1][i];
            dtheta += -2.0 * s * w.imag();
            const cplx unrot = std::polar(1.0, -theta * s);
            for (int p = 0; p < kPolarizations; ++p) {
                const cplx v = u[p][i] * unrot;
                g[p][i] = g[p][i] * unrot - 2.0 * theta * w.imag() * v;
                u[p][i] = v;
            }
        }
        gradient[k] = dtheta * coeff;
        if (step > 0) {
            disperse(u, true);
            disperse(g, true);
        }
    }
    return value;
}

std::ptrdiff_t align_by_cross_correlation(const WaveformGrid& tx_ref, WaveformGrid& rx,
                                          double accumulated_beta2_ps2) {
    require(tx_ref.size() == rx.size(), "tx reference and rx differ in length");
    const std::size_t n = rx.size();
    WaveformGrid compensated = rx;
    compensate_dispersion(compensated, accumulated_beta2_ps2);
    const Fft fft(n);
    std::vector<double> score(n, 0.0);
    for (int p = 0; p < kPolarizations; ++p) {
        CVector a = tx_ref.pol[p];
        CVector b = compensated.pol[p];
        fft.forward(a);
        fft.forward(b);
        for (std::size_t k = 0; k < n; ++k) b[k] *= std::conj(a[k]);
        fft.inverse(b);
        for (std::size_t m = 0; m < n; ++m) score[m] += std::norm(b[m]);
    }
    const auto lag = static_cast<std::size_t>(
        std::distance(score.begin(), std::max_element(score.begin(), score.end())));
    if (lag != 0)
        for (auto& p : rx.pol) std::rotate(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(lag), p.end());
    const auto signed_lag = lag <= n / 2 ? static_cast<std::ptrdiff_t>(lag)
                                         : static_cast<std::ptrdiff_t>(lag) - static_cast<std::ptrdiff_t>(n);
    return signed_lag;
}

DlmEstimate estimate_power_profile(const WaveformGrid& tx_ref, const WaveformGrid& rx_in,
                                   const LinkHypothesis& link, const DlmConfig& config) {
    config.validate();
    WaveformGrid rx = rx_in;
    const double beta2 = dispersion_to_beta2(link.dispersion_ps_nm_km, link.wavelength_nm);

    DlmEstimate est;
    auto& diag = est.diagnostics;
    diag.alignment_lag = align_by_cross_correlation(tx_ref, rx, beta2 * link.length_km);

    const LearnableSsfm model(tx_ref, rx, link, config.step_size_km, config.direction);
    const std::size_t m = model.parameter_count();
    const double init_w = dbm_to_watt(config.initial_power_dbm.value_or(0.0));

    std::vector<double> x(m, init_w);
    std::vector<double> grad(m), trial(m), trial_grad(m);
    diag.linear_loss = model.loss(std::vector<double>(m, 0.0));
    double current = model.loss_and_gradient(x, grad);
    diag.loss_history.push_back(current);

    // Steps are taken per unit length so the half-weight end kicks move as fast as the rest.
    std::vector<double> precond(m);
    for (std::size_t k = 0; k < m; ++k) precond[k] = (k == 0 || k + 1 == m) ? 2.0 : 1.0;
    const auto grad_scale = [&](const std::vector<double>& g) {
        double mx = 0.0;
        for (std::size_t k = 0; k < m; ++k) mx = std::max(mx, std::abs(precond[k] * g[k]));
        return mx;
    };
    // First step moves the steepest coordinate by learning_rate times the initial power.
    const double g0 = grad_scale(grad);
    double lr = g0 > 0.0 ? config.learning_rate * init_w / g0 : 0.0;

    int since_accept = 0;
    for (int it = 0; it < config.iterations && lr > 0.0; ++it) {
        for (std::size_t k = 0; k < m; ++k) trial[k] = x[k] - lr * precond[k] * grad[k];
        const double value = model.loss_and_gradient(trial, trial_grad);
        if (std::isfinite(value) && value < current) {
            x.swap(trial);
            grad.swap(trial_grad);
            current = value;
            diag.loss_history.push_back(current);
            ++diag.accepted_steps;
            lr *= config.growth;
            since_accept = 0;
        } else {
            ++diag.rejected_steps;
            lr *= config.backoff;
            if (++since_accept >= config.patience) break;
        }
    }

    const double signature =
        diag.linear_loss > 0.0 ? (diag.linear_loss - current) / diag.linear_loss : 0.0;
    if (diag.accepted_steps == 0) {
        diag.status = DlmStatus::stalled;
        diag.message = "no gradient step reduced the residual";
    } else if (!(diag.linear_loss > 1e-14) || signature < config.min_signature) {
        diag.status = DlmStatus::no_nonlinear_signature;
        diag.message = "nonlinear model explains " + std::to_string(signature * 100.0) +
                       "% of the linear residual";
    } else {
        diag.status = DlmStatus::converged;
    }

    est.power_w = x;
    est.profile.distance_km = model.positions_km();
    est.profile.power_dbm.reserve(m);
    constexpr double kFloorW = 1e-9;
    for (double p : x) est.profile.power_dbm.push_back(watt_to_dbm(std::max(p, kFloorW)));
    return est;
}

WaveformGrid recover_tx_reference(const SymbolSequence& decided, const PulseShape& shape) {
    return shape_symbols(decided, shape);
}

}  // namespace aal
