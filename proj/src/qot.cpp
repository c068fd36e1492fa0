#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>

#include <boost/math/tools/roots.hpp>

#include "aal/errors.hpp"
#include "aal/qot.hpp"

namespace aal {

void TransceiverMode::validate() const {
    require(!name.empty(), "transceiver mode needs a name");
    require(baud_gbd > 0.0 && std::isfinite(baud_gbd), "mode " + name + ": baud must be positive");
    require(bitrate_gbps > 0.0, "mode " + name + ": bitrate must be positive");
    require(prefec_ber_threshold > 0.0 && prefec_ber_threshold < 0.5,
            "mode " + name + ": pre-FEC BER threshold must lie in (0, 0.5)");
    require(rolloff >= 0.0 && rolloff <= 1.0, "mode " + name + ": rolloff must lie in [0, 1]");
    require(min_launch_dbm <= max_launch_dbm, "mode " + name + ": launch range is inverted");
    require(!std::isnan(tx_osnr_db), "mode " + name + ": tx_osnr is NaN");
    double raw = 2.0 * bits_per_symbol(modulation) * baud_gbd;
    // net bitrate may sit below the line rate by the FEC overhead, up to half of it
    require(bitrate_gbps <= raw * (1.0 + 1e-9) && bitrate_gbps >= 0.5 * raw,
            "mode " + name + ": bitrate inconsistent with modulation and baud");
}

double span_osnr_ase(const AseSpan& span, const PhysicalConstants& c) {
    return span.launch_dbm + c.ase_reference_db() - span.noise_figure_db - span.span_loss_db;
}

double osnr_ase(std::span<const AseSpan> spans, const PhysicalConstants& c) {
    require(!spans.empty(), "osnr_ase needs at least one span");
    std::vector<double> parts;
    parts.reserve(spans.size());
    for (const auto& s : spans) parts.push_back(span_osnr_ase(s, c));
    return inverse_sum_db(parts);
}

double amplifier_osnr_ase(double input_power_dbm, double noise_figure_db, const PhysicalConstants& c) {
    return input_power_dbm + c.ase_reference_db() - noise_figure_db;
}

double inverse_sum_db(std::span<const double> contributions_db) {
    double inv = 0.0;
    for (double db : contributions_db) {
        require(!std::isnan(db), "NaN SNR contribution");
        if (db == kInfinity) continue;
        inv += 1.0 / db_to_linear(db);
    }
    return inv == 0.0 ? kInfinity : linear_to_db(1.0 / inv);
}

double gsnr(double osnr_ase_db, double osnr_nli_db, double tx_osnr_db) {
    const double parts[] = {osnr_ase_db, osnr_nli_db, tx_osnr_db};
    return inverse_sum_db(parts);
}

double snr_to_osnr_db(double snr_db, double baud_gbd, const PhysicalConstants& c) {
    return snr_db + linear_to_db(baud_gbd / c.ref_bandwidth_ghz);
}

double osnr_to_snr_db(double osnr_db, double baud_gbd, const PhysicalConstants& c) {
    return osnr_db - linear_to_db(baud_gbd / c.ref_bandwidth_ghz);
}

double osnr_for_ber(Modulation m, double ber, double baud_gbd, const PhysicalConstants& c) {
    if (!(ber > 0.0 && ber < 0.5)) throw PreconditionError("BER target outside (0, 0.5) is unreachable");
    auto f = [&](double snr_db) { return std::log(awgn_ber(m, db_to_linear(snr_db))) - std::log(ber); };
    double lo = -30.0, hi = 30.0;  // both BER curves stay above the double underflow here
    if (!(f(lo) > 0.0 && f(hi) < 0.0)) throw PreconditionError("BER target unreachable");
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return snr_to_osnr_db(0.5 * (a + b), baud_gbd, c);
}

double required_gsnr(const TransceiverMode& mode, const PhysicalConstants& c) {
    mode.validate();
    try {
        return osnr_for_ber(mode.modulation, mode.prefec_ber_threshold, mode.baud_gbd, c);
    } catch (const PreconditionError&) {
        throw PreconditionError("BER threshold unreachable for mode " + mode.name);
    }
}

const TransceiverMode& select_mode(std::span<const ModeEvaluation> candidates) {
    if (candidates.empty()) throw EmptyCatalogError("no candidate transceiver modes");
    const ModeEvaluation* best = nullptr;
    auto key = [](const ModeEvaluation& e) {
        return std::make_tuple(e.mode.spectral_efficiency(), e.mode.bitrate_gbps);
    };
    for (const auto& e : candidates) {
        if (!e.feasible) continue;
        if (!best || key(e) > key(*best) || (key(e) == key(*best) && e.mode.name < best->mode.name)) best = &e;
    }
    if (!best) throw NoFeasibleModeError("no candidate mode meets its required GSNR");
    return best->mode;
}

namespace {

struct PathTerms {
    std::vector<ElementQot> elements;
    double ase = kInfinity;
    double nli = kInfinity;
};

PathTerms path_terms(const LinkTopology& path, double launch_dbm, double baud_gbd, const PhysicalConstants& c) {
    PathTerms t;
    auto inputs = segment_input_powers(path, launch_dbm);
    std::vector<double> ase, nli;
    const auto& segs = path.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        ElementQot e{segs[i].id, kInfinity, kInfinity};
        if (segs[i].is_fiber()) {
            const auto& f = segs[i].fiber();
            NliSpan s{inputs[i], f.length_km, f.loss_db_per_km, f.dispersion_ps_nm_km, f.gamma_per_w_km};
            e.osnr_nli_db = span_osnr_nli(s, baud_gbd, c);
        } else {
            e.osnr_ase_db = amplifier_osnr_ase(inputs[i], segs[i].amplifier().noise_figure_db, c);
        }
        ase.push_back(e.osnr_ase_db);
        nli.push_back(e.osnr_nli_db);
        t.elements.push_back(std::move(e));
    }
    t.ase = inverse_sum_db(ase);
    t.nli = inverse_sum_db(nli);
    return t;
}

}  // namespace

QotReport design_path(const LinkTopology& path, double launch_dbm,
                      std::span<const TransceiverMode> modes, const QotConfig& config) {
    require(std::isfinite(launch_dbm), "launch power must be finite");
    require(config.design_margin_db >= 0.0, "design margin must be non-negative");
    config.constants.validate();
    if (modes.empty()) throw EmptyCatalogError("no candidate transceiver modes");

    QotReport report;
    std::vector<PathTerms> terms;
    for (const auto& m : modes) {
        m.validate();
        PathTerms t = path_terms(path, launch_dbm, m.baud_gbd, config.constants);
        ModeEvaluation ev;
        ev.mode = m;
        ev.osnr_nli_db = t.nli;
        ev.gsnr_db = gsnr(t.ase, t.nli, m.tx_osnr_db);
        ev.required_gsnr_db = required_gsnr(m, config.constants);
        ev.margin_db = ev.gsnr_db - ev.required_gsnr_db - config.design_margin_db;
        bool launch_ok = launch_dbm >= m.min_launch_dbm && launch_dbm <= m.max_launch_dbm;
        ev.feasible = launch_ok && ev.margin_db >= 0.0;
        report.modes.push_back(ev);
        terms.push_back(std::move(t));
    }

    std::size_t pick = 0;
    try {
        const TransceiverMode& sel = select_mode(report.modes);
        report.selected_mode = sel;
        for (std::size_t i = 0; i < modes.size(); ++i)
            if (report.modes[i].mode.name == sel.name) pick = i;
    } catch (const NoFeasibleModeError&) {
    }
    report.per_element = terms[pick].elements;
    report.osnr_ase_db = terms[pick].ase;
    report.osnr_nli_db = terms[pick].nli;
    report.gsnr_db = report.modes[pick].gsnr_db;
    return report;
}

std::vector<MarginPoint> margin_analysis(const MarginScenario& s) {
    require(s.min_spans >= 1 && s.max_spans >= s.min_spans, "margin analysis needs a valid span range");
    require(s.extra_loss_db >= 0.0, "extra loss must be non-negative");
    require(!s.tx_osnr_db.empty(), "margin analysis needs at least one TxOSNR value");
    s.constants.validate();
    std::vector<MarginPoint> out;
    for (double tx : s.tx_osnr_db) {
        for (int n = s.min_spans; n <= s.max_spans; ++n) {
            const AseSpan normal{s.launch_dbm, s.span_loss_db, s.noise_figure_db};
            const AseSpan worst{s.launch_dbm, s.span_loss_db + s.extra_loss_db, s.noise_figure_db};
            double per_normal = span_osnr_ase(normal, s.constants) - linear_to_db(n);
            double per_worst = span_osnr_ase(worst, s.constants) - linear_to_db(n);
            MarginPoint p;
            p.spans = n;
            p.tx_osnr_db = tx;
            p.osnr_normal_db = gsnr(per_normal, kInfinity, tx);
            p.osnr_worst_db = gsnr(per_worst, kInfinity, tx);
            p.margin_db = p.osnr_normal_db - p.osnr_worst_db;
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace aal
