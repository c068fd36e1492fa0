#include "aal/waveform.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "aal/errors.hpp"
#include "aal/units.hpp"

namespace aal {

int WaveformGrid::oversampling() const {
    return static_cast<int>(std::lround(sample_rate_ghz / baud_gbd));
}

double WaveformGrid::mean_power_w() const {
    double total = 0.0;
    for (const auto& p : pol)
        for (const auto& v : p) total += std::norm(v);
    return size() == 0 ? 0.0 : total / static_cast<double>(size());
}

void WaveformGrid::validate() const {
    require(pol[0].size() == pol[1].size(), "polarizations differ in length");
    require(size() > 0, "waveform is empty");
    require(baud_gbd > 0.0, "baud rate must be positive");
    require(sample_rate_ghz >= 2.0 * baud_gbd * (1.0 - 1e-12), "oversampling below 2");
}

std::vector<double> rrc_response(std::size_t n, double sample_rate_ghz, double baud_gbd,
                                 double rolloff) {
    require(rolloff >= 0.0 && rolloff <= 1.0, "rolloff must lie in [0, 1]");
    std::vector<double> h(n, 0.0);
    const double df = sample_rate_ghz / static_cast<double>(n);
    const double f1 = (1.0 - rolloff) * baud_gbd / 2.0;
    const double f2 = (1.0 + rolloff) * baud_gbd / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double sk = k < (n + 1) / 2 ? static_cast<double>(k)
                                          : static_cast<double>(k) - static_cast<double>(n);
        const double f = std::abs(sk * df);
        if (f <= f1)
            h[k] = 1.0;
        else if (f < f2)
            h[k] = std::cos(kPi / (2.0 * rolloff * baud_gbd) * (f - f1));
    }
    return h;
}

SymbolSequence random_symbols(Modulation m, std::size_t n_symbols, std::uint64_t seed) {
    require(n_symbols > 0, "symbol count must be positive");
    SymbolSequence seq;
    seq.modulation = m;
    seq.seed = seed;
    const auto points = constellation(m);
    const auto mask = static_cast<std::uint64_t>(points.size() - 1);
    std::mt19937_64 rng(seed);
    for (auto& p : seq.pol) {
        p.resize(n_symbols);
        for (auto& s : p) s = points[(rng() >> 32) & mask];
    }
    return seq;
}

WaveformGrid shape_symbols(const SymbolSequence& symbols, const PulseShape& shape) {
    require(symbols.size() > 0, "symbol count must be positive");
    require(shape.oversampling >= 2, "oversampling must be at least 2");
    require(shape.baud_gbd > 0.0, "baud rate must be positive");
    const std::size_t sps = static_cast<std::size_t>(shape.oversampling);
    const std::size_t n = symbols.size() * sps;

    WaveformGrid w;
    w.baud_gbd = shape.baud_gbd;
    w.sample_rate_ghz = shape.baud_gbd * static_cast<double>(sps);
    const Fft fft(n);
    const auto h = rrc_response(n, w.sample_rate_ghz, w.baud_gbd, shape.rolloff);
    for (int p = 0; p < kPolarizations; ++p) {
        CVector x(n, cplx{});
        for (std::size_t i = 0; i < symbols.size(); ++i) x[i * sps] = symbols.pol[p][i];
        fft.forward(x);
        for (std::size_t k = 0; k < n; ++k) x[k] *= h[k];
        fft.inverse(x);
        w.pol[p] = std::move(x);
    }
    set_power(w, 0.0);
    return w;
}

std::pair<SymbolSequence, WaveformGrid> generate_waveform(Modulation m, std::size_t n_symbols,
                                                          const PulseShape& shape,
                                                          std::uint64_t seed) {
    auto symbols = random_symbols(m, n_symbols, seed);
    auto grid = shape_symbols(symbols, shape);
    return {std::move(symbols), std::move(grid)};
}

void set_power(WaveformGrid& w, double power_dbm) {
    const double current = w.mean_power_w();
    require(current > 0.0, "cannot rescale a zero-power waveform");
    const double scale = std::sqrt(dbm_to_watt(power_dbm) / current);
    for (auto& p : w.pol)
        for (auto& v : p) v *= scale;
    w.center_power_dbm = power_dbm;
}

double measured_power_dbm(const WaveformGrid& w) { return watt_to_dbm(w.mean_power_w()); }

void add_awgn_for_osnr(WaveformGrid& w, double osnr_db, double ref_bandwidth_ghz,
                       std::uint64_t seed) {
    require(ref_bandwidth_ghz > 0.0, "reference bandwidth must be positive");
    const double signal_w = w.mean_power_w();
    // Noise PSD over both polarizations so that P / (N * B_ref) = OSNR.
    const double psd_total = signal_w / (db_to_linear(osnr_db) * ref_bandwidth_ghz);
    const double var_per_pol = psd_total * w.sample_rate_ghz / 2.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(var_per_pol / 2.0));
    for (auto& p : w.pol)
        for (auto& v : p) v += cplx(normal(rng), normal(rng));
}

namespace {

constexpr char kMagic[8] = {'A', 'A', 'L', 'W', 'A', 'V', 'E', '1'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "waveform IO assumes little-endian host");

template <typename T>
void put(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError("truncated waveform file");
    return value;
}

}  // namespace

void write_waveform(const WaveformGrid& w, const std::filesystem::path& path) {
    w.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, kPolarizations);
    put<std::uint64_t>(out, w.size());
    put<double>(out, w.sample_rate_ghz);
    put<double>(out, w.baud_gbd);
    put<double>(out, w.center_power_dbm);
    for (const auto& p : w.pol)
        out.write(reinterpret_cast<const char*>(p.data()),
                  static_cast<std::streamsize>(p.size() * sizeof(cplx)));
    if (!out) throw IoError("failed writing " + path.string());
}

WaveformGrid read_waveform(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw IoError(path.string() + " is not a waveform file");
    if (get<std::uint32_t>(in) != kVersion) throw IoError("unsupported waveform version");
    if (get<std::uint32_t>(in) != kPolarizations) throw IoError("unsupported polarization count");
    const auto n = get<std::uint64_t>(in);
    WaveformGrid w;
    w.sample_rate_ghz = get<double>(in);
    w.baud_gbd = get<double>(in);
    w.center_power_dbm = get<double>(in);
    for (auto& p : w.pol) {
        p.resize(n);
        in.read(reinterpret_cast<char*>(p.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
        if (!in) throw IoError("truncated waveform file");
    }
    w.validate();
    return w;
}

}  // namespace aal
