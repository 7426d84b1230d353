#include "spectra2d/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace spectra2d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_frequency(const FrequencyPair& f) {
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0 && v < 1.0; };
    if (!ok(f.f1) || !ok(f.f2)) throw std::invalid_argument("frequency components must lie in [0,1)");
}

double min_gap(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < v.size(); ++i) gap = std::min(gap, v[i] - v[i - 1]);
    return gap;
}

// s sorted uniforms on [0, 1-(s-1)d) shifted by (i)d are exactly the uniform
// law on [0,1)^s conditioned on pairwise gaps >= d; the order is then shuffled
// so the pairing with the other axis is uniform too.
std::vector<double> spaced_axis(int s, double d, std::mt19937_64& rng) {
    const double span = 1.0 - (s - 1) * d;
    std::uniform_real_distribution<double> u(0.0, span);
    std::vector<double> v(s);
    for (auto& x : v) x = u(rng);
    std::sort(v.begin(), v.end());
    for (int i = 0; i < s; ++i) v[i] = std::min(v[i] + i * d, std::nextafter(1.0, 0.0));
    std::shuffle(v.begin(), v.end(), rng);
    return v;
}

std::vector<double> rejection_axis(int s, double d, std::int64_t budget, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(s);
    for (std::int64_t attempt = 0; attempt < budget; ++attempt) {
        for (auto& x : v) x = u(rng);
        if (min_gap(v) >= d) return v;
    }
    throw std::runtime_error("synth_random: rejection-sampling budget exceeded");
}

}  // namespace

CMatrix vandermonde(std::span<const double> freqs, int n, int sign) {
    CMatrix v(n, static_cast<Eigen::Index>(freqs.size()));
    for (Eigen::Index p = 0; p < v.cols(); ++p)
        for (int j = 0; j < n; ++j) v(j, p) = std::polar(1.0, sign * kTwoPi * freqs[p] * j);
    return v;
}

CMatrix evaluate_signal(std::span<const FrequencyPair> freqs, std::span<const Complex> coeffs, int n) {
    if (freqs.size() != coeffs.size()) throw std::invalid_argument("evaluate_signal: freqs/coeffs length mismatch");
    if (freqs.empty()) throw std::invalid_argument("evaluate_signal: need at least one component");
    if (n < 1) throw std::invalid_argument("evaluate_signal: n must be >= 1");

    std::vector<double> f1(freqs.size()), f2(freqs.size());
    for (std::size_t p = 0; p < freqs.size(); ++p) {
        f1[p] = freqs[p].f1;
        f2[p] = freqs[p].f2;
    }
    const CMatrix v1 = vandermonde(f1, n, +1);
    const CMatrix v2 = vandermonde(f2, n, -1);
    const CVector c = Eigen::Map<const CVector>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
    return v1 * c.asDiagonal() * v2.adjoint();
}

CMatrix SpectralSignal::dense() const { return evaluate_signal(freqs, coeffs, n); }

double SpectralSignal::min_separation() const {
    std::vector<double> a, b;
    for (const auto& f : freqs) {
        a.push_back(f.f1);
        b.push_back(f.f2);
    }
    return std::min(min_gap(a), min_gap(b));
}

void SpectralSignal::validate() const {
    if (n < 1) throw std::invalid_argument("signal: n must be >= 1");
    if (freqs.empty()) throw std::invalid_argument("signal: s must be >= 1");
    if (freqs.size() != coeffs.size()) throw std::invalid_argument("signal: freqs/coeffs length mismatch");
    if (sparsity() > n) throw std::invalid_argument("signal: s must not exceed n");
    for (const auto& f : freqs) check_frequency(f);
    if (!(min_separation() > 0.0)) throw std::invalid_argument("signal: frequency components must be distinct per axis");
}

SpectralSignal synth_random(int n, int s, std::uint64_t seed, const SynthOptions& opts) {
    if (n < 1 || s < 1) throw std::invalid_argument("synth_random: need n >= 1 and s >= 1");
    if (s > 1 && 2 * s > n) throw std::invalid_argument("synth_random: s too large to separate (need s <= n/2)");

    std::mt19937_64 rng(seed);
    const double d = 1.0 / n;
    std::vector<double> a, b;
    if (opts.sampler == SeparationSampler::spacing) {
        a = spaced_axis(s, d, rng);
        b = spaced_axis(s, d, rng);
    } else {
        a = rejection_axis(s, d, opts.rejection_budget, rng);
        b = rejection_axis(s, d, opts.rejection_budget, rng);
    }

    SpectralSignal sig;
    sig.n = n;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (int p = 0; p < s; ++p) {
        sig.freqs.push_back({a[p], b[p]});
        const double w = gauss(rng);
        sig.coeffs.push_back(std::polar(0.5 + w * w, phase(rng)));
    }
    return sig;
}

ObservationSet sample_observations(const CMatrix& dense, int m, std::uint64_t seed) {
    const auto n = static_cast<int>(dense.rows());
    if (dense.cols() != n) throw std::invalid_argument("sample_observations: signal must be square");
    const std::int64_t total = static_cast<std::int64_t>(n) * n;
    if (m < 1 || m > total) throw std::invalid_argument("sample_observations: m must lie in [1, n^2]");

    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates over linear indices.
    std::vector<std::int64_t> idx(static_cast<std::size_t>(total));
    for (std::int64_t i = 0; i < total; ++i) idx[i] = i;
    for (std::int64_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::int64_t> pick(i, total - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::sort(idx.begin(), idx.begin() + m);

    ObservationSet obs;
    obs.n = n;
    obs.entries.reserve(m);
    for (std::int64_t i = 0; i < m; ++i) {
        const int j = static_cast<int>(idx[i] / n);
        const int k = static_cast<int>(idx[i] % n);
        obs.entries.push_back({j, k, dense(j, k)});
    }
    return obs;
}

ObservationSet sample_observations(const SpectralSignal& signal, int m, std::uint64_t seed) {
    return sample_observations(signal.dense(), m, seed);
}

void ObservationSet::validate() const {
    if (n < 1) throw std::invalid_argument("observations: n must be >= 1");
    std::unordered_set<std::int64_t> seen;
    for (const auto& e : entries) {
        if (e.j < 0 || e.j >= n || e.k < 0 || e.k >= n)
            throw std::out_of_range("observations: index out of range");
        if (!seen.insert(static_cast<std::int64_t>(e.j) * n + e.k).second)
            throw std::invalid_argument("observations: duplicate index");
    }
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> ObservationSet::mask() const {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> m = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
    for (const auto& e : entries) m(e.j, e.k) = true;
    return m;
}

double relative_error(const CMatrix& recovered, const CMatrix& truth) {
    if (recovered.rows() != truth.rows() || recovered.cols() != truth.cols())
        throw std::invalid_argument("relative_error: shape mismatch");
    const double denom = truth.norm();
    if (!(denom > 0.0)) throw std::invalid_argument("relative_error: reference has zero norm");
    return (recovered - truth).norm() / denom;
}

nlohmann::json to_json(const SpectralSignal& signal) {
    nlohmann::json freqs = nlohmann::json::array(), coeffs = nlohmann::json::array();
    for (const auto& f : signal.freqs) freqs.push_back({f.f1, f.f2});
    for (const auto& c : signal.coeffs) coeffs.push_back({c.real(), c.imag()});
    return {{"n", signal.n}, {"s", signal.sparsity()}, {"freqs", freqs}, {"coeffs", coeffs}};
}

nlohmann::json to_json(const ObservationSet& obs) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : obs.entries) entries.push_back({e.j, e.k, e.value.real(), e.value.imag()});
    return {{"n", obs.n}, {"m", obs.size()}, {"entries", entries}};
}

SpectralSignal signal_from_json(const nlohmann::json& j) {
    SpectralSignal sig;
    sig.n = j.at("n").get<int>();
    for (const auto& f : j.at("freqs")) sig.freqs.push_back({f.at(0).get<double>(), f.at(1).get<double>()});
    for (const auto& c : j.at("coeffs")) sig.coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    if (j.contains("s") && j.at("s").get<int>() != sig.sparsity())
        throw std::invalid_argument("signal json: s does not match number of components");
    sig.validate();
    return sig;
}

ObservationSet observations_from_json(const nlohmann::json& j) {
    ObservationSet obs;
    obs.n = j.at("n").get<int>();
    for (const auto& e : j.at("entries"))
        obs.entries.push_back({e.at(0).get<int>(), e.at(1).get<int>(), {e.at(2).get<double>(), e.at(3).get<double>()}});
    if (j.contains("m") && j.at("m").get<int>() != obs.size())
        throw std::invalid_argument("observation json: m does not match number of entries");
    obs.validate();
    return obs;
}

std::string to_csv(const CMatrix& m) {
    std::ostringstream os;
    os.precision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ',';
            const Complex z = m(r, c);
            os << z.real() << (std::signbit(z.imag()) ? "-" : "+") << std::abs(z.imag()) << 'i';
        }
        os << '\n';
    }
    return os.str();
}

void write_csv(const CMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << to_csv(m);
}

}  // namespace spectra2d
