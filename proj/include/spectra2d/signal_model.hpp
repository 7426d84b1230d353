#pragma once

// 2D spectrally sparse signals: synthesis, evaluation, sampling and comparison.
//
//   X(j,k) = sum_p c_p exp(i 2pi (f_p1 j + f_p2 k)),   0 <= j,k < n
//
// which factors as V1 C V2^H with Vandermonde V1 (columns e^{+i2pi f_p1 j})
// and V2 (columns e^{-i2pi f_p2 k}), so rank(X) = s when the per-axis
// frequency components are distinct.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace spectra2d {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct FrequencyPair {
    double f1 = 0.0;
    double f2 = 0.0;

    friend bool operator==(const FrequencyPair&, const FrequencyPair&) = default;
};

struct SpectralSignal {
    int n = 0;
    std::vector<FrequencyPair> freqs;
    std::vector<Complex> coeffs;

    [[nodiscard]] int sparsity() const noexcept { return static_cast<int>(freqs.size()); }
    /// Dense n x n evaluation X*.
    [[nodiscard]] CMatrix dense() const;
    /// Smallest per-axis gap between any two components (no wrap-around).
    /// Infinity when s == 1.
    [[nodiscard]] double min_separation() const;
    /// Throws std::invalid_argument if any invariant fails.
    void validate() const;
};

struct Observation {
    int j = 0;
    int k = 0;
    Complex value;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// The observed index set T with its values. Entries are distinct and
/// within [0,n)^2.
struct ObservationSet {
    int n = 0;
    std::vector<Observation> entries;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(entries.size()); }
    void validate() const;
    /// n x n 0/1 mask of observed positions.
    [[nodiscard]] Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask() const;
};

CMatrix evaluate_signal(std::span<const FrequencyPair> freqs, std::span<const Complex> coeffs, int n);

/// Column-stacked Vandermonde factors. sign = +1 gives V1, -1 gives V2.
CMatrix vandermonde(std::span<const double> freqs, int n, int sign);

enum class SeparationSampler {
    /// Order-statistics spacing transform; exact draw from the uniform law
    /// conditioned on the separation constraint, never fails when feasible.
    spacing,
    /// Draw s values per axis uniformly, accept when separated.
    rejection,
};

struct SynthOptions {
    SeparationSampler sampler = SeparationSampler::spacing;
    std::int64_t rejection_budget = 100000;
};

/// Random instance: per-axis min separation >= 1/n, |c_p| = 0.5 + w^2 with
/// w ~ N(0,1), phase ~ U[0, 2pi). Requires 1 <= s <= n/2.
SpectralSignal synth_random(int n, int s, std::uint64_t seed, const SynthOptions& opts = {});

/// m distinct entries chosen uniformly without replacement; values copied
/// from the dense signal.
ObservationSet sample_observations(const SpectralSignal& signal, int m, std::uint64_t seed);
ObservationSet sample_observations(const CMatrix& dense, int m, std::uint64_t seed);

double relative_error(const CMatrix& recovered, const CMatrix& truth);

// Serialization.
nlohmann::json to_json(const SpectralSignal& signal);
nlohmann::json to_json(const ObservationSet& obs);
SpectralSignal signal_from_json(const nlohmann::json& j);
ObservationSet observations_from_json(const nlohmann::json& j);

/// Row-major CSV, one "re+imi" token per cell.
std::string to_csv(const CMatrix& m);
void write_csv(const CMatrix& m, const std::filesystem::path& path);

}  // namespace spectra2d
