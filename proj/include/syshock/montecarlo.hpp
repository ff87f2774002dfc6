#pragma once

#include "syshock/shock_model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace syshock {

struct SimulationConfig {
    std::size_t n_samples = 100000;
    std::uint64_t seed = 20170101;
    int n_workers = 1;
    /// Keep (Y_0..Y_d, X_1..X_d) per row.
    bool keep_latent = false;
};

/// Simulated lifetimes, row-major n x d. Row r draws from its own random
/// stream keyed by (seed, r), so the batch does not depend on n_workers.
struct SampleBatch {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> lifetimes;
    /// X_0 = min_j Y_j per row. A lifetime equals it exactly iff the systemic
    /// shock struck that entity first (T_j is a copy of this value).
    std::vector<double> systemic;
    /// Row-major n x (2d+1) when keep_latent, else empty.
    std::vector<double> latent;

    double lifetime(std::size_t row, std::size_t j) const { return lifetimes[row * d + j]; }
    std::span<const double> row(std::size_t r) const {
        return {lifetimes.data() + r * d, d};
    }
    std::vector<double> column(std::size_t j) const;
};

/// Samples the model row-parallel on cfg.n_workers OpenMP threads.
SampleBatch sample_model(const ModelParams& params, const SimulationConfig& cfg);

/// Single-threaded reference for sample_model; same output bit for bit.
SampleBatch sample_model_serial(const ModelParams& params, const SimulationConfig& cfg);

/// Kendall's tau-a, (concordant - discordant) / C(n,2), with tied pairs
/// counted in neither. Dispatches to the O(n^2) reference for n <= 2000 and
/// to merge-sort counting above. Throws ValidationError for n < 2 or
/// mismatched lengths.
double empirical_tau(std::span<const double> x, std::span<const double> y);

/// O(n log n) merge-sort pair counting.
double empirical_tau_merge(std::span<const double> x, std::span<const double> y);

/// O(n^2) enumeration of all pairs.
double empirical_tau_naive(std::span<const double> x, std::span<const double> y);

/// Standard error of tau-hat under independence, sqrt(2(2n+5)/(9n(n-1))).
double tau_standard_error(std::size_t n);

/// Fraction of rows where every entity died from the systemic shock and the
/// common time exceeds t. With d = 1 the equality is vacuous and this is the
/// empirical survival of T_1 at t.
double empirical_simultaneous(const SampleBatch& batch, double t);

}  // namespace syshock
