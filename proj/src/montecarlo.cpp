#include "syshock/montecarlo.hpp"

#include "syshock/error.hpp"
#include "syshock/parallel.hpp"
#include "syshock/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace syshock {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void sample_row(const ModelParams& params, const std::vector<PairCopula>& copulas,
                std::uint64_t seed, std::size_t r, SampleBatch& batch) {
    const std::size_t d = params.dim();
    RandomStream rng(seed, r);
    const double u0 = rng.uniform();
    const double gamma0 = params.gamma0();
    double y_min = gamma0 > 0.0 ? -std::log(u0) / gamma0 : kInf;
    double* latent = batch.latent.empty() ? nullptr : batch.latent.data() + r * (2 * d + 1);
    if (latent) latent[0] = y_min;
    // X_j is stored first in the lifetime slot, then replaced by T_j.
    double* t_row = batch.lifetimes.data() + r * d;
    for (std::size_t j = 0; j < d; ++j) {
        const auto [u, v] = copulas[j].sample_pair(rng);
        const double gamma = params.gamma(j);
        const double y = gamma > 0.0 ? -std::log(u) / gamma : kInf;
        const double x = inverse_marginal_survival_X(params, j, v);
        y_min = std::min(y_min, y);
        t_row[j] = x;
        if (latent) {
            latent[1 + j] = y;
            latent[1 + d + j] = x;
        }
    }
    batch.systemic[r] = y_min;
    for (std::size_t j = 0; j < d; ++j) t_row[j] = std::min(t_row[j], y_min);
}

SampleBatch prepare(const ModelParams& params, const SimulationConfig& cfg,
                    std::vector<PairCopula>& copulas) {
    validate(params);
    if (cfg.n_samples < 1) throw ValidationError("n_samples must be at least 1");
    if (cfg.n_workers < 1) throw ValidationError("n_workers must be at least 1");
    SampleBatch batch;
    batch.n = cfg.n_samples;
    batch.d = params.dim();
    batch.lifetimes.assign(batch.n * batch.d, 0.0);
    batch.systemic.assign(batch.n, 0.0);
    if (cfg.keep_latent) batch.latent.assign(batch.n * (2 * batch.d + 1), 0.0);
    copulas.clear();
    for (const auto& g : params.gens) copulas.emplace_back(g);
    return batch;
}

// Merge sort of y counting exchanges, i.e. discordant pairs among the
// remaining (x-untied) pairs.
std::uint64_t count_exchanges(std::vector<double>& y, std::vector<double>& buffer, std::size_t lo,
                              std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t swaps = count_exchanges(y, buffer, lo, mid) + count_exchanges(y, buffer, mid, hi);
    std::size_t a = lo;
    std::size_t b = mid;
    std::size_t out = lo;
    while (a < mid && b < hi) {
        if (y[b] < y[a]) {
            swaps += mid - a;
            buffer[out++] = y[b++];
        } else {
            buffer[out++] = y[a++];
        }
    }
    while (a < mid) buffer[out++] = y[a++];
    while (b < hi) buffer[out++] = y[b++];
    std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo),
              buffer.begin() + static_cast<std::ptrdiff_t>(hi),
              y.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

// Sum over runs of equal values of run*(run-1)/2, for a sorted range.
template <typename Equal>
std::uint64_t tied_pairs(std::size_t n, Equal&& equal) {
    std::uint64_t total = 0;
    std::uint64_t run = 1;
    for (std::size_t m = 1; m < n; ++m) {
        if (equal(m - 1, m)) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total + run * (run - 1) / 2;
}

void check_tau_inputs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("empirical_tau: length mismatch");
    if (x.size() < 2) throw ValidationError("empirical_tau: need at least two observations");
}

}  // namespace

std::vector<double> SampleBatch::column(std::size_t j) const {
    std::vector<double> out(n);
    for (std::size_t r = 0; r < n; ++r) out[r] = lifetimes[r * d + j];
    return out;
}

SampleBatch sample_model(const ModelParams& params, const SimulationConfig& cfg) {
    std::vector<PairCopula> copulas;
    SampleBatch batch = prepare(params, cfg, copulas);
    parallel_for(batch.n, cfg.n_workers,
                 [&](std::size_t r) { sample_row(params, copulas, cfg.seed, r, batch); });
    return batch;
}

SampleBatch sample_model_serial(const ModelParams& params, const SimulationConfig& cfg) {
    std::vector<PairCopula> copulas;
    SampleBatch batch = prepare(params, cfg, copulas);
    for (std::size_t r = 0; r < batch.n; ++r) sample_row(params, copulas, cfg.seed, r, batch);
    return batch;
}

double empirical_tau(std::span<const double> x, std::span<const double> y) {
    check_tau_inputs(x, y);
    return x.size() <= 2000 ? empirical_tau_naive(x, y) : empirical_tau_merge(x, y);
}

double empirical_tau_naive(std::span<const double> x, std::span<const double> y) {
    check_tau_inputs(x, y);
    const std::size_t n = x.size();
    std::int64_t score = 0;
    for (std::size_t a = 0; a + 1 < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double dx = x[b] - x[a];
            const double dy = y[b] - y[a];
            if (dx == 0.0 || dy == 0.0) continue;
            score += ((dx > 0.0) == (dy > 0.0)) ? 1 : -1;
        }
    }
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return static_cast<double>(score) / pairs;
}

double empirical_tau_merge(std::span<const double> x, std::span<const double> y) {
    check_tau_inputs(x, y);
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t m = 0; m < n; ++m) {
        xs[m] = x[order[m]];
        ys[m] = y[order[m]];
    }
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t ties_x = tied_pairs(n, [&](std::size_t a, std::size_t b) {
        return xs[a] == xs[b];
    });
    const std::uint64_t ties_xy = tied_pairs(n, [&](std::size_t a, std::size_t b) {
        return xs[a] == xs[b] && ys[a] == ys[b];
    });
    std::vector<double> buffer(n);
    const std::uint64_t discordant = count_exchanges(ys, buffer, 0, n);
    const std::uint64_t ties_y = tied_pairs(n, [&](std::size_t a, std::size_t b) {
        return ys[a] == ys[b];
    });
    // Pairs untied in both coordinates: total - tx - ty + txy = C + D.
    const auto both_untied = static_cast<std::int64_t>(total - ties_x - ties_y + ties_xy);
    const std::int64_t score = both_untied - 2 * static_cast<std::int64_t>(discordant);
    return static_cast<double>(score) / static_cast<double>(total);
}

double tau_standard_error(std::size_t n) {
    const double m = static_cast<double>(n);
    return std::sqrt(2.0 * (2.0 * m + 5.0) / (9.0 * m * (m - 1.0)));
}

double empirical_simultaneous(const SampleBatch& batch, double t) {
    if (batch.n == 0) throw ValidationError("empirical_simultaneous: empty batch");
    std::size_t hits = 0;
    for (std::size_t r = 0; r < batch.n; ++r) {
        // A single entity is trivially "all equal".
        if (batch.d == 1) {
            hits += batch.lifetime(r, 0) > t;
            continue;
        }
        const double x0 = batch.systemic[r];
        if (!(x0 > t)) continue;
        bool all = true;
        for (std::size_t j = 0; j < batch.d && all; ++j) all = batch.lifetime(r, j) == x0;
        if (all) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(batch.n);
}

}  // namespace syshock
