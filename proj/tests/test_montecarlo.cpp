#include "doctest.h"

#include "syshock/dependence.hpp"
#include "syshock/error.hpp"
#include "syshock/montecarlo.hpp"
#include "syshock/rng.hpp"

#include <cmath>
#include <vector>

using namespace syshock;

namespace {

double binomial_se(double p, std::size_t n) { return std::sqrt(p * (1 - p) / static_cast<double>(n)); }

}  // namespace

TEST_CASE("empirical tau examples") {
    const std::vector<double> a{1, 2, 3}, up{1, 2, 3}, down{3, 2, 1};
    CHECK(empirical_tau(a, up) == 1.0);
    CHECK(empirical_tau(a, down) == -1.0);
    const std::vector<double> x{1, 2, 3, 4}, y{2, 1, 4, 3};
    CHECK(empirical_tau(x, y) == doctest::Approx(1.0 / 3.0));
    CHECK(empirical_tau_merge(x, y) == doctest::Approx(1.0 / 3.0));
    const std::vector<double> one{1};
    CHECK_THROWS_AS(empirical_tau(one, one), ValidationError);
    CHECK_THROWS_AS(empirical_tau(x, a), ValidationError);
}

TEST_CASE("merge-sort tau equals the naive count, with ties") {
    RandomStream rng(40, 0);
    for (int m = 0; m < 50; ++m) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 400);
        std::vector<double> x(n), y(n);
        for (std::size_t r = 0; r < n; ++r) {
            // Coarse values force ties in both coordinates.
            x[r] = std::floor(rng.uniform() * 12);
            y[r] = std::floor((x[r] + rng.uniform() * 10) * (m % 2 ? 1.0 : 0.3));
        }
        CHECK(empirical_tau_merge(x, y) == doctest::Approx(empirical_tau_naive(x, y)).epsilon(1e-15));
    }
}

TEST_CASE("tau is rank based") {
    RandomStream rng(41, 0);
    std::vector<double> x(3000), y(3000), fx(3000), fy(3000);
    for (std::size_t r = 0; r < x.size(); ++r) {
        x[r] = rng.uniform();
        y[r] = x[r] + rng.uniform();
        fx[r] = std::exp(3 * x[r]);
        fy[r] = std::pow(y[r], 5.0) - 2.0;
    }
    CHECK(empirical_tau(x, y) == empirical_tau(fx, fy));
}

TEST_CASE("standard error formula") {
    CHECK(tau_standard_error(10) == doctest::Approx(std::sqrt(2.0 * 25.0 / (9.0 * 90.0))));
}

TEST_CASE("sampling is deterministic across workers and matches the serial twin") {
    auto p = make_params({0.4, 0.7, 0.6}, {0.2, 0.3, 0.1, 0.4},
                         {Generator::clayton(2.0), Generator::gumbel(1.5), Generator::independence()});
    SimulationConfig cfg;
    cfg.n_samples = 5000;
    cfg.seed = 99;
    cfg.keep_latent = true;
    const auto serial = sample_model_serial(p, cfg);
    for (int w : {1, 2, 4, 7}) {
        cfg.n_workers = w;
        const auto par = sample_model(p, cfg);
        CHECK(par.lifetimes == serial.lifetimes);
        CHECK(par.systemic == serial.systemic);
        CHECK(par.latent == serial.latent);
    }
    // Latent structure: T_j = min(X_j, min_i Y_i) and all entries positive.
    const std::size_t d = 3;
    for (std::size_t r = 0; r < serial.n; ++r) {
        const double* lat = serial.latent.data() + r * (2 * d + 1);
        double y_min = lat[0];
        for (std::size_t j = 0; j < d; ++j) y_min = std::min(y_min, lat[1 + j]);
        CHECK(serial.systemic[r] == y_min);
        for (std::size_t j = 0; j < d; ++j) {
            CHECK(serial.lifetime(r, j) == std::min(lat[1 + d + j], y_min));
            CHECK(serial.lifetime(r, j) > 0.0);
        }
    }
}

TEST_CASE("Marshall-Olkin limit: P(T1 = T2) = 1/3") {
    auto p = make_params({0.5, 0.5}, {1, 0, 0}, uniform_generators(2, Family::Independence, 0));
    SimulationConfig cfg;
    cfg.n_samples = 500000;
    cfg.n_workers = 4;
    const auto batch = sample_model(p, cfg);
    const double f = empirical_simultaneous(batch, 0.0);
    CHECK(std::abs(f - 1.0 / 3.0) < 3 * binomial_se(1.0 / 3.0, cfg.n_samples));
    // Margin at x = 1: exp(-(lambda0 + lambda_j)) = exp(-2).
    std::size_t alive = 0;
    for (std::size_t r = 0; r < batch.n; ++r) alive += batch.lifetime(r, 0) > 1.0;
    const double pm = std::exp(-2.0);
    CHECK(std::abs(alive / static_cast<double>(batch.n) - pm) < 3 * binomial_se(pm, batch.n));
}

TEST_CASE("Clayton worked example: P(T1 = T2) = 0.25") {
    const std::vector<double> gamma{0, 0.5, 0.5}, eta{1.5, 1.5};
    auto p = from_intensities(gamma, eta, uniform_generators(2, Family::Clayton, 1.0));
    SimulationConfig cfg;
    cfg.n_samples = 500000;
    cfg.n_workers = 4;
    const auto batch = sample_model(p, cfg);
    CHECK(std::abs(empirical_simultaneous(batch, 0.0) - 0.25) < 3 * binomial_se(0.25, cfg.n_samples));
    const double t = 0.3;
    const double expect = simultaneous_default_prob(p, t);
    CHECK(std::abs(empirical_simultaneous(batch, t) - expect) < 3 * binomial_se(expect, cfg.n_samples));
}

TEST_CASE("d = 1 simultaneous frequency is the margin") {
    auto p = make_params({0.6}, {0.5, 0.5}, {Generator::clayton(1.0)});
    SimulationConfig cfg;
    cfg.n_samples = 20000;
    const auto batch = sample_model(p, cfg);
    std::size_t alive = 0;
    for (std::size_t r = 0; r < batch.n; ++r) alive += batch.lifetime(r, 0) > 0.5;
    CHECK(empirical_simultaneous(batch, 0.5) == alive / static_cast<double>(batch.n));
}

TEST_CASE("pairwise and systemic taus match closed forms within 3 SE") {
    auto p = make_params({0.5, 0.5}, {0, 0.5, 0.5}, uniform_generators(2, Family::Clayton, 2.0));
    SimulationConfig cfg;
    cfg.n_samples = 200000;
    cfg.n_workers = 4;
    const auto batch = sample_model(p, cfg);
    const auto t0 = batch.column(0), t1 = batch.column(1);
    const double se = tau_standard_error(cfg.n_samples);
    CHECK(std::abs(empirical_tau(t0, t1) - tau_lifetimes_value(p, 0, 1)) < 3 * se);
    CHECK(std::abs(empirical_tau(batch.systemic, t1) - tau_systemic(p, 1, SystemicMode::VsLifetime)) < 3 * se);
}

TEST_CASE("validation of config") {
    auto p = make_params({0.5}, {0.5, 0.5}, {Generator::clayton(1.0)});
    SimulationConfig cfg;
    cfg.n_samples = 0;
    CHECK_THROWS_AS(sample_model(p, cfg), ValidationError);
    cfg.n_samples = 10;
    cfg.n_workers = 0;
    CHECK_THROWS_AS(sample_model(p, cfg), ValidationError);
}
