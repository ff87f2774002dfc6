#include "doctest.h"

#include "syshock/calibration.hpp"
#include "syshock/dependence.hpp"
#include "syshock/error.hpp"
#include "syshock/montecarlo.hpp"
#include "syshock/nelder_mead.hpp"
#include "syshock/rng.hpp"

#include <chrono>
#include <cmath>
#include <vector>

using namespace syshock;

namespace {

ModelParams random_feasible(RandomStream& rng, std::size_t d, Family family) {
    std::vector<double> alpha(d), theta(d + 1);
    double sum = 0.0;
    for (auto& a : alpha) a = 0.05 + 0.9 * rng.uniform();
    for (auto& t : theta) sum += (t = 0.05 + rng.uniform());
    for (auto& t : theta) t /= sum;
    const double lo = family == Family::Clayton ? 0.1 : 1.1;
    std::vector<Generator> gens;
    for (std::size_t j = 0; j < d; ++j) gens.emplace_back(family, lo + 5.0 * rng.uniform());
    return make_params(alpha, theta, gens);
}

}  // namespace

TEST_CASE("nelder-mead on Rosenbrock") {
    auto rosen = [](const std::vector<double>& x) {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    };
    NelderMeadOptions o;
    o.f_target = 1e-20;
    o.x_tol = 1e-10;
    const auto r = nelder_mead(rosen, {-1.2, 1.0}, o);
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("TauMatrix packing and validation") {
    TauMatrix m(4);
    CHECK(m.pairs() == 6);
    CHECK(m.labels()[3] == "4");
    double v = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = i + 1; k < 4; ++k) m.set(i, k, v += 0.1);
    CHECK(m.at(0, 1) == doctest::Approx(0.1));
    CHECK(m.at(3, 2) == doctest::Approx(0.6));
    CHECK(m.at(1, 3) == doctest::Approx(0.5));
    CHECK_THROWS_AS(m.set(0, 0, 0.1), ValidationError);
    CHECK_THROWS_AS(m.set(0, 1, 1.5), ValidationError);
    CHECK_THROWS_AS(m.set(0, 1, NAN), ValidationError);
    CHECK_THROWS_AS(TauMatrix(1), ValidationError);
}

TEST_CASE("objective examples") {
    RandomStream rng(50, 0);
    for (int m = 0; m < 100; ++m) {
        auto p = random_feasible(rng, 3, m % 2 ? Family::Gumbel : Family::Clayton);
        CHECK(objective(p, model_taus(p)) <= 1e-12);
        CHECK(objective(p, TauMatrix(3)) >= 0.0);
    }
    auto ind = make_params({0.5, 0.7}, {0.4, 0.3, 0.3}, uniform_generators(2, Family::Independence, 0));
    TauMatrix t(2);
    t.set(0, 1, tau_marshall_olkin(0.5, 0.7) + 0.1);
    CHECK(objective(ind, t) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK_THROWS_AS(objective(ind, TauMatrix(3)), ValidationError);
}

TEST_CASE("objective against a Monte Carlo target") {
    auto p = make_params({0.5, 0.6, 0.4}, {0.25, 0.25, 0.25, 0.25}, uniform_generators(3, Family::Clayton, 2.0));
    SimulationConfig cfg;
    cfg.n_samples = 200000;
    cfg.n_workers = 4;
    const auto batch = sample_model(p, cfg);
    TauMatrix target(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = i + 1; k < 3; ++k) target.set(i, k, empirical_tau(batch.column(i), batch.column(k)));
    CHECK(objective(p, target) <= 3 * 0.01 * 0.01);
}

TEST_CASE("reparameterization round trip") {
    RandomStream rng(51, 0);
    for (Family fam : {Family::Clayton, Family::Gumbel}) {
        ParameterMap map(4, fam);
        for (int m = 0; m < 100; ++m) {
            std::vector<double> x(map.size());
            for (auto& v : x) v = -6.0 + 12.0 * rng.uniform();
            const ModelParams p = map.to_params(x);
            CHECK_NOTHROW(validate(p));
            const auto back = map.to_unconstrained(p);
            for (std::size_t c = 0; c < x.size(); ++c) CHECK(std::abs(back[c] - x[c]) < 1e-10);
        }
    }
    CHECK_THROWS_AS(ParameterMap(3, Family::Independence), ValidationError);
}

TEST_CASE("calibration round trip, d = 3 Clayton") {
    auto truth = make_params({0.4, 0.6, 0.7}, {0.2, 0.3, 0.25, 0.25},
                             {Generator::clayton(1.5), Generator::clayton(3.0), Generator::clayton(0.8)});
    const TauMatrix target = model_taus(truth);
    OptimizerSettings opts;
    opts.workers = 4;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = calibrate(target, Family::Clayton, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE("round trip took " << secs << " s, objective " << res.objective);
    CHECK(res.objective <= 1e-8);
    CHECK(res.converged);
    for (std::size_t c = 0; c < target.pairs(); ++c)
        CHECK(std::abs(res.fitted_taus.values()[c] - target.values()[c]) <= 1e-3);
    CHECK(std::abs(res.objective - objective(res.params, target)) <= 1e-12);
    CHECK(res.n_restarts_used == 20);
    for (double v : res.fitted_taus.values()) CHECK(v < 1.0);
}

TEST_CASE("calibrate is deterministic and worker independent") {
    TauMatrix target(3);
    target.set(0, 1, 0.3);
    target.set(0, 2, 0.2);
    target.set(1, 2, 0.45);
    OptimizerSettings opts;
    opts.restarts = 6;
    opts.max_iters = 800;
    opts.workers = 1;
    const auto a = calibrate(target, Family::Gumbel, opts);
    opts.workers = 3;
    const auto b = calibrate(target, Family::Gumbel, opts);
    CHECK(a.objective == b.objective);
    CHECK(a.params.alpha == b.params.alpha);
    CHECK(a.params.theta == b.params.theta);
    CHECK(a.best_restart == b.best_restart);
}

TEST_CASE("independence target and infeasible target") {
    TauMatrix zero(2);
    OptimizerSettings opts;
    opts.restarts = 5;
    const auto z = calibrate(zero, Family::Clayton, opts);
    CHECK(z.objective <= 1e-8);
    CHECK(std::abs(z.fitted_taus.at(0, 1)) < 1e-4);
    CHECK(z.boundary);

    TauMatrix high(2);
    high.set(0, 1, 0.999);
    const auto h = calibrate(high, Family::Clayton, opts);
    MESSAGE("0.999 target: objective " << h.objective << " converged " << h.converged << " boundary " << h.boundary);
    CHECK((!h.converged || h.boundary));
    CHECK(h.fitted_taus.at(0, 1) < 1.0);

    TauMatrix neg(2);
    neg.set(0, 1, -0.2);
    CHECK_THROWS_AS(calibrate(neg, Family::Clayton, opts), ValidationError);
}

TEST_CASE("riskiness report") {
    CalibrationResult r;
    r.params = make_params({0.5, 0.5}, {0.5, 0.0, 0.5}, uniform_generators(2, Family::Clayton, 2.0));
    r.fitted_taus = model_taus(r.params, {"A", "B"});
    const auto rep = riskiness_report(r);
    REQUIRE(rep.size() == 2);
    CHECK(rep[0].entity == "A");
    CHECK(rep[0].tau_X0_Xj == 0.0);
    CHECK(rep[1].tau_X0_Xj == doctest::Approx(0.25));
    CHECK(rep[1].tau_X0_Tj == doctest::Approx(0.5 + 0.25 / 3.0));
    r.params.alpha[0] = 1.0 - 1e-12;
    CHECK(riskiness_report(r)[0].tau_X0_Tj == doctest::Approx(1.0).epsilon(1e-9));
}
