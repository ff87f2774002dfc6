#include "doctest.h"

#include "syshock/dependence.hpp"
#include "syshock/error.hpp"
#include "syshock/rng.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <vector>

using namespace syshock;

namespace {

// I(a, b, beta) by Boost double-exponential quadrature; independent of the
// library's tail substitution.
double tail_oracle(double a, double b, double beta) {
    auto f = [beta](double z) { return 1.0 / (std::pow(z, beta) * (z + 1.0)); };
    if (std::isinf(b)) {
        boost::math::quadrature::exp_sinh<double> q;
        return q.integrate([&](double s) { return f(a + s); });
    }
    if (b <= a) return 0.0;
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(f, a, b);
}

double fclay0(double beta, double theta, double t) {
    return t * (1 + theta / beta) - (1 - theta) * t * std::log(t) - theta / beta * std::pow(t, 1 + beta);
}

double gumbel_khoudraji_k(double beta, double theta, double t) {
    const double a = theta / (1 - theta);
    return t - t * std::log(t) * (1 - (beta - 1) * std::pow(a, beta) * tail_oracle(a, INFINITY, beta));
}

// Clayton pairwise Kendall function as displayed for two Clayton entities.
double clayton_pair_k(double ai, double ak, double ti, double tk, double bi, double bk, double t) {
    const double mo = ai * ak / (ai + ak - ai * ak);
    const double rik = (1 - ak) / ak * mo;
    const double rki = (1 - ai) / ai * mo;
    return t * (1 + tk / bk * ai + ti / bi * ak) -
           t * std::log(t) * ((1 - tk * ai) * rik + (1 - ti * ak) * rki) -
           tk / bk * ai * std::pow(t, rik * bk + 1) - ti / bi * ak * std::pow(t, rki * bi + 1);
}

// Gumbel pairwise tau with both theta brackets carrying a minus sign.
double gumbel_pair_tau(double ai, double ak, double ti, double tk, double bi, double bk) {
    const double mo = ai * ak / (ai + ak - ai * ak);
    auto bracket = [](double th, double al, double b) {
        return th * (1 - std::pow(th * al / (1 - al * (1 - th)), b - 1));
    };
    auto tail = [mo](double al_other, double th, double b) {
        if (th == 0.0 || b == 1.0) return 0.0;
        const double a = al_other * th / (1 - al_other * th);
        const double upper = al_other * th / (mo * th * (1 - al_other * th)) - 1;
        return (b - 1) * std::pow(a, b) * tail_oracle(a, upper, b);
    };
    return mo - mo * (bracket(tk, ak, bk) + bracket(ti, ai, bi)) + tail(ai, tk, bk) + tail(ak, ti, bi);
}

ModelParams pair_params(double ai, double ak, double ti, double tk, Generator gi, Generator gk) {
    return make_params({ai, ak}, {1 - ti - tk, ti, tk}, {gi, gk});
}

ModelParams random_pair(RandomStream& rng, int family) {
    const double ai = 0.1 + 0.85 * rng.uniform();
    const double ak = 0.1 + 0.85 * rng.uniform();
    double w0 = rng.uniform(), w1 = rng.uniform(), w2 = rng.uniform();
    const double s = w0 + w1 + w2;
    auto gen = [&]() {
        if (family == 0) return Generator::clayton(0.2 + 5.0 * rng.uniform());
        if (family == 1) return Generator::gumbel(1.05 + 4.0 * rng.uniform());
        return Generator::independence();
    };
    const Generator gi = gen();
    const Generator gk = gen();
    return pair_params(ai, ak, w1 / s, w2 / s, gi, gk);
}

}  // namespace

TEST_CASE("Khoudraji Kendall function examples") {
    CHECK(kendall_fn_khoudraji({Generator::clayton(2.0), 1.0}, 0.5) == doctest::Approx(0.6875).epsilon(1e-14));
    CHECK(kendall_fn_khoudraji({Generator::independence(), 1.0}, 0.5) ==
          doctest::Approx(0.5 - 0.5 * std::log(0.5)).epsilon(1e-12));
    CHECK(kendall_fn_khoudraji({Generator::gumbel(2.0), 0.4}, 1.0 - 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(kendall_fn_khoudraji({Generator::clayton(2.0), 0.5}, 0.0), DomainError);
    CHECK_THROWS_AS(kendall_fn_khoudraji({Generator::clayton(2.0), 0.5}, 1.0), DomainError);
    CHECK_THROWS_AS(kendall_fn_khoudraji({Generator::clayton(2.0), 1.5}, 0.5), DomainError);
    // Gumbel theta = 1 routes to the Archimedean form.
    CHECK(kendall_fn_khoudraji({Generator::gumbel(2.0), 1.0}, 0.3) ==
          doctest::Approx(0.3 - 0.3 * std::log(0.3) / 2.0).epsilon(1e-14));
}

TEST_CASE("Khoudraji closed forms vs independent oracles") {
    for (double beta : {0.3, 1.0, 2.0, 6.0})
        for (double theta : {0.1, 0.5, 0.9, 1.0})
            for (double t : {0.05, 0.3, 0.7, 0.95})
                CHECK(kendall_fn_khoudraji({Generator::clayton(beta), theta}, t) ==
                      doctest::Approx(fclay0(beta, theta, t)).epsilon(1e-13));
    for (double beta : {1.5, 2.0, 4.0})
        for (double theta : {0.1, 0.5, 0.9})
            for (double t : {0.05, 0.3, 0.7, 0.95})
                CHECK(kendall_fn_khoudraji({Generator::gumbel(beta), theta}, t) ==
                      doctest::Approx(gumbel_khoudraji_k(beta, theta, t)).epsilon(1e-9));
}

TEST_CASE("Khoudraji closed forms vs Corollary integral and Proposition 1 root route") {
    for (const auto& g : {Generator::clayton(0.5), Generator::clayton(2.0), Generator::gumbel(1.5),
                          Generator::gumbel(3.0)}) {
        for (double theta : {0.2, 0.5, 0.8}) {
            const KhoudrajiSpec spec{g, theta};
            const GenericPair pair = khoudraji_pair(spec);
            for (double t = 0.1; t < 0.95; t += 0.1) {
                const double closed = kendall_fn_khoudraji(spec, t);
                CHECK(std::abs(kendall_fn_khoudraji_integral(spec, t) - closed) < 1e-7);
                CHECK(std::abs(kendall_fn_generic_pair(pair, t) - closed) < 1e-7);
            }
        }
    }
    // Product copula with g(u) = u.
    const GenericPair indep = khoudraji_pair({Generator::independence(), 1.0});
    CHECK(kendall_fn_generic_pair(indep, 0.5) == doctest::Approx(0.5 - 0.5 * std::log(0.5)).epsilon(1e-8));
}

TEST_CASE("Khoudraji tau examples") {
    CHECK(tau_khoudraji({Generator::clayton(2.0), 0.5}) == doctest::Approx(0.25));
    CHECK(tau_khoudraji({Generator::clayton(2.0), 0.7}) == doctest::Approx(0.35));
    CHECK(tau_khoudraji({Generator::gumbel(2.0), 1.0}) == doctest::Approx(0.5));
    CHECK(tau_khoudraji({Generator::independence(), 0.6}) == doctest::Approx(0.0).epsilon(1e-9));
    // Gumbel tau as (1 - 1/beta) beta a^beta I(a, inf, beta).
    for (double beta : {1.5, 2.0, 4.0}) {
        for (double theta : {0.2, 0.5, 0.9}) {
            const double a = theta / (1 - theta);
            const double expect = (1 - 1 / beta) * beta * std::pow(a, beta) * tail_oracle(a, INFINITY, beta);
            CHECK(tau_khoudraji({Generator::gumbel(beta), theta}) == doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("tail integrals") {
    CHECK(improper_tail_integral(1.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(improper_tail_integral(1.0, 2.0) == doctest::Approx(1 - std::log(2.0)).epsilon(1e-10));
    CHECK(tail_integral(1.0, 1.0, 2.0) == 0.0);
    CHECK_THROWS_AS(improper_tail_integral(0.0, 2.0), DomainError);
    CHECK_THROWS_AS(improper_tail_integral(-1.0, 2.0), DomainError);
    for (double a : {0.01, 0.3, 2.0, 50.0}) {
        // beta = 3 by partial fractions.
        const double pf = 1 / (2 * a * a) - 1 / a + std::log((a + 1) / a);
        CHECK(improper_tail_integral(a, 3.0) == doctest::Approx(pf).epsilon(1e-9));
        for (double beta : {1.0, 1.7, 4.0}) {
            CHECK(improper_tail_integral(a, beta) == doctest::Approx(tail_oracle(a, INFINITY, beta)).epsilon(1e-9));
            CHECK(tail_integral(a, 3 * a + 1, beta) == doctest::Approx(tail_oracle(a, 3 * a + 1, beta)).epsilon(1e-9));
        }
    }
}

TEST_CASE("Marshall-Olkin pair") {
    auto p = pair_params(0.5, 0.5, 0, 0, Generator::independence(), Generator::independence());
    CHECK(tau_marshall_olkin(0.5, 0.5) == doctest::Approx(1.0 / 3.0));
    CHECK(tau_lifetimes_value(p, 0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    for (double t : {0.1, 0.5, 0.9}) {
        const double kfc0 = t - (1 - 1.0 / 3.0) * t * std::log(t);
        CHECK(kendall_fn_lifetimes(p, 0, 1, t) == doctest::Approx(kfc0).epsilon(1e-13));
        CHECK(std::abs(kendall_fn_lifetimes_integral(p, 0, 1, t) - kfc0) < 1e-7);
    }
    CHECK(kendall_fn_lifetimes(p, 0, 1, 1 - 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(kendall_fn_lifetimes(p, 1, 1, 0.5), ValidationError);
}

TEST_CASE("theta_i = theta_k = 0 leaves only the Marshall-Olkin tau") {
    for (const auto& g : {Generator::clayton(3.0), Generator::gumbel(2.5)}) {
        auto p = pair_params(0.3, 0.7, 0, 0, g, g);
        const auto dec = tau_lifetimes_decomposition(p, 0, 1);
        REQUIRE(dec.has_value());
        CHECK(dec->tau_bar_i == 0.0);
        CHECK(dec->tau_bar_k == 0.0);
        CHECK(tau_lifetimes_value(p, 0, 1) == tau_marshall_olkin(0.3, 0.7));
    }
}

TEST_CASE("Clayton pair: paper display, decomposition, generic route") {
    auto p = pair_params(0.5, 0.5, 0.5, 0.5, Generator::clayton(2.0), Generator::clayton(2.0));
    const auto terms = clayton_kendall_terms(p, 0, 1, 0.5);
    CHECK(std::abs(terms.combined() - kendall_fn_lifetimes(p, 0, 1, 0.5)) < 1e-12);
    CHECK(terms.k_indep == doctest::Approx(0.5 - 0.5 * std::log(0.5)));

    RandomStream rng(21, 0);
    for (int m = 0; m < 20; ++m) {
        auto q = random_pair(rng, 0);
        const double ai = q.alpha[0], ak = q.alpha[1], ti = q.theta_of(0), tk = q.theta_of(1);
        const double bi = q.gens[0].beta(), bk = q.gens[1].beta();
        for (double t = 0.1; t < 0.95; t += 0.1) {
            const double closed = kendall_fn_lifetimes(q, 0, 1, t);
            CHECK(closed == doctest::Approx(clayton_pair_k(ai, ak, ti, tk, bi, bk, t)).epsilon(1e-13));
            CHECK(std::abs(clayton_kendall_terms(q, 0, 1, t).combined() - closed) < 1e-12);
            CHECK(std::abs(kendall_fn_lifetimes_integral(q, 0, 1, t) - closed) < 1e-6);
        }
        const auto dec = tau_lifetimes_decomposition(q, 0, 1);
        REQUIRE(dec.has_value());
        const double mo = tau_marshall_olkin(ai, ak);
        const double rik = (1 - ak) / ak * mo, rki = (1 - ai) / ai * mo;
        CHECK(dec->tau_mo == doctest::Approx(mo).epsilon(1e-14));
        CHECK(dec->tau_bar_i == doctest::Approx(ai * rik * tk * rik * bk / (rik * bk + 2)).epsilon(1e-13));
        CHECK(dec->tau_bar_k == doctest::Approx(ak * rki * ti * rki * bi / (rki * bi + 2)).epsilon(1e-13));
        CHECK(std::abs(dec->total() - tau_lifetimes_value(q, 0, 1)) < 1e-12);
        CHECK(std::abs(tau_lifetimes_integral(q, 0, 1) - dec->total()) < 1e-6);
    }
}

TEST_CASE("Gumbel pair: corrected-sign display, generic route") {
    RandomStream rng(22, 0);
    for (int m = 0; m < 20; ++m) {
        auto q = random_pair(rng, 1);
        const double ai = q.alpha[0], ak = q.alpha[1], ti = q.theta_of(0), tk = q.theta_of(1);
        const double bi = q.gens[0].beta(), bk = q.gens[1].beta();
        const double tau = tau_lifetimes_value(q, 0, 1);
        CHECK(tau == doctest::Approx(gumbel_pair_tau(ai, ak, ti, tk, bi, bk)).epsilon(1e-9));
        CHECK(std::abs(tau_lifetimes_integral(q, 0, 1) - tau) < 1e-6);
        for (double t = 0.1; t < 0.95; t += 0.2) {
            const double closed = kendall_fn_lifetimes(q, 0, 1, t);
            CHECK(closed == doctest::Approx(t - (1 - tau) * t * std::log(t)).epsilon(1e-12));
            CHECK(std::abs(kendall_fn_lifetimes_integral(q, 0, 1, t) - closed) < 1e-7);
        }
    }
}

TEST_CASE("mixed pair uses the integral route") {
    auto p = pair_params(0.4, 0.6, 0.3, 0.4, Generator::clayton(2.0), Generator::gumbel(2.0));
    CHECK_FALSE(tau_lifetimes_decomposition(p, 0, 1).has_value());
    CHECK(tau_lifetimes_value(p, 0, 1) == doctest::Approx(tau_lifetimes_integral(p, 0, 1)).epsilon(1e-12));
    // Between the two single-family fits.
    const double t = tau_lifetimes_value(p, 0, 1);
    CHECK(t > tau_marshall_olkin(0.4, 0.6));
    CHECK(t < 1.0);
}

TEST_CASE("Kendall identity and shape of K for random draws") {
    for (int family = 0; family < 3; ++family) {
        RandomStream rng(30 + family, 0);
        for (int m = 0; m < 30; ++m) {
            auto q = random_pair(rng, family);
            auto k = [&](double t) { return kendall_fn_lifetimes(q, 0, 1, t); };
            const double tau = tau_lifetimes_value(q, 0, 1);
            CHECK(std::abs(tau - tau_from_kendall_fn(k, 1e-9)) < 1e-6);
            const auto grid = interior_grid(1000);
            double prev = 0.0;
            for (double t : grid) {
                const double v = k(t);
                CHECK(v >= t - 1e-14);
                CHECK(v >= prev - 1e-14);
                prev = v;
            }
        }
    }
}

TEST_CASE("report carries grid and decomposition") {
    auto p = pair_params(0.5, 0.5, 0.5, 0.5, Generator::clayton(2.0), Generator::clayton(2.0));
    const auto report = tau_lifetimes(p, 0, 1, 1000, 2);
    CHECK(report.pair == "T1,T2");
    CHECK(report.grid_t.size() == 1000);
    CHECK(report.grid_k.size() == 1000);
    CHECK(report.decomposition.has_value());
    CHECK(report.grid_t.front() == doctest::Approx(1.0 / 1001.0));
    const auto serial = kendall_grid_serial([&](double t) { return kendall_fn_lifetimes(p, 0, 1, t); }, 1000);
    CHECK(serial == report.grid_k);
}

TEST_CASE("systemic taus") {
    auto p = pair_params(0.5, 0.5, 0.0, 0.5, Generator::clayton(2.0), Generator::clayton(2.0));
    CHECK(tau_systemic(p, 1, SystemicMode::VsIdiosyncratic) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(tau_systemic(p, 1, SystemicMode::VsLifetime) == doctest::Approx(0.5 + 0.5 * 0.5 * (1.0 / 3.0)).epsilon(1e-13));
    CHECK(tau_systemic(p, 0, SystemicMode::VsIdiosyncratic) == 0.0);
    auto one = pair_params(1.0, 0.5, 0.2, 0.5, Generator::clayton(2.0), Generator::clayton(2.0));
    CHECK(tau_systemic(one, 0, SystemicMode::VsLifetime) == 1.0);
    // Gumbel systemic-vs-lifetime against the generic path with alpha_i = 1.
    auto g = pair_params(0.6, 0.5, 0.2, 0.5, Generator::gumbel(2.0), Generator::gumbel(3.0));
    auto sys = pair_params(1.0, 0.5, 0.0, 0.5, Generator::gumbel(2.0), Generator::gumbel(3.0));
    CHECK(tau_systemic(g, 1, SystemicMode::VsLifetime) ==
          doctest::Approx(tau_lifetimes_integral(sys, 0, 1)).epsilon(1e-6));
}

TEST_CASE("Clayton systemic riskiness is increasing in theta and beta") {
    double prev = -1.0;
    for (double th = 0.05; th < 0.95; th += 0.05) {
        auto p = pair_params(0.5, 0.5, 0.0, th, Generator::clayton(2.0), Generator::clayton(2.0));
        const double v = tau_systemic(p, 1, SystemicMode::VsIdiosyncratic);
        CHECK(v > prev);
        prev = v;
    }
    prev = -1.0;
    for (double b = 0.2; b < 10; b += 0.4) {
        auto p = pair_params(0.5, 0.5, 0.0, 0.5, Generator::clayton(2.0), Generator::clayton(b));
        const double v = tau_systemic(p, 1, SystemicMode::VsIdiosyncratic);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("Clayton Kendall functions are ordered by beta") {
    for (double theta : {0.3, 0.8})
        for (double t = 0.05; t < 1.0; t += 0.05)
            CHECK(kendall_fn_khoudraji({Generator::clayton(1.0), theta}, t) >=
                  kendall_fn_khoudraji({Generator::clayton(3.0), theta}, t));
}
