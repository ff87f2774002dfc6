#pragma once

#include "syshock/archimedean.hpp"
#include "syshock/shock_model.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace syshock {

/// Copula C~(u,v) = C(g(u), v) u / g(u) with C Archimedean and g(u) = u^theta,
/// the law of (X_0, X_j) when F_{Y_j} = F_{X_0}^theta. theta = 1 is plain C.
struct KhoudrajiSpec {
    Generator generator;
    double theta = 1.0;
};

/// Kendall function K(t) of the Khoudraji copula. Clayton and Gumbel use
/// closed forms, everything else the one-dimensional integral representation.
/// Throws DomainError unless t in (0,1) and theta in (0,1].
double kendall_fn_khoudraji(const KhoudrajiSpec& spec, double t);

/// The integral representation t - t ln t + theta t ln t
///   + theta * int_t^1 h(u^{theta-1} t) / h(u^theta) du, for any generator.
double kendall_fn_khoudraji_integral(const KhoudrajiSpec& spec, double t, double tol = 1e-9);

/// Kendall's tau of the Khoudraji copula: theta beta/(beta+2) for Clayton,
/// the tail-integral form for Gumbel, 3 - 4 int K otherwise.
double tau_khoudraji(const KhoudrajiSpec& spec);

/// tau = 3 - 4 int_0^1 K(t) dt with K from the closed form.
double tau_from_kendall_fn(const std::function<double(double)>& kendall_fn, double tol = 1e-9);

/// I(a, inf, beta) = int_a^inf z^{-beta} / (z + 1) dz, a > 0, beta >= 1.
double improper_tail_integral(double a, double beta);

/// I(a, b, beta) for finite b >= a > 0.
double tail_integral(double a, double b, double beta);

/// a^beta I(a, b, beta) = a int_{a/b}^1 w^{beta-1} / (a + w) dw, with the
/// limits a -> inf (giving (1 - (a/b)^beta)/beta) and b = inf handled.
/// Pass the ratio a/b directly, which stays finite when a and b do not.
double scaled_tail_integral(double a, double a_over_b, double beta);

/// Ingredients of a copula of the form C(g(u), v) u / g(u) for the generic
/// Kendall-function route.
struct GenericPair {
    std::function<double(double, double)> copula;    // C(x, v)
    std::function<double(double, double)> dcopula;   // dC/dx (x, v)
    std::function<double(double)> g;
    std::function<double(double)> dg;
};

/// GenericPair for the Khoudraji copula of spec.
GenericPair khoudraji_pair(const KhoudrajiSpec& spec);

/// K(t) = t - t ln t + t ln g(t) + int_t^1 dC(g(u), l_t(u)) g'(u)/g(u) u du
/// where l_t(u) solves C(g(u), l) = g(u) t / u, found by root finding inside
/// adaptive quadrature.
double kendall_fn_generic_pair(const GenericPair& pair, double t, double tol = 1e-9);

/// Additive pieces of a pairwise Kendall's tau: the Marshall-Olkin part and
/// the contributions of the (Y_k, X_k) and (Y_i, X_i) dependence.
struct TauDecomposition {
    double tau_mo = 0.0;
    double tau_bar_i = 0.0;  // driven by theta_k, beta_k
    double tau_bar_k = 0.0;  // driven by theta_i, beta_i
    double total() const { return tau_mo + tau_bar_i + tau_bar_k; }
};

/// Kendall's tau of the Marshall-Olkin copula with parameters alpha_i, alpha_k.
double tau_marshall_olkin(double alpha_i, double alpha_k);

/// Kendall function of (T_i, T_k). All-Clayton and all-Gumbel pairs use the
/// closed forms, other pairs the integral representation.
double kendall_fn_lifetimes(const ModelParams& params, std::size_t i, std::size_t k, double t);

/// Integral representation of the (T_i, T_k) Kendall function; any generators.
double kendall_fn_lifetimes_integral(const ModelParams& params, std::size_t i, std::size_t k,
                                     double t, double tol = 1e-8);

/// Terms of the Clayton Kendall function decomposition
/// K = K0 + Ki + Kk - 2 KI.
struct ClaytonKendallTerms {
    double k_mo = 0.0;     // Marshall-Olkin part
    double k_i = 0.0;      // Clayton-type part in (theta_k, beta_k)
    double k_k = 0.0;      // Clayton-type part in (theta_i, beta_i)
    double k_indep = 0.0;  // t - t ln t
    double combined() const { return k_mo + k_i + k_k - 2.0 * k_indep; }
};
ClaytonKendallTerms clayton_kendall_terms(const ModelParams& params, std::size_t i,
                                          std::size_t k, double t);

struct KendallReport {
    std::string pair;
    double tau = 0.0;
    std::vector<double> grid_t;
    std::vector<double> grid_k;
    std::optional<TauDecomposition> decomposition;
};

/// Kendall's tau of (T_i, T_k): closed form with decomposition for
/// single-family pairs, 3 - 4 int K otherwise.
double tau_lifetimes_value(const ModelParams& params, std::size_t i, std::size_t k);

/// Closed-form decomposition; empty for pairs without one.
std::optional<TauDecomposition> tau_lifetimes_decomposition(const ModelParams& params,
                                                            std::size_t i, std::size_t k);

/// 3 - 4 int K via the integral representation; any generators.
double tau_lifetimes_integral(const ModelParams& params, std::size_t i, std::size_t k);

/// Full report: tau, decomposition and the Kendall function sampled on
/// grid_points uniform interior points m/(grid_points+1). The grid is filled
/// with `workers` OpenMP threads.
KendallReport tau_lifetimes(const ModelParams& params, std::size_t i, std::size_t k,
                            std::size_t grid_points = 1000, int workers = 1);

enum class SystemicMode { VsIdiosyncratic, VsLifetime };

/// tau(X_0, X_k) (systemic riskiness of entity k) or tau(X_0, T_k).
double tau_systemic(const ModelParams& params, std::size_t k, SystemicMode mode);

/// Evaluates f on the interior grid m/(n+1), m = 1..n, in parallel.
std::vector<double> kendall_grid(const std::function<double(double)>& f, std::size_t n,
                                 int workers);
/// Serial reference for kendall_grid.
std::vector<double> kendall_grid_serial(const std::function<double(double)>& f, std::size_t n);
std::vector<double> interior_grid(std::size_t n);

}  // namespace syshock
