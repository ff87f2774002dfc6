#pragma once

#include "syshock/archimedean.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace syshock {

/// Parameters of the lifetime model T_j = min(X_j, X_0), X_0 = min_j Y_j, with
/// exponential baseline G(x) = exp(-x), F_{Y_j} = G^{gamma_j}, F_{Z_j} = G^{eta_j}
/// and an Archimedean survival copula linking each (Y_j, X_j).
///
/// Entities are indexed 0..d-1. theta holds d+1 weights with theta[0] the
/// share of the independent systemic shock Y_0 and theta[j+1] the share of the
/// shock Y_{j+1} tied to entity j.
struct ModelParams {
    double lambda0 = 1.0;
    std::vector<double> alpha;
    std::vector<double> theta;
    std::vector<Generator> gens;

    std::size_t dim() const { return alpha.size(); }
    double theta0() const { return theta[0]; }
    /// theta of entity j (0-based), i.e. theta[j+1].
    double theta_of(std::size_t j) const { return theta[j + 1]; }

    /// Idiosyncratic intensity lambda_j = lambda0 (1 - alpha_j) / alpha_j.
    double lambda(std::size_t j) const;
    /// gamma_j = theta_j lambda0 for entity j.
    double gamma(std::size_t j) const { return theta[j + 1] * lambda0; }
    double gamma0() const { return theta[0] * lambda0; }
    double eta(std::size_t j) const { return gamma(j) + lambda(j); }
    /// lambda_hat = lambda0 + sum_j lambda_j.
    double hat_lambda() const;
};

/// Builds and validates a parameter set: lambda0 > 0, alpha_j in (0,1],
/// theta_j >= 0 summing to one within 1e-9, matching sizes.
ModelParams make_params(std::vector<double> alpha, std::vector<double> theta,
                        std::vector<Generator> gens, double lambda0 = 1.0);

/// Throws ValidationError if the invariants above do not hold.
void validate(const ModelParams& params);

/// Parameters from shock intensities gamma = (gamma_0..gamma_d) and
/// eta = (eta_1..eta_d): lambda0 = sum gamma, alpha_j = lambda0/(lambda0 + eta_j - gamma_j),
/// theta = gamma / lambda0.
ModelParams from_intensities(std::span<const double> gamma, std::span<const double> eta,
                             std::vector<Generator> gens);

/// Same generator for every entity.
std::vector<Generator> uniform_generators(std::size_t d, Family family, double beta);

/// True when every generator shares one family.
bool single_family(const ModelParams& params, Family* family = nullptr);

/// Survival function of the idiosyncratic shock X_j:
/// phi_j(phi_j^{-1}(G^{eta_j}(x)) - phi_j^{-1}(G^{gamma_j}(x))).
double marginal_survival_X(const ModelParams& params, std::size_t j, double x);

/// x with marginal_survival_X(j, x) = v, found by bracketed root finding.
/// Returns +inf when entity j has no idiosyncratic shock (alpha_j = 1).
double inverse_marginal_survival_X(const ModelParams& params, std::size_t j, double v);

/// Survival function of T_j, G^{lambda0 + lambda_j}.
double marginal_survival_T(const ModelParams& params, std::size_t j, double x);

/// Joint survival function of (T_1..T_d) at t.
double joint_survival_T(const ModelParams& params, std::span<const double> t);

/// Survival copula of (T_1..T_d) expressed in (alpha, theta, phi).
double survival_copula_T(const ModelParams& params, std::span<const double> u);

/// Bivariate survival copula of (T_i, T_k); i != k.
double pair_survival_copula(const ModelParams& params, std::size_t i, std::size_t k, double u_i,
                            double u_k);

/// Survival copula of (X_0, T_k): the pair copula with alpha_i = 1, theta_i = 0.
double systemic_pair_copula(const ModelParams& params, std::size_t k, double u0, double u_k);

/// P(T_1 = ... = T_d > t). Single-family parameter sets use closed forms;
/// mixed families fall back to quadrature.
double simultaneous_default_prob(const ModelParams& params, double t);

/// The quadrature route for P(T_1 = ... = T_d > t), valid for any families.
double simultaneous_default_prob_quadrature(const ModelParams& params, double t);

}  // namespace syshock
