#pragma once

#include "syshock/rng.hpp"

#include <string>
#include <utility>

namespace syshock {

enum class Family { Clayton, Gumbel, Independence };

std::string to_string(Family family);
/// Parses "clayton", "gumbel" or "independence" (case-insensitive).
Family parse_family(const std::string& name);

/// Strict Archimedean generator phi with phi(0)=1, decreasing, convex and
/// vanishing at infinity.
///
/// Besides the textbook phi, phi^{-1} and h = phi' o phi^{-1}, the generator
/// exposes log-domain helpers. Survival functions in the model are powers of
/// G(x)=exp(-x), so working on log u keeps tails and near-one arguments exact.
class Generator {
public:
    /// Clayton phi(x)=(1+x)^{-1/beta}, beta>0; Gumbel phi(x)=exp(-x^{1/beta}),
    /// beta>=1. Clayton beta<1e-9 and Gumbel |beta-1|<1e-12 collapse to the
    /// independence generator exp(-x). Throws ValidationError otherwise.
    Generator(Family family, double beta);
    Generator() : Generator(Family::Independence, 0.0) {}

    static Generator clayton(double beta) { return {Family::Clayton, beta}; }
    static Generator gumbel(double beta) { return {Family::Gumbel, beta}; }
    static Generator independence() { return {Family::Independence, 0.0}; }

    Family family() const { return family_; }
    /// Zero for the independence generator.
    double beta() const { return beta_; }

    double phi(double x) const;
    /// Throws DomainError unless 0 < u <= 1.
    double phi_inv(double u) const;
    /// phi'(phi^{-1}(x)) for x in (0,1); throws DomainError otherwise.
    double h(double x) const;

    /// ln phi(x) for x in [0, +inf].
    double log_phi(double x) const;
    /// phi^{-1}(exp(log_u)) for log_u <= 0.
    double phi_inv_exp(double log_u) const;
    /// phi^{-1}(exp(log_a)) - phi^{-1}(exp(log_b)) for log_a <= log_b <= 0,
    /// without cancellation or inf - inf.
    double phi_inv_exp_diff(double log_a, double log_b) const;
    /// ln( h(exp(log_x)) / h(exp(log_y)) ) for log_x, log_y <= 0.
    double log_h_ratio(double log_x, double log_y) const;

    /// Kendall's tau of the Archimedean copula generated by phi.
    double kendall_tau() const;

    friend bool operator==(const Generator&, const Generator&) = default;

private:
    Family family_;
    double beta_;
};

/// Bivariate Archimedean copula C(u,v) = phi(phi^{-1}(u) + phi^{-1}(v)).
class PairCopula {
public:
    PairCopula() = default;
    explicit PairCopula(Generator generator) : gen_(generator) {}

    const Generator& generator() const { return gen_; }

    /// Boundary arguments short-circuit: C(u,0)=C(0,v)=0, C(u,1)=u, C(1,v)=v.
    double cop(double u, double v) const;

    /// dC/du = h(C(u,v))/h(u). Requires u in (0,1) and v in [0,1].
    double dcop_du(double u, double v) const;

    /// v such that dC/du(u, v) = w, i.e. the conditional quantile of V given U=u.
    double conditional_quantile(double u, double w) const;

    /// Draws (U,V) with joint distribution C by conditional inversion.
    std::pair<double, double> sample_pair(RandomStream& rng) const;

private:
    Generator gen_;
};

}  // namespace syshock
