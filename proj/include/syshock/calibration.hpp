#pragma once

#include "syshock/archimedean.hpp"
#include "syshock/shock_model.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace syshock {

/// Strict upper triangle of a d x d matrix of Kendall taus, stored row by row.
class TauMatrix {
public:
    TauMatrix() = default;
    /// Labels default to "1".."d". Throws ValidationError for d < 2.
    explicit TauMatrix(std::size_t d, std::vector<std::string> labels = {});

    std::size_t dim() const { return d_; }
    std::size_t pairs() const { return values_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& values() const { return values_; }

    /// Entry for i != k, either order.
    double at(std::size_t i, std::size_t k) const { return values_[index(i, k)]; }
    /// Throws ValidationError on non-finite values or values outside [-1, 1].
    void set(std::size_t i, std::size_t k, double value);

private:
    std::size_t index(std::size_t i, std::size_t k) const;

    std::size_t d_ = 0;
    std::vector<std::string> labels_;
    std::vector<double> values_;
};

struct OptimizerSettings {
    int max_iters = 5000;
    int restarts = 20;
    std::uint64_t seed = 20170101;
    double tolerance = 1e-8;
    int workers = 1;
};

struct CalibrationResult {
    ModelParams params;
    double objective = 0.0;
    TauMatrix fitted_taus;
    int n_restarts_used = 0;
    bool converged = false;
    /// Some constrained coordinate ended within 1e-4 of its bound.
    bool boundary = false;
    /// Restart that produced the returned fit.
    int best_restart = -1;
};

/// Maps R^{3d} onto the feasible set: logistic alpha_j in (eps, 1-eps),
/// logistic beta_j in (eps, B) for Clayton or (1+eps, B) for Gumbel, and
/// theta = softmax(0, x_1..x_d) with theta_0 the reference weight.
/// eps = 1e-6, B = 50, lambda0 = 1.
class ParameterMap {
public:
    static constexpr double kEps = 1e-6;
    static constexpr double kBetaMax = 50.0;

    ParameterMap(std::size_t d, Family family);

    std::size_t dim() const { return d_; }
    std::size_t size() const { return 3 * d_; }
    Family family() const { return family_; }

    ModelParams to_params(const std::vector<double>& x) const;
    /// Inverse of to_params. Requires params strictly inside the feasible set.
    std::vector<double> to_unconstrained(const ModelParams& params) const;
    /// True when any coordinate is within tol of its bound (theta_j near 0
    /// counts, theta_0 included).
    bool on_boundary(const ModelParams& params, double tol = 1e-4) const;

private:
    double beta_lo() const;

    std::size_t d_;
    Family family_;
};

/// Model taus of all pairs from the closed forms.
TauMatrix model_taus(const ModelParams& params, const std::vector<std::string>& labels = {});

/// Sum over i<k of (target_ik - tau_ik(params))^2. Dimension mismatch throws
/// ValidationError.
double objective(const ModelParams& params, const TauMatrix& target);

/// Kendall-tau moment matching by Nelder-Mead from opts.restarts seeded
/// starting points, run on opts.workers threads. The best restart wins, ties
/// going to the lowest index. Never throws on optimizer failure; reports
/// converged=false instead. Family must be Clayton or Gumbel.
CalibrationResult calibrate(const TauMatrix& target, Family family,
                            const OptimizerSettings& opts = {});

struct RiskinessRecord {
    std::string entity;
    double tau_X0_Xj = 0.0;
    double tau_X0_Tj = 0.0;
};

/// Per-entity tau(X_0, X_j) and tau(X_0, T_j) of the fitted model.
std::vector<RiskinessRecord> riskiness_report(const CalibrationResult& result);

}  // namespace syshock
