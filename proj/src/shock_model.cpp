#include "syshock/shock_model.hpp"

#include "syshock/error.hpp"
#include "syshock/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace syshock {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_entity(const ModelParams& params, std::size_t j) {
    if (j >= params.dim()) {
        throw ValidationError("entity index " + std::to_string(j) + " out of range for d=" +
                              std::to_string(params.dim()));
    }
}

// log of the (T_i,T_k) survival copula written for arbitrary (alpha, theta, phi)
// of the two entities; alpha_i = 1, theta_i = 0 gives the (X_0, T_k) copula.
double pair_copula_log(double alpha_i, double theta_i, const Generator& gen_i, double alpha_k,
                       double theta_k, const Generator& gen_k, double log_ui, double log_uk) {
    const double m = std::min(alpha_i * log_ui, alpha_k * log_uk);
    double log_c = (1.0 - theta_i - theta_k) * m;
    const auto factor = [m](double alpha, double theta, const Generator& gen, double log_u) {
        const double s = gen.phi_inv_exp(theta * m) +
                         gen.phi_inv_exp_diff(log_u * (1.0 - alpha * (1.0 - theta)),
                                              log_u * alpha * theta);
        return gen.log_phi(s);
    };
    log_c += factor(alpha_i, theta_i, gen_i, log_ui);
    log_c += factor(alpha_k, theta_k, gen_k, log_uk);
    return log_c;
}

double pair_copula_value(double alpha_i, double theta_i, const Generator& gen_i, double alpha_k,
                         double theta_k, const Generator& gen_k, double u_i, double u_k) {
    if (!(u_i >= 0.0 && u_i <= 1.0 && u_k >= 0.0 && u_k <= 1.0)) {
        throw DomainError("pair copula arguments must lie in [0,1]");
    }
    if (u_i == 0.0 || u_k == 0.0) return 0.0;
    if (u_i == 1.0) return u_k;
    if (u_k == 1.0) return u_i;
    return std::exp(pair_copula_log(alpha_i, theta_i, gen_i, alpha_k, theta_k, gen_k,
                                    std::log(u_i), std::log(u_k)));
}

bool closed_form_family(const ModelParams& params, Family* family) {
    bool has_clayton = false;
    bool has_gumbel = false;
    for (const auto& g : params.gens) {
        has_clayton |= g.family() == Family::Clayton;
        has_gumbel |= g.family() == Family::Gumbel;
    }
    if (has_clayton && has_gumbel) return false;
    *family = has_gumbel ? Family::Gumbel : Family::Clayton;
    return true;
}

}  // namespace

double ModelParams::lambda(std::size_t j) const {
    return lambda0 * (1.0 - alpha[j]) / alpha[j];
}

double ModelParams::hat_lambda() const {
    double total = lambda0;
    for (std::size_t j = 0; j < dim(); ++j) total += lambda(j);
    return total;
}

void validate(const ModelParams& params) {
    const std::size_t d = params.dim();
    if (d == 0) throw ValidationError("model needs at least one entity");
    if (params.theta.size() != d + 1) {
        throw ValidationError("theta must have d+1 = " + std::to_string(d + 1) +
                              " entries, got " + std::to_string(params.theta.size()));
    }
    if (params.gens.size() != d) {
        throw ValidationError("need one generator per entity (" + std::to_string(d) + "), got " +
                              std::to_string(params.gens.size()));
    }
    if (!(std::isfinite(params.lambda0) && params.lambda0 > 0.0)) {
        throw ValidationError("lambda0 must be positive");
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double a = params.alpha[j];
        if (!(a > 0.0 && a <= 1.0)) {
            throw ValidationError("alpha_" + std::to_string(j + 1) + " = " + std::to_string(a) +
                                  " outside (0,1]");
        }
    }
    double sum = 0.0;
    for (std::size_t j = 0; j <= d; ++j) {
        const double t = params.theta[j];
        if (!(std::isfinite(t) && t >= 0.0)) {
            throw ValidationError("theta_" + std::to_string(j) + " must be nonnegative");
        }
        sum += t;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("theta must sum to 1, got " + std::to_string(sum));
    }
}

ModelParams make_params(std::vector<double> alpha, std::vector<double> theta,
                        std::vector<Generator> gens, double lambda0) {
    ModelParams p{lambda0, std::move(alpha), std::move(theta), std::move(gens)};
    validate(p);
    return p;
}

ModelParams from_intensities(std::span<const double> gamma, std::span<const double> eta,
                             std::vector<Generator> gens) {
    const std::size_t d = eta.size();
    if (gamma.size() != d + 1) {
        throw ValidationError("gamma must have d+1 entries");
    }
    double lambda0 = 0.0;
    for (double g : gamma) {
        if (!(std::isfinite(g) && g >= 0.0)) throw ValidationError("gamma must be nonnegative");
        lambda0 += g;
    }
    if (!(lambda0 > 0.0)) {
        throw ValidationError("at least one gamma must be positive (no systemic shock)");
    }
    std::vector<double> alpha(d);
    std::vector<double> theta(d + 1);
    theta[0] = gamma[0] / lambda0;
    for (std::size_t j = 0; j < d; ++j) {
        if (!(eta[j] > 0.0)) throw ValidationError("eta must be positive");
        if (eta[j] < gamma[j + 1]) {
            throw ValidationError("eta_" + std::to_string(j + 1) + " < gamma_" +
                                  std::to_string(j + 1));
        }
        const double lambda_j = eta[j] - gamma[j + 1];
        alpha[j] = lambda0 / (lambda0 + lambda_j);
        theta[j + 1] = gamma[j + 1] / lambda0;
    }
    return make_params(std::move(alpha), std::move(theta), std::move(gens), lambda0);
}

std::vector<Generator> uniform_generators(std::size_t d, Family family, double beta) {
    return std::vector<Generator>(d, Generator(family, beta));
}

bool single_family(const ModelParams& params, Family* family) {
    if (params.gens.empty()) return false;
    const Family f = params.gens.front().family();
    const bool same = std::all_of(params.gens.begin(), params.gens.end(),
                                  [f](const Generator& g) { return g.family() == f; });
    if (same && family != nullptr) *family = f;
    return same;
}

double marginal_survival_X(const ModelParams& params, std::size_t j, double x) {
    require_entity(params, j);
    if (!(x >= 0.0)) throw DomainError("marginal_survival_X: x must be nonnegative");
    if (x == 0.0) return 1.0;
    const Generator& gen = params.gens[j];
    const double s = gen.phi_inv_exp_diff(-params.eta(j) * x, -params.gamma(j) * x);
    return std::exp(gen.log_phi(s));
}

double inverse_marginal_survival_X(const ModelParams& params, std::size_t j, double v) {
    require_entity(params, j);
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("inverse_marginal_survival_X: v in (0,1]");
    if (v == 1.0) return 0.0;
    if (params.lambda(j) == 0.0) return kInf;
    const Generator& gen = params.gens[j];
    const double target = gen.phi_inv_exp(std::log(v));
    const double eta = params.eta(j);
    const double gamma = params.gamma(j);
    const auto excess = [&](double x) {
        return gen.phi_inv_exp_diff(-eta * x, -gamma * x) - target;
    };
    double hi = 1.0 / eta;
    for (int k = 0; excess(hi) < 0.0; ++k) {
        if (k > 2000) throw NumericalError("inverse_marginal_survival_X: no upper bracket");
        hi *= 2.0;
    }
    return numerics::solve_bracketed(excess, 0.0, hi, 1e-300, 1e-13);
}

double marginal_survival_T(const ModelParams& params, std::size_t j, double x) {
    require_entity(params, j);
    if (!(x >= 0.0)) throw DomainError("marginal_survival_T: x must be nonnegative");
    return std::exp(-(params.lambda0 + params.lambda(j)) * x);
}

double joint_survival_T(const ModelParams& params, std::span<const double> t) {
    const std::size_t d = params.dim();
    if (t.size() != d) throw ValidationError("joint_survival_T: expected d arguments");
    double m = 0.0;
    for (double x : t) {
        if (!(x >= 0.0)) throw DomainError("joint_survival_T: arguments must be nonnegative");
        m = std::max(m, x);
    }
    double log_f = -params.gamma0() * m;
    for (std::size_t j = 0; j < d; ++j) {
        const Generator& gen = params.gens[j];
        const double gamma = params.gamma(j);
        // phi^{-1}(F_{X_j}(t_j)) is exactly the generator difference.
        const double s = gen.phi_inv_exp(-gamma * m) +
                         gen.phi_inv_exp_diff(-params.eta(j) * t[j], -gamma * t[j]);
        log_f += gen.log_phi(s);
    }
    return std::exp(log_f);
}

double survival_copula_T(const ModelParams& params, std::span<const double> u) {
    const std::size_t d = params.dim();
    if (u.size() != d) throw ValidationError("survival_copula_T: expected d arguments");
    for (double x : u) {
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("survival_copula_T: arguments in [0,1]");
    }
    if (std::any_of(u.begin(), u.end(), [](double x) { return x == 0.0; })) return 0.0;
    std::vector<double> log_u(d);
    double m = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        log_u[j] = std::log(u[j]);
        m = std::min(m, params.alpha[j] * log_u[j]);
    }
    double log_c = params.theta0() * m;
    for (std::size_t j = 0; j < d; ++j) {
        const Generator& gen = params.gens[j];
        const double a = params.alpha[j];
        const double th = params.theta_of(j);
        const double s = gen.phi_inv_exp(th * m) +
                         gen.phi_inv_exp_diff(log_u[j] * (1.0 - a * (1.0 - th)), log_u[j] * a * th);
        log_c += gen.log_phi(s);
    }
    return std::exp(log_c);
}

double pair_survival_copula(const ModelParams& params, std::size_t i, std::size_t k, double u_i,
                            double u_k) {
    require_entity(params, i);
    require_entity(params, k);
    if (i == k) throw ValidationError("pair_survival_copula: i and k must differ");
    return pair_copula_value(params.alpha[i], params.theta_of(i), params.gens[i], params.alpha[k],
                             params.theta_of(k), params.gens[k], u_i, u_k);
}

double systemic_pair_copula(const ModelParams& params, std::size_t k, double u0, double u_k) {
    require_entity(params, k);
    return pair_copula_value(1.0, 0.0, Generator::independence(), params.alpha[k],
                             params.theta_of(k), params.gens[k], u0, u_k);
}

double simultaneous_default_prob(const ModelParams& params, double t) {
    if (!(t >= 0.0)) throw DomainError("simultaneous_default_prob: t must be nonnegative");
    Family family{};
    if (!closed_form_family(params, &family)) {
        return simultaneous_default_prob_quadrature(params, t);
    }
    const double hat = params.hat_lambda();
    double total = 0.0;
    if (family == Family::Clayton) {
        // Independence generators enter as Clayton with beta = 0.
        total = params.gamma0() / hat * std::exp(-hat * t);
        for (std::size_t j = 0; j < params.dim(); ++j) {
            const double rate = hat + params.lambda(j) * params.gens[j].beta();
            total += params.gamma(j) / rate * std::exp(-rate * t);
        }
    } else {
        double weight = params.gamma0();
        for (std::size_t j = 0; j < params.dim(); ++j) {
            const double gamma = params.gamma(j);
            if (gamma == 0.0) continue;
            const double beta = params.gens[j].family() == Family::Gumbel ? params.gens[j].beta()
                                                                          : 1.0;
            weight += gamma * std::pow(1.0 + params.lambda(j) / gamma, 1.0 - beta);
        }
        total = weight / hat * std::exp(-hat * t);
    }
    return std::clamp(total, 0.0, 1.0);
}

double simultaneous_default_prob_quadrature(const ModelParams& params, double t) {
    if (!(t >= 0.0)) throw DomainError("simultaneous_default_prob: t must be nonnegative");
    const double hat = params.hat_lambda();
    const double log_top = -t;  // log G(t)
    const double scale = std::exp(hat * log_top) / hat;
    double total = params.gamma0() * scale;
    for (std::size_t j = 0; j < params.dim(); ++j) {
        const double gamma = params.gamma(j);
        if (gamma == 0.0) continue;
        const Generator& gen = params.gens[j];
        const double eta = params.eta(j);
        const double lambda = params.lambda(j);
        // y = G(t) w^{1/hat}: y^{hat-1} dy becomes G(t)^hat / hat dw.
        const auto integrand = [&](double w) {
            const double log_y =
                std::min(log_top + std::log(std::max(w, 1e-300)) / hat, -1e-280);
            return std::exp(gen.log_h_ratio(eta * log_y, gamma * log_y) - lambda * log_y);
        };
        total += gamma * scale * numerics::adaptive_simpson(integrand, 0.0, 1.0, 1e-9 / gamma, 60);
    }
    return std::clamp(total, 0.0, 1.0);
}

}  // namespace syshock
