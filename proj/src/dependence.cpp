#include "syshock/dependence.hpp"

#include "syshock/error.hpp"
#include "syshock/numerics.hpp"
#include "syshock/parallel.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace syshock {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_open_unit(double t, const char* what) {
    if (!(t > 0.0 && t < 1.0)) {
        throw DomainError(std::string(what) + ": t must lie in (0,1), got " + std::to_string(t));
    }
}

void require_theta(double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) {
        throw DomainError("Khoudraji theta must lie in (0,1], got " + std::to_string(theta));
    }
}

// One side of a (T_i, T_k) pair. alpha = 1, theta = 0 stands for X_0.
struct Side {
    double alpha;
    double theta;
    Generator gen;
};

Side side_of(const ModelParams& params, std::size_t j) {
    return {params.alpha[j], params.theta_of(j), params.gens[j]};
}

void require_pair(const ModelParams& params, std::size_t i, std::size_t k) {
    if (i >= params.dim() || k >= params.dim()) {
        throw ValidationError("entity index out of range");
    }
    if (i == k) throw ValidationError("pairwise dependence needs two distinct entities");
}

bool is_clayton_like(const Generator& g) { return g.family() != Family::Gumbel; }
bool is_gumbel_like(const Generator& g) { return g.family() != Family::Clayton; }

enum class PairRoute { Clayton, Gumbel, Integral };

PairRoute route_for(const Side& a, const Side& b) {
    if (is_clayton_like(a.gen) && is_clayton_like(b.gen)) return PairRoute::Clayton;
    if (is_gumbel_like(a.gen) && is_gumbel_like(b.gen)) return PairRoute::Gumbel;
    return PairRoute::Integral;
}

// (t - t^{1+beta rho}) / beta, with its beta -> 0 limit -rho t ln t.
double clayton_shape(double beta, double rho, double t) {
    const double log_t = std::log(t);
    if (beta == 0.0) return -rho * t * log_t;
    return -t * std::expm1(beta * rho * log_t) / beta;
}

struct ClaytonCoefficients {
    double tau_mo, rho_ik, rho_ki;
};

ClaytonCoefficients clayton_coefficients(const Side& si, const Side& sk) {
    const double tau_mo = tau_marshall_olkin(si.alpha, sk.alpha);
    return {tau_mo, (1.0 - sk.alpha) / sk.alpha * tau_mo, (1.0 - si.alpha) / si.alpha * tau_mo};
}

double clayton_pair_kendall(const Side& si, const Side& sk, double t) {
    const auto c = clayton_coefficients(si, sk);
    const double w_k = sk.theta * si.alpha;
    const double w_i = si.theta * sk.alpha;
    return t + w_k * clayton_shape(sk.gen.beta(), c.rho_ik, t) +
           w_i * clayton_shape(si.gen.beta(), c.rho_ki, t) -
           t * std::log(t) * ((1.0 - w_k) * c.rho_ik + (1.0 - w_i) * c.rho_ki);
}

double clayton_bar(double alpha_other, double rho, double theta, double beta) {
    const double b = rho * beta;
    return alpha_other * rho * theta * b / (b + 2.0);
}

TauDecomposition clayton_pair_tau(const Side& si, const Side& sk) {
    const auto c = clayton_coefficients(si, sk);
    return {c.tau_mo, clayton_bar(si.alpha, c.rho_ik, sk.theta, sk.gen.beta()),
            clayton_bar(sk.alpha, c.rho_ki, si.theta, si.gen.beta())};
}

// Contribution of the (Y_own, X_own) Gumbel dependence to tau(T_other, T_own).
double gumbel_bar(const Side& other, const Side& own, double tau_mo) {
    const double beta = own.gen.family() == Family::Gumbel ? own.gen.beta() : 1.0;
    if (own.theta == 0.0 || beta == 1.0) return 0.0;
    const double q = own.theta * own.alpha / (1.0 - own.alpha * (1.0 - own.theta));
    const double x = other.alpha * own.theta;
    const double a = x < 1.0 ? x / (1.0 - x) : kInf;
    const double scaled = scaled_tail_integral(a, q, beta);
    return -tau_mo * own.theta * (1.0 - std::pow(q, beta - 1.0)) + (beta - 1.0) * scaled;
}

TauDecomposition gumbel_pair_tau(const Side& si, const Side& sk) {
    const double tau_mo = tau_marshall_olkin(si.alpha, sk.alpha);
    return {tau_mo, gumbel_bar(si, sk, tau_mo), gumbel_bar(sk, si, tau_mo)};
}

double integral_pair_kendall(const Side& si, const Side& sk, double t, double tol) {
    // Scale-free: lambda0 = 1, lambda_j = (1-alpha_j)/alpha_j, gamma_j = theta_j.
    const double lambda_i = (1.0 - si.alpha) / si.alpha;
    const double lambda_k = (1.0 - sk.alpha) / sk.alpha;
    const double gamma_i = si.theta;
    const double gamma_k = sk.theta;
    const double big = 1.0 + lambda_i + lambda_k;
    const double log_t = std::log(t);
    const double span = -log_t;
    const double z = span / big;
    const double x_i = span / (1.0 + lambda_i);
    const double x_k = span / (1.0 + lambda_k);
    const double a_i = 1.0 + lambda_i - gamma_k;
    const double a_k = 1.0 + lambda_k - gamma_i;

    double k_value = t + t * a_i * (x_i - z) + t * a_k * (x_k - z);
    // -int (F_Z P)(x) h(t/(F_Z P)(x)) / h(F_Y(x)) dF_Y(x) with F_Y = G^gamma.
    const auto side_integral = [&](double a, double gamma, const Generator& gen, double upper) {
        if (gamma == 0.0 || upper <= z) return 0.0;
        const auto integrand = [&](double x) {
            const double log_arg = std::min(log_t + a * x, 0.0);
            return std::exp(-(a + gamma) * x + gen.log_h_ratio(log_arg, -gamma * x));
        };
        return gamma * numerics::adaptive_simpson(integrand, z, upper, tol / gamma, 60);
    };
    k_value += side_integral(a_i, gamma_k, sk.gen, x_i);
    k_value += side_integral(a_k, gamma_i, si.gen, x_k);
    return k_value;
}

double pair_kendall(const Side& si, const Side& sk, double t) {
    switch (route_for(si, sk)) {
        case PairRoute::Clayton: return clayton_pair_kendall(si, sk, t);
        case PairRoute::Gumbel: {
            const double tau = gumbel_pair_tau(si, sk).total();
            return t - (1.0 - tau) * t * std::log(t);
        }
        case PairRoute::Integral: return integral_pair_kendall(si, sk, t, 1e-8);
    }
    return 0.0;
}

std::optional<TauDecomposition> pair_decomposition(const Side& si, const Side& sk) {
    switch (route_for(si, sk)) {
        case PairRoute::Clayton: return clayton_pair_tau(si, sk);
        case PairRoute::Gumbel: return gumbel_pair_tau(si, sk);
        case PairRoute::Integral: return std::nullopt;
    }
    return std::nullopt;
}

double pair_tau_integral(const Side& si, const Side& sk) {
    const auto k_fn = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return integral_pair_kendall(si, sk, t, 1e-10);
    };
    return 3.0 - 4.0 * numerics::adaptive_simpson(k_fn, 0.0, 1.0, 1e-8, 60);
}

double pair_tau(const Side& si, const Side& sk) {
    if (auto dec = pair_decomposition(si, sk)) return dec->total();
    return pair_tau_integral(si, sk);
}

}  // namespace

double kendall_fn_khoudraji(const KhoudrajiSpec& spec, double t) {
    require_open_unit(t, "kendall_fn_khoudraji");
    require_theta(spec.theta);
    const double theta = spec.theta;
    const double beta = spec.generator.beta();
    const double log_t = std::log(t);
    switch (spec.generator.family()) {
        case Family::Clayton:
            return t * (1.0 + theta / beta) - (1.0 - theta) * t * log_t -
                   theta / beta * std::pow(t, 1.0 + beta);
        case Family::Gumbel: {
            if (theta == 1.0) return t - t * log_t / beta;
            const double a = theta / (1.0 - theta);
            const double scaled = scaled_tail_integral(a, 0.0, beta);
            return t - t * log_t * (1.0 - (beta - 1.0) * scaled);
        }
        case Family::Independence: break;
    }
    return kendall_fn_khoudraji_integral(spec, t);
}

double kendall_fn_khoudraji_integral(const KhoudrajiSpec& spec, double t, double tol) {
    require_open_unit(t, "kendall_fn_khoudraji_integral");
    require_theta(spec.theta);
    const double theta = spec.theta;
    const double log_t = std::log(t);
    const Generator& gen = spec.generator;
    const auto integrand = [&](double u) {
        const double log_u = std::log(u);
        return std::exp(gen.log_h_ratio((theta - 1.0) * log_u + log_t, theta * log_u));
    };
    return t - t * log_t + theta * t * log_t +
           theta * numerics::adaptive_simpson(integrand, t, 1.0, tol / theta, 60);
}

double tau_from_kendall_fn(const std::function<double(double)>& kendall_fn, double tol) {
    const auto k_fn = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return kendall_fn(t);
    };
    return 3.0 - 4.0 * numerics::adaptive_simpson(k_fn, 0.0, 1.0, tol, 60);
}

double tau_khoudraji(const KhoudrajiSpec& spec) {
    require_theta(spec.theta);
    const double theta = spec.theta;
    const double beta = spec.generator.beta();
    switch (spec.generator.family()) {
        case Family::Clayton: return theta * beta / (beta + 2.0);
        case Family::Gumbel: {
            if (theta == 1.0) return 1.0 - 1.0 / beta;
            const double a = theta / (1.0 - theta);
            return (1.0 - 1.0 / beta) * beta * scaled_tail_integral(a, 0.0, beta);
        }
        case Family::Independence: break;
    }
    return tau_from_kendall_fn([&](double t) { return kendall_fn_khoudraji_integral(spec, t); });
}

namespace {

// int_lo^1 w^{beta-1} / (a + w) dw. Double-exponential quadrature copes with
// the w^{beta-1} kink at zero far better than bisection does.
double unit_tail(double a, double lo, double beta) {
    thread_local boost::math::quadrature::tanh_sinh<double> quad;
    const auto integrand = [a, beta](double w) { return std::pow(w, beta - 1.0) / (a + w); };
    double error = 0.0;
    const double value = quad.integrate(integrand, lo, 1.0, 1e-13, &error);
    if (!std::isfinite(value)) throw NumericalError("tail integral did not converge");
    return value;
}

}  // namespace

double scaled_tail_integral(double a, double a_over_b, double beta) {
    if (!(a > 0.0)) throw DomainError("scaled_tail_integral: a must be positive");
    if (!(beta >= 1.0)) throw DomainError("scaled_tail_integral: beta must be >= 1");
    if (!(a_over_b >= 0.0)) throw DomainError("scaled_tail_integral: a/b must be >= 0");
    if (a_over_b >= 1.0) return 0.0;
    if (a == kInf) return (1.0 - std::pow(a_over_b, beta)) / beta;
    return a * unit_tail(a, a_over_b, beta);
}

double improper_tail_integral(double a, double beta) {
    if (!(a > 0.0)) throw DomainError("improper_tail_integral: a must be positive");
    if (!(beta >= 1.0)) throw DomainError("improper_tail_integral: beta must be >= 1");
    // z = a / w maps (a, inf) onto (0, 1]: I = a^{1-beta} int_0^1 w^{beta-1}/(a+w) dw.
    return std::pow(a, 1.0 - beta) * unit_tail(a, 0.0, beta);
}

double tail_integral(double a, double b, double beta) {
    if (!(a > 0.0)) throw DomainError("tail_integral: a must be positive");
    if (!(beta >= 1.0)) throw DomainError("tail_integral: beta must be >= 1");
    if (!(b >= a)) throw DomainError("tail_integral: b must be >= a");
    if (b == a) return 0.0;
    if (b == kInf) return improper_tail_integral(a, beta);
    return std::pow(a, 1.0 - beta) * unit_tail(a, a / b, beta);
}

GenericPair khoudraji_pair(const KhoudrajiSpec& spec) {
    require_theta(spec.theta);
    const PairCopula copula(spec.generator);
    const double theta = spec.theta;
    return {
        [copula](double x, double v) { return copula.cop(x, v); },
        [copula](double x, double v) { return copula.dcop_du(x, v); },
        [theta](double u) { return std::pow(u, theta); },
        [theta](double u) { return theta * std::pow(u, theta - 1.0); },
    };
}

double kendall_fn_generic_pair(const GenericPair& pair, double t, double tol) {
    require_open_unit(t, "kendall_fn_generic_pair");
    const auto integrand = [&](double u) {
        // dC at x = g(1) = 1 is a limit; evaluate just inside the boundary.
        u = std::min(u, 1.0 - 1e-13);
        const double gu = pair.g(u);
        const double target = gu * t / u;
        double level = 1.0;
        if (target < gu) {
            level = numerics::solve_bracketed(
                [&](double v) { return pair.copula(gu, v) - target; }, 0.0, 1.0, 1e-15, 1e-13);
        }
        return pair.dcopula(gu, level) * pair.dg(u) / gu * u;
    };
    return t - t * std::log(t) + t * std::log(pair.g(t)) +
           numerics::adaptive_simpson(integrand, t, 1.0, tol, 60);
}

double tau_marshall_olkin(double alpha_i, double alpha_k) {
    return alpha_i * alpha_k / (alpha_i + alpha_k - alpha_i * alpha_k);
}

double kendall_fn_lifetimes(const ModelParams& params, std::size_t i, std::size_t k, double t) {
    require_pair(params, i, k);
    require_open_unit(t, "kendall_fn_lifetimes");
    return pair_kendall(side_of(params, i), side_of(params, k), t);
}

double kendall_fn_lifetimes_integral(const ModelParams& params, std::size_t i, std::size_t k,
                                     double t, double tol) {
    require_pair(params, i, k);
    require_open_unit(t, "kendall_fn_lifetimes_integral");
    return integral_pair_kendall(side_of(params, i), side_of(params, k), t, tol);
}

ClaytonKendallTerms clayton_kendall_terms(const ModelParams& params, std::size_t i,
                                          std::size_t k, double t) {
    require_pair(params, i, k);
    require_open_unit(t, "clayton_kendall_terms");
    const Side si = side_of(params, i);
    const Side sk = side_of(params, k);
    if (route_for(si, sk) != PairRoute::Clayton) {
        throw ValidationError("clayton_kendall_terms: both generators must be Clayton");
    }
    const auto c = clayton_coefficients(si, sk);
    const double log_t = std::log(t);
    const double w_k = sk.theta * si.alpha;
    const double w_i = si.theta * sk.alpha;
    ClaytonKendallTerms terms;
    terms.k_mo = t - (1.0 - c.tau_mo) * t * log_t;
    terms.k_i = t + w_k * clayton_shape(sk.gen.beta(), c.rho_ik, t) -
                (1.0 - w_k * c.rho_ik) * t * log_t;
    terms.k_k = t + w_i * clayton_shape(si.gen.beta(), c.rho_ki, t) -
                (1.0 - w_i * c.rho_ki) * t * log_t;
    terms.k_indep = t - t * log_t;
    return terms;
}

double tau_lifetimes_value(const ModelParams& params, std::size_t i, std::size_t k) {
    require_pair(params, i, k);
    return pair_tau(side_of(params, i), side_of(params, k));
}

std::optional<TauDecomposition> tau_lifetimes_decomposition(const ModelParams& params,
                                                            std::size_t i, std::size_t k) {
    require_pair(params, i, k);
    return pair_decomposition(side_of(params, i), side_of(params, k));
}

double tau_lifetimes_integral(const ModelParams& params, std::size_t i, std::size_t k) {
    require_pair(params, i, k);
    return pair_tau_integral(side_of(params, i), side_of(params, k));
}

KendallReport tau_lifetimes(const ModelParams& params, std::size_t i, std::size_t k,
                            std::size_t grid_points, int workers) {
    require_pair(params, i, k);
    const Side si = side_of(params, i);
    const Side sk = side_of(params, k);
    KendallReport report;
    report.pair = "T" + std::to_string(i + 1) + ",T" + std::to_string(k + 1);
    report.decomposition = pair_decomposition(si, sk);
    report.tau = report.decomposition ? report.decomposition->total() : pair_tau_integral(si, sk);
    report.grid_t = interior_grid(grid_points);
    report.grid_k = kendall_grid([&](double t) { return pair_kendall(si, sk, t); }, grid_points,
                                 workers);
    return report;
}

double tau_systemic(const ModelParams& params, std::size_t k, SystemicMode mode) {
    if (k >= params.dim()) throw ValidationError("entity index out of range");
    const double theta = params.theta_of(k);
    if (mode == SystemicMode::VsIdiosyncratic) {
        if (theta == 0.0) return 0.0;
        return tau_khoudraji({params.gens[k], theta});
    }
    if (params.alpha[k] == 1.0) return 1.0;
    const Side systemic{1.0, 0.0, Generator::independence()};
    return pair_tau(systemic, side_of(params, k));
}

std::vector<double> interior_grid(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t m = 0; m < n; ++m) {
        t[m] = static_cast<double>(m + 1) / static_cast<double>(n + 1);
    }
    return t;
}

std::vector<double> kendall_grid(const std::function<double(double)>& f, std::size_t n,
                                 int workers) {
    const std::vector<double> t = interior_grid(n);
    std::vector<double> out(n);
    parallel_for(n, workers, [&](std::size_t m) { out[m] = f(t[m]); });
    return out;
}

std::vector<double> kendall_grid_serial(const std::function<double(double)>& f, std::size_t n) {
    const std::vector<double> t = interior_grid(n);
    std::vector<double> out(n);
    for (std::size_t m = 0; m < n; ++m) out[m] = f(t[m]);
    return out;
}

}  // namespace syshock
