#include "syshock/archimedean.hpp"

#include "syshock/error.hpp"
#include "syshock/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace syshock {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit_open_closed(double u, const char* what) {
    if (!(u > 0.0 && u <= 1.0)) {
        throw DomainError(std::string(what) + ": argument must lie in (0,1], got " +
                          std::to_string(u));
    }
}

}  // namespace

std::string to_string(Family family) {
    switch (family) {
        case Family::Clayton: return "clayton";
        case Family::Gumbel: return "gumbel";
        case Family::Independence: return "independence";
    }
    return "unknown";
}

Family parse_family(const std::string& name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "clayton") return Family::Clayton;
    if (lower == "gumbel") return Family::Gumbel;
    if (lower == "independence") return Family::Independence;
    throw ValidationError("unknown copula family '" + name + "'");
}

Generator::Generator(Family family, double beta) : family_(family), beta_(beta) {
    switch (family) {
        case Family::Clayton:
            if (!(std::isfinite(beta) && beta >= 0.0)) {
                throw ValidationError("Clayton generator needs beta > 0, got " +
                                      std::to_string(beta));
            }
            if (beta < 1e-9) family_ = Family::Independence;
            break;
        case Family::Gumbel:
            if (!(std::isfinite(beta) && beta >= 1.0 - 1e-12)) {
                throw ValidationError("Gumbel generator needs beta >= 1, got " +
                                      std::to_string(beta));
            }
            if (std::abs(beta - 1.0) < 1e-12) family_ = Family::Independence;
            break;
        case Family::Independence:
            break;
    }
    if (family_ == Family::Independence) beta_ = 0.0;
}

double Generator::phi(double x) const {
    if (!(x >= 0.0)) throw DomainError("phi: argument must be nonnegative");
    return std::exp(log_phi(x));
}

double Generator::log_phi(double x) const {
    if (x == kInf) return -kInf;
    switch (family_) {
        case Family::Clayton: return -std::log1p(x) / beta_;
        case Family::Gumbel: return -std::pow(x, 1.0 / beta_);
        case Family::Independence: return -x;
    }
    return 0.0;
}

double Generator::phi_inv(double u) const {
    require_unit_open_closed(u, "phi_inv");
    return phi_inv_exp(std::log(u));
}

double Generator::phi_inv_exp(double log_u) const {
    if (log_u >= 0.0) return 0.0;
    switch (family_) {
        case Family::Clayton: return std::expm1(-beta_ * log_u);
        case Family::Gumbel: return std::pow(-log_u, beta_);
        case Family::Independence: return -log_u;
    }
    return 0.0;
}

double Generator::phi_inv_exp_diff(double log_a, double log_b) const {
    if (log_a >= log_b) return 0.0;
    switch (family_) {
        case Family::Clayton: {
            // e^{-beta a} - e^{-beta b} = e^{-beta a} (1 - e^{-beta (b - a)})
            const double scale = std::exp(-beta_ * log_a);
            return scale * -std::expm1(-beta_ * (log_b - log_a));
        }
        case Family::Gumbel: return std::pow(-log_a, beta_) - std::pow(-log_b, beta_);
        case Family::Independence: return log_b - log_a;
    }
    return 0.0;
}

double Generator::h(double x) const {
    if (!(x > 0.0 && x < 1.0)) {
        throw DomainError("h: argument must lie in (0,1), got " + std::to_string(x));
    }
    switch (family_) {
        case Family::Clayton: return -std::pow(x, 1.0 + beta_) / beta_;
        case Family::Gumbel: return -x * std::pow(-std::log(x), 1.0 - beta_) / beta_;
        case Family::Independence: return -x;
    }
    return 0.0;
}

double Generator::log_h_ratio(double log_x, double log_y) const {
    if (log_x == log_y) return 0.0;
    switch (family_) {
        case Family::Clayton: return (1.0 + beta_) * (log_x - log_y);
        case Family::Gumbel:
            // h(1) = -inf for beta > 1, hence the +-inf limits at a zero log.
            if (log_y >= 0.0) return -kInf;
            if (log_x >= 0.0) return kInf;
            return (log_x - log_y) + (1.0 - beta_) * std::log(log_x / log_y);
        case Family::Independence: return log_x - log_y;
    }
    return 0.0;
}

double Generator::kendall_tau() const {
    switch (family_) {
        case Family::Clayton: return beta_ / (beta_ + 2.0);
        case Family::Gumbel: return 1.0 - 1.0 / beta_;
        case Family::Independence: return 0.0;
    }
    return 0.0;
}

double PairCopula::cop(double u, double v) const {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
        throw DomainError("cop: arguments must lie in [0,1]");
    }
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;
    const double s = gen_.phi_inv_exp(std::log(u)) + gen_.phi_inv_exp(std::log(v));
    return std::exp(gen_.log_phi(s));
}

double PairCopula::dcop_du(double u, double v) const {
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("dcop_du: u must lie in (0,1), got " + std::to_string(u));
    }
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("dcop_du: v must lie in [0,1]");
    if (v == 0.0) return 0.0;
    if (v == 1.0) return 1.0;
    const double log_u = std::log(u);
    const double log_c = gen_.log_phi(gen_.phi_inv_exp(log_u) + gen_.phi_inv_exp(std::log(v)));
    return std::clamp(std::exp(gen_.log_h_ratio(log_c, log_u)), 0.0, 1.0);
}

double PairCopula::conditional_quantile(double u, double w) const {
    if (!(w > 0.0 && w < 1.0)) throw DomainError("conditional_quantile: w must lie in (0,1)");
    return numerics::solve_bracketed([&](double v) { return dcop_du(u, v) - w; }, 0.0, 1.0,
                                     1e-15, 1e-13);
}

std::pair<double, double> PairCopula::sample_pair(RandomStream& rng) const {
    const double u = rng.uniform();
    const double w = rng.uniform();
    return {u, conditional_quantile(u, w)};
}

}  // namespace syshock
