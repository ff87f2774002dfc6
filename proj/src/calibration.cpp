#include "syshock/calibration.hpp"

#include "syshock/dependence.hpp"
#include "syshock/error.hpp"
#include "syshock/nelder_mead.hpp"
#include "syshock/parallel.hpp"
#include "syshock/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace syshock {
namespace {

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

// value = lo + (hi - lo) * logistic(x)
double to_range(double x, double lo, double hi) { return lo + (hi - lo) * logistic(x); }
double from_range(double v, double lo, double hi) { return logit((v - lo) / (hi - lo)); }

}  // namespace

TauMatrix::TauMatrix(std::size_t d, std::vector<std::string> labels)
    : d_(d), labels_(std::move(labels)), values_(d * (d > 0 ? d - 1 : 0) / 2, 0.0) {
    if (d < 2) throw ValidationError("TauMatrix needs at least two entities");
    if (labels_.empty())
        for (std::size_t j = 0; j < d; ++j) labels_.push_back(std::to_string(j + 1));
    if (labels_.size() != d) throw ValidationError("TauMatrix: label count differs from d");
}

std::size_t TauMatrix::index(std::size_t i, std::size_t k) const {
    if (i == k || i >= d_ || k >= d_) throw ValidationError("TauMatrix: bad pair index");
    if (i > k) std::swap(i, k);
    // Rows 0..i-1 hold (d-1) + ... + (d-i) entries.
    return i * (2 * d_ - i - 1) / 2 + (k - i - 1);
}

void TauMatrix::set(std::size_t i, std::size_t k, double value) {
    if (!std::isfinite(value) || value < -1.0 || value > 1.0)
        throw ValidationError("TauMatrix: entry must be finite and in [-1, 1]");
    values_[index(i, k)] = value;
}

ParameterMap::ParameterMap(std::size_t d, Family family) : d_(d), family_(family) {
    if (d < 1) throw ValidationError("ParameterMap: d must be positive");
    if (family == Family::Independence)
        throw ValidationError("calibration family must be clayton or gumbel");
}

double ParameterMap::beta_lo() const { return family_ == Family::Clayton ? kEps : 1.0 + kEps; }

ModelParams ParameterMap::to_params(const std::vector<double>& x) const {
    if (x.size() != size()) throw ValidationError("ParameterMap: wrong vector length");
    std::vector<double> alpha(d_), theta(d_ + 1);
    std::vector<Generator> gens;
    gens.reserve(d_);
    // Softmax with the theta_0 logit pinned at zero, shifted for stability.
    double top = 0.0;
    for (std::size_t j = 0; j < d_; ++j) top = std::max(top, x[d_ + j]);
    double total = std::exp(-top);
    theta[0] = total;
    for (std::size_t j = 0; j < d_; ++j) total += (theta[j + 1] = std::exp(x[d_ + j] - top));
    for (auto& t : theta) t /= total;
    for (std::size_t j = 0; j < d_; ++j) {
        alpha[j] = to_range(x[j], kEps, 1.0 - kEps);
        gens.emplace_back(family_, to_range(x[2 * d_ + j], beta_lo(), kBetaMax));
    }
    ModelParams p;
    p.lambda0 = 1.0;
    p.alpha = std::move(alpha);
    p.theta = std::move(theta);
    p.gens = std::move(gens);
    return p;
}

std::vector<double> ParameterMap::to_unconstrained(const ModelParams& params) const {
    if (params.dim() != d_) throw ValidationError("ParameterMap: dimension mismatch");
    std::vector<double> x(size());
    for (std::size_t j = 0; j < d_; ++j) {
        x[j] = from_range(params.alpha[j], kEps, 1.0 - kEps);
        if (params.theta[j + 1] <= 0.0 || params.theta[0] <= 0.0)
            throw ValidationError("ParameterMap: theta must be strictly positive to invert");
        x[d_ + j] = std::log(params.theta[j + 1]) - std::log(params.theta[0]);
        if (params.gens[j].family() != family_)
            throw ValidationError("ParameterMap: generator family mismatch");
        x[2 * d_ + j] = from_range(params.gens[j].beta(), beta_lo(), kBetaMax);
    }
    return x;
}

bool ParameterMap::on_boundary(const ModelParams& params, double tol) const {
    for (std::size_t j = 0; j < d_; ++j) {
        const double a = params.alpha[j];
        if (a - kEps < tol || (1.0 - kEps) - a < tol) return true;
        const double b = params.gens[j].beta();
        if (params.gens[j].family() == Family::Independence) return true;
        if (b - beta_lo() < tol || kBetaMax - b < tol) return true;
    }
    return std::any_of(params.theta.begin(), params.theta.end(),
                       [tol](double t) { return t < tol; });
}

TauMatrix model_taus(const ModelParams& params, const std::vector<std::string>& labels) {
    TauMatrix out(params.dim(), labels);
    for (std::size_t i = 0; i < params.dim(); ++i)
        for (std::size_t k = i + 1; k < params.dim(); ++k)
            out.set(i, k, std::clamp(tau_lifetimes_value(params, i, k), -1.0, 1.0));
    return out;
}

double objective(const ModelParams& params, const TauMatrix& target) {
    if (params.dim() != target.dim())
        throw ValidationError("objective: parameter and target dimensions differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < params.dim(); ++i) {
        for (std::size_t k = i + 1; k < params.dim(); ++k) {
            const double r = target.at(i, k) - tau_lifetimes_value(params, i, k);
            sum += r * r;
        }
    }
    return sum;
}

CalibrationResult calibrate(const TauMatrix& target, Family family, const OptimizerSettings& opts) {
    const std::size_t d = target.dim();
    if (d < 2) throw ValidationError("calibrate: need at least two entities");
    if (opts.restarts < 1) throw ValidationError("calibrate: restarts must be at least 1");
    if (opts.max_iters < 1) throw ValidationError("calibrate: max_iters must be at least 1");
    if (opts.workers < 1) throw ValidationError("calibrate: workers must be at least 1");
    for (double v : target.values())
        if (v < 0.0 || v >= 1.0) throw ValidationError("calibrate: target taus must lie in [0, 1)");
    const ParameterMap map(d, family);

    auto f = [&](const std::vector<double>& x) {
        try {
            return objective(map.to_params(x), target);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    NelderMeadOptions nm;
    nm.max_iters = opts.max_iters;
    nm.x_tol = opts.tolerance;
    nm.f_target = 1e-12;
    nm.measure = [&map](const std::vector<double>& x) {
        const ModelParams p = map.to_params(x);
        std::vector<double> out(p.alpha);
        out.insert(out.end(), p.theta.begin(), p.theta.end());
        for (const auto& g : p.gens) out.push_back(g.beta());
        return out;
    };

    const auto restarts = static_cast<std::size_t>(opts.restarts);
    std::vector<NelderMeadResult> runs(restarts);
    std::vector<double> start_values(restarts);
    parallel_for(restarts, opts.workers, [&](std::size_t r) {
        // Restart 0 starts at the centre of the box, the rest at seeded points.
        std::vector<double> x0(map.size(), 0.0);
        if (r > 0) {
            RandomStream rng(opts.seed, r);
            for (auto& v : x0) v = -3.0 + 6.0 * rng.uniform();
        }
        start_values[r] = f(x0);
        runs[r] = nelder_mead(f, x0, nm);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r)
        if (runs[r].f < runs[best].f) best = r;

    CalibrationResult result;
    result.params = map.to_params(runs[best].x);
    result.objective = objective(result.params, target);
    result.fitted_taus = model_taus(result.params, target.labels());
    result.n_restarts_used = opts.restarts;
    result.best_restart = static_cast<int>(best);
    bool improved = false;
    for (std::size_t r = 0; r < restarts; ++r) improved = improved || runs[r].f < start_values[r];
    improved = improved || runs[best].f < nm.f_target;
    result.converged = improved && runs[best].converged && std::isfinite(result.objective);
    result.boundary = map.on_boundary(result.params);
    return result;
}

std::vector<RiskinessRecord> riskiness_report(const CalibrationResult& result) {
    const ModelParams& p = result.params;
    std::vector<RiskinessRecord> out;
    for (std::size_t j = 0; j < p.dim(); ++j) {
        RiskinessRecord rec;
        rec.entity = j < result.fitted_taus.labels().size() ? result.fitted_taus.labels()[j]
                                                             : std::to_string(j + 1);
        rec.tau_X0_Xj = std::clamp(tau_systemic(p, j, SystemicMode::VsIdiosyncratic), 0.0, 1.0);
        rec.tau_X0_Tj = std::clamp(tau_systemic(p, j, SystemicMode::VsLifetime), 0.0, 1.0);
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace syshock
