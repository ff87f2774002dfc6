#include "syshock/nelder_mead.hpp"

#include "syshock/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace syshock {
namespace {

using Point = std::vector<double>;

struct Simplex {
    std::vector<Point> x;
    std::vector<double> f;
};

double diameter(const Simplex& s, std::size_t best, const NelderMeadOptions& opts) {
    double out = 0.0;
    if (!opts.measure) {
        for (const auto& v : s.x)
            for (std::size_t c = 0; c < v.size(); ++c) out = std::max(out, std::abs(v[c] - s.x[best][c]));
        return out;
    }
    const Point centre = opts.measure(s.x[best]);
    for (const auto& v : s.x) {
        const Point m = opts.measure(v);
        for (std::size_t c = 0; c < m.size(); ++c) out = std::max(out, std::abs(m[c] - centre[c]));
    }
    return out;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    if (n == 0) throw ValidationError("nelder_mead: empty starting point");
    const double dn = static_cast<double>(n);
    const double rho = 1.0;
    const double chi = 1.0 + 2.0 / dn;
    const double gamma = 0.75 - 0.5 / dn;
    const double sigma = 1.0 - 1.0 / dn;

    NelderMeadResult result;
    auto eval = [&](const Point& p) {
        ++result.evaluations;
        const double v = f(p);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    Simplex s;
    auto build = [&](const Point& centre, double f_centre) {
        s.x.assign(n + 1, centre);
        s.f.assign(n + 1, f_centre);
        for (std::size_t c = 0; c < n; ++c) {
            s.x[c + 1][c] += opts.initial_step;
            s.f[c + 1] = eval(s.x[c + 1]);
        }
    };
    build(x0, eval(x0));

    std::vector<std::size_t> order(n + 1);
    Point centroid(n), xr(n), xe(n), xc(n);
    double last_collapse = std::numeric_limits<double>::infinity();

    for (;;) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Stable sort keeps the ordering reproducible on ties.
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        if (s.f[best] < opts.f_target) {
            result.converged = true;
            break;
        }
        if (diameter(s, best, opts) < opts.x_tol) {
            if (last_collapse - s.f[best] <= 1e-8 * std::abs(last_collapse)) {
                result.converged = true;
                break;
            }
            last_collapse = s.f[best];
            const Point centre = s.x[best];
            const double fc = s.f[best];
            build(centre, fc);
            continue;
        }
        if (result.iterations >= opts.max_iters) break;
        ++result.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v <= n; ++v) {
            if (v == worst) continue;
            for (std::size_t c = 0; c < n; ++c) centroid[c] += s.x[v][c] / dn;
        }
        for (std::size_t c = 0; c < n; ++c) xr[c] = centroid[c] + rho * (centroid[c] - s.x[worst][c]);
        const double fr = eval(xr);

        if (fr < s.f[best]) {
            for (std::size_t c = 0; c < n; ++c) xe[c] = centroid[c] + chi * (xr[c] - centroid[c]);
            const double fe = eval(xe);
            if (fe < fr) {
                s.x[worst] = xe;
                s.f[worst] = fe;
            } else {
                s.x[worst] = xr;
                s.f[worst] = fr;
            }
            continue;
        }
        if (fr < s.f[second]) {
            s.x[worst] = xr;
            s.f[worst] = fr;
            continue;
        }
        // Outside contraction when the reflected point beats the worst one.
        const bool outside = fr < s.f[worst];
        for (std::size_t c = 0; c < n; ++c) {
            const double toward = outside ? xr[c] : s.x[worst][c];
            xc[c] = centroid[c] + gamma * (toward - centroid[c]);
        }
        const double fc = eval(xc);
        if (fc < (outside ? fr : s.f[worst])) {
            s.x[worst] = xc;
            s.f[worst] = fc;
            continue;
        }
        for (std::size_t v = 0; v <= n; ++v) {
            if (v == best) continue;
            for (std::size_t c = 0; c < n; ++c)
                s.x[v][c] = s.x[best][c] + sigma * (s.x[v][c] - s.x[best][c]);
            s.f[v] = eval(s.x[v]);
        }
    }

    const auto best_it = std::min_element(s.f.begin(), s.f.end());
    const auto best = static_cast<std::size_t>(best_it - s.f.begin());
    result.x = s.x[best];
    result.f = s.f[best];
    return result;
}

}  // namespace syshock
