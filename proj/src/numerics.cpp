#include "syshock/numerics.hpp"

#include "syshock/error.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

namespace syshock::numerics {
namespace {

struct Panel {
    double a, m, b;
    double fa, fm, fb;
    double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const Function& f, const Panel& p, double tol, int depth) {
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
    const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol || !(lm > p.a && rm < p.b)) {
        return left + right + delta / 15.0;
    }
    return refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
           refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const Function& f, double a, double b, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    if (b < a) return -adaptive_simpson(f, b, a, abs_tol, max_depth);
    // Four starting panels guard against a single coarse panel that happens
    // to look converged on a peaked integrand.
    constexpr int kPanels = 4;
    const double h = (b - a) / kPanels;
    double total = 0.0;
    double left = a;
    double f_left = f(a);
    for (int k = 0; k < kPanels; ++k) {
        const double right = (k + 1 == kPanels) ? b : a + (k + 1) * h;
        const double mid = 0.5 * (left + right);
        const double f_mid = f(mid);
        const double f_right = f(right);
        const Panel p{left, mid, right, f_left, f_mid, f_right,
                      simpson(left, right, f_left, f_mid, f_right)};
        total += refine(f, p, abs_tol / kPanels, max_depth);
        left = right;
        f_left = f_right;
    }
    if (!std::isfinite(total)) {
        throw NumericalError("adaptive_simpson: non-finite integral on [" + std::to_string(a) +
                             ", " + std::to_string(b) + "]");
    }
    return total;
}

double solve_bracketed(const Function& f, double lo, double hi, double abs_tol, double rel_tol) {
    const double flo = f(lo);
    if (flo == 0.0) return lo;
    const double fhi = f(hi);
    if (fhi == 0.0) return hi;
    if (!(std::isfinite(flo) && std::isfinite(fhi)) || (flo > 0.0) == (fhi > 0.0)) {
        throw NumericalError("solve_bracketed: root not bracketed on [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
    }
    std::uintmax_t iters = 200;
    const auto done = [abs_tol, rel_tol](double x, double y) {
        const double width = std::abs(y - x);
        return width <= abs_tol || width <= rel_tol * std::min(std::abs(x), std::abs(y));
    };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
    if (iters >= 200 && !done(a, b)) {
        throw NumericalError("solve_bracketed: no convergence after 200 iterations");
    }
    return 0.5 * (a + b);
}

}  // namespace syshock::numerics
