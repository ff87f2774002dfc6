#pragma once

#include <functional>

namespace syshock::numerics {

using Function = std::function<double(double)>;

/// Adaptive Simpson quadrature with interval bisection.
///
/// Each half receives half of the parent's absolute tolerance; a panel is
/// accepted when |S_left + S_right - S| <= 15 tol, with the Richardson
/// correction added. The integrand is evaluated at both endpoints, so callers
/// must return the limiting value there.
double adaptive_simpson(const Function& f, double a, double b, double abs_tol = 1e-9,
                        int max_depth = 60);

/// Root of a monotone function on [lo, hi] with f(lo) and f(hi) of opposite
/// sign (either may be zero). Terminates when the bracket is narrower than
/// rel_tol relative to its smaller endpoint or abs_tol absolute.
/// Throws NumericalError if the bracket is invalid or 200 iterations pass.
double solve_bracketed(const Function& f, double lo, double hi, double abs_tol = 1e-12,
                       double rel_tol = 1e-13);

}  // namespace syshock::numerics
