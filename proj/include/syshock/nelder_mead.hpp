#pragma once

#include <functional>
#include <vector>

namespace syshock {

struct NelderMeadOptions {
    int max_iters = 5000;
    /// Stop when every vertex is within x_tol (max norm) of the best one.
    double x_tol = 1e-8;
    /// Or when the best value drops below f_target.
    double f_target = 1e-12;
    double initial_step = 0.5;
    /// Coordinates in which the diameter is measured; identity when empty.
    /// Reparameterized problems pass the constrained parameters here so a
    /// simplex drifting toward a bound at infinity still collapses.
    std::function<std::vector<double>(const std::vector<double>&)> measure;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Unconstrained Nelder-Mead with dimension-adaptive coefficients
/// (reflection 1, expansion 1+2/n, contraction 0.75-1/(2n), shrink 1-1/n).
/// On collapse the simplex is rebuilt around the best vertex; the run counts
/// as converged once a rebuilt simplex collapses again with a relative gain
/// below 1e-8. Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace syshock
