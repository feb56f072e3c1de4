#pragma once

// Bracketed scalar root finding and derivative-free 1-D minimization.

#include <cmath>
#include <functional>

#include "qcc/types.hpp"

namespace qcc {

struct RootOptions {
    double residual_tol = 1e-12; // |f(root)| target, caller pre-scales
    int max_iter = 200;
};

// Finds a root of f on [a, b] where f(a) and f(b) have opposite (or zero)
// signs. Bisection with an Illinois-type regula-falsi step each iteration;
// the bracket is guaranteed to shrink, so convergence does not depend on the
// secant behaving well near flat extrema.
double solve_bracketed(const std::function<double(double)>& f, double a, double b,
                       const RootOptions& opt = {});

// Golden-section/parabolic minimization of f on [a, b] (Brent style, no
// derivatives). Returns the abscissa of the minimum.
double minimize_scalar(const std::function<double(double)>& f, double a, double b,
                       double x_rel_tol = 1e-13, int max_iter = 200);

} // namespace qcc
