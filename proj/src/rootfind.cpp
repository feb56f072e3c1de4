#include "qcc/rootfind.hpp"

#include <algorithm>
#include <cmath>

namespace qcc {

double solve_bracketed(const std::function<double(double)>& f, double a, double b,
                       const RootOptions& opt) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw numerical_error("solve_bracketed: endpoints do not bracket a root");

    double best = a;
    double fbest = std::fabs(fa);
    int side = 0; // Illinois bookkeeping: which endpoint was retained last
    for (int it = 0; it < opt.max_iter; ++it) {
        // Regula-falsi candidate, clamped away from the endpoints so the
        // bracket always shrinks; fall back to the midpoint when degenerate.
        double m = (a * fb - b * fa) / (fb - fa);
        const double lo = a + 0.01 * (b - a);
        const double hi = b - 0.01 * (b - a);
        if (!(m > std::fmin(lo, hi) && m < std::fmax(lo, hi))) m = 0.5 * (a + b);
        const double fm = f(m);

        if (std::fabs(fm) < fbest) {
            best = m;
            fbest = std::fabs(fm);
        }
        if (fm == 0.0) return m;

        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
            if (side == -1) fb *= 0.5; // Illinois weighting
            side = -1;
        } else {
            b = m;
            fb = fm;
            if (side == +1) fa *= 0.5;
            side = +1;
        }

        const double width = std::fabs(b - a);
        const double scale = std::fmax(std::fabs(a), std::fabs(b));
        if (fbest <= opt.residual_tol && width <= 1e-14 * std::fmax(1.0, scale)) return best;
        if (width <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
    }
    if (fbest <= opt.residual_tol) return best;
    throw numerical_error("solve_bracketed: residual tolerance not reached after iteration cap");
}

double minimize_scalar(const std::function<double(double)>& f, double a, double b,
                       double x_rel_tol, int max_iter) {
    // Brent's minimization: golden-section with parabolic acceleration.
    constexpr double golden = 0.3819660112501051;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (a + b);
        const double tol1 = x_rel_tol * std::fabs(x) + 1e-300;
        const double tol2 = 2.0 * tol1;
        if (std::fabs(x - mid) <= tol2 - 0.5 * (b - a)) break;

        bool use_golden = true;
        if (std::fabs(e) > tol1) {
            // Parabola through (x, w, v).
            const double r = (x - w) * (fx - fv);
            double qq = (x - v) * (fx - fw);
            double pp = (x - v) * qq - (x - w) * r;
            qq = 2.0 * (qq - r);
            if (qq > 0.0) pp = -pp;
            qq = std::fabs(qq);
            const double e_old = e;
            e = d;
            if (std::fabs(pp) < std::fabs(0.5 * qq * e_old) && pp > qq * (a - x) &&
                pp < qq * (b - x)) {
                d = pp / qq;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (mid > x) ? tol1 : -tol1;
                use_golden = false;
            }
        }
        if (use_golden) {
            e = (x < mid) ? b - x : a - x;
            d = golden * e;
        }

        const double u = (std::fabs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return x;
}

} // namespace qcc
