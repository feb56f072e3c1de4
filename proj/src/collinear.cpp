#include "qcc/collinear.hpp"

#include <algorithm>
#include <cmath>

namespace qcc {

namespace {

int pair_of(int i, int j) {
    const int lo = std::min(i, j), hi = std::max(i, j);
    for (int p = 0; p < 3; ++p)
        if (kPairBodies[p] == std::pair<int, int>{lo, hi}) return p;
    return -1;
}

struct LineGeometry {
    std::array<double, 3> s{}; // per body index
};

LineGeometry positions_from_gaps(const std::array<int, 3>& ordering, const MassTriple& masses,
                                 double g1, double g2) {
    const double total = masses.total();
    const double left = -(masses[ordering[1]] * g1 + masses[ordering[2]] * (g1 + g2)) / total;
    LineGeometry geo;
    geo.s[static_cast<std::size_t>(ordering[0])] = left;
    geo.s[static_cast<std::size_t>(ordering[1])] = left + g1;
    geo.s[static_cast<std::size_t>(ordering[2])] = left + g1 + g2;
    return geo;
}

// Raw on-line residuals for all three bodies.
std::array<double, 3> line_residuals(const std::array<double, 3>& s, const System& sys,
                                     double omega_sq) {
    std::array<double, 3> res{};
    for (int i = 0; i < 3; ++i) {
        double grad = 0.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            const double r = std::fabs(s[static_cast<std::size_t>(i)] -
                                       s[static_cast<std::size_t>(j)]);
            const double sign = s[static_cast<std::size_t>(i)] > s[static_cast<std::size_t>(j)]
                                    ? 1.0
                                    : -1.0;
            grad += pair_force_deriv(sys, pair_of(i, j), r) * sign;
        }
        res[static_cast<std::size_t>(i)] =
            grad - omega_sq * sys.masses[i] * s[static_cast<std::size_t>(i)];
    }
    return res;
}

double normalized_residual(const std::array<double, 3>& s, const System& sys, double omega_sq) {
    const auto raw = line_residuals(s, sys, omega_sq);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double scale =
            1.0 + std::fabs(omega_sq * sys.masses[i] * s[static_cast<std::size_t>(i)]);
        worst = std::fmax(worst, std::fabs(raw[static_cast<std::size_t>(i)]) / scale);
    }
    return worst;
}

struct NewtonResult {
    bool converged = false;
    double g1 = 0.0, g2 = 0.0;
    bool fold = false;
};

// Residuals of the outer two bodies as functions of the gaps; the middle
// equation is dependent through action-reaction and the centered centroid.
std::array<double, 2> outer_residuals(const std::array<int, 3>& ordering, const System& sys,
                                      double omega_sq, double g1, double g2) {
    const auto geo = positions_from_gaps(ordering, sys.masses, g1, g2);
    const auto raw = line_residuals(geo.s, sys, omega_sq);
    return {raw[static_cast<std::size_t>(ordering[0])],
            raw[static_cast<std::size_t>(ordering[2])]};
}

NewtonResult damped_newton(const std::array<int, 3>& ordering, const System& sys, double omega_sq,
                           double g1, double g2) {
    NewtonResult out;
    for (int attempt = 0; attempt < 3; ++attempt) {
        double a = g1 * (1.0 + attempt * 1e-3);
        double b = g2 * (1.0 - attempt * 1e-3);
        bool singular = false;

        for (int it = 0; it < 80; ++it) {
            const auto f = outer_residuals(ordering, sys, omega_sq, a, b);
            const double fnorm = std::fmax(std::fabs(f[0]), std::fabs(f[1]));

            // Central-difference Jacobian.
            const double ha = 1e-7 * a, hb = 1e-7 * b;
            const auto fa_p = outer_residuals(ordering, sys, omega_sq, a + ha, b);
            const auto fa_m = outer_residuals(ordering, sys, omega_sq, a - ha, b);
            const auto fb_p = outer_residuals(ordering, sys, omega_sq, a, b + hb);
            const auto fb_m = outer_residuals(ordering, sys, omega_sq, a, b - hb);
            const double j11 = (fa_p[0] - fa_m[0]) / (2.0 * ha);
            const double j21 = (fa_p[1] - fa_m[1]) / (2.0 * ha);
            const double j12 = (fb_p[0] - fb_m[0]) / (2.0 * hb);
            const double j22 = (fb_p[1] - fb_m[1]) / (2.0 * hb);

            const double det = j11 * j22 - j12 * j21;
            const double jscale = std::fmax(std::fabs(j11) + std::fabs(j12),
                                            std::fabs(j21) + std::fabs(j22));
            if (std::fabs(det) < 1e-14 * jscale * jscale) {
                singular = true;
                break;
            }

            const double da = (f[0] * j22 - f[1] * j12) / det;
            const double db = (f[1] * j11 - f[0] * j21) / det;

            double lambda = 1.0;
            bool stepped = false;
            for (int bt = 0; bt < 40; ++bt) {
                const double na = a - lambda * da;
                const double nb = b - lambda * db;
                if (na > 0.0 && nb > 0.0) {
                    const auto fn = outer_residuals(ordering, sys, omega_sq, na, nb);
                    const double fn_norm = std::fmax(std::fabs(fn[0]), std::fabs(fn[1]));
                    if (fn_norm < fnorm || fn_norm < 1e-15) {
                        a = na;
                        b = nb;
                        stepped = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if (!stepped) break;

            const auto geo = positions_from_gaps(ordering, sys.masses, a, b);
            if (normalized_residual(geo.s, sys, omega_sq) < 1e-13) {
                out.converged = true;
                out.g1 = a;
                out.g2 = b;
                out.fold = std::fabs(det) < 1e-6 * jscale * jscale;
                return out;
            }
        }
        if (!singular) break; // genuine non-convergence; perturbing will not help
    }
    return out;
}

} // namespace

std::array<std::array<int, 3>, 3> collinear_orderings() {
    return {{{0, 1, 2}, {1, 0, 2}, {0, 2, 1}}};
}

std::vector<LineConfig> solve_collinear(const std::array<int, 3>& ordering, const System& sys,
                                        double omega_sq, int multistart_count) {
    if (!(omega_sq > 0.0)) throw std::invalid_argument("solve_collinear: omega_sq must be positive");
    if (multistart_count < 8)
        throw std::invalid_argument("solve_collinear: need at least 8 multistart seeds");

    // Characteristic length from the base pair: where the attractive term of
    // the mass-absorbed pair condition alone balances omega^2.
    const double alpha = sys.exps.attractive;
    const double c1 = sys.masses.total() * alpha * sys.couplings.A[kPair12] /
                      sys.masses.pair_product(kPair12);
    const double scale = std::pow(c1 / omega_sq, 1.0 / (alpha + 2.0));

    const int n_ratio = std::max(4, multistart_count / 2);
    const int n_scale = (multistart_count + n_ratio - 1) / n_ratio;

    std::vector<LineConfig> found;
    for (int si = 0; si < n_scale; ++si) {
        const double s_factor = n_scale == 1 ? 1.0 : 0.5 + 1.5 * si / double(n_scale - 1);
        for (int ri = 0; ri < n_ratio; ++ri) {
            const double exponent = -1.2 + 2.4 * ri / double(n_ratio - 1);
            const double rho = std::pow(10.0, exponent);
            const double g1 = scale * s_factor * std::sqrt(rho);
            const double g2 = scale * s_factor / std::sqrt(rho);

            const NewtonResult r = damped_newton(ordering, sys, omega_sq, g1, g2);
            if (!r.converged) continue;

            const auto geo = positions_from_gaps(ordering, sys.masses, r.g1, r.g2);
            const double resid = normalized_residual(geo.s, sys, omega_sq);
            if (resid > 1e-10) continue;
            if (std::fmin(r.g1, r.g2) < 1e-10) continue;

            const bool dup = std::any_of(found.begin(), found.end(), [&](const LineConfig& lc) {
                return std::fabs(lc.gap1 - r.g1) <= 1e-8 * std::fmax(lc.gap1, r.g1) &&
                       std::fabs(lc.gap2 - r.g2) <= 1e-8 * std::fmax(lc.gap2, r.g2);
            });
            if (dup) continue;

            LineConfig lc;
            lc.s = geo.s;
            lc.ordering = ordering;
            lc.gap1 = r.g1;
            lc.gap2 = r.g2;
            lc.residual = resid;
            lc.fold_flag = r.fold;
            found.push_back(lc);
        }
    }

    std::sort(found.begin(), found.end(), [](const LineConfig& a, const LineConfig& b) {
        if (a.gap1 != b.gap1) return a.gap1 < b.gap1;
        return a.gap2 < b.gap2;
    });
    return found;
}

CollinearCount count_collinear(const System& sys, double omega_sq, int multistart_count) {
    CollinearCount out;
    for (const auto& ordering : collinear_orderings()) {
        CollinearCount::PerOrdering per;
        per.ordering = ordering;
        per.solutions = solve_collinear(ordering, sys, omega_sq, multistart_count);
        out.total += static_cast<int>(per.solutions.size());
        out.orderings.push_back(std::move(per));
    }
    return out;
}

PlanarState embed_on_line(const LineConfig& line, const MassTriple& masses) {
    (void)masses; // positions already centered with these masses
    PlanarState state;
    for (int i = 0; i < 3; ++i) state.pos[static_cast<std::size_t>(i)] = {line.s[static_cast<std::size_t>(i)], 0.0};
    return state;
}

} // namespace qcc
