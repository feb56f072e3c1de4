#include "qcc/shape.hpp"

#include <cmath>
#include <sstream>

#include "qcc/rootfind.hpp"

namespace qcc {

TriangleClass classify(const ConfigTriple& c, double rel_tol) {
    if (c.status() != TriangleStatus::NonDegenerate)
        throw std::invalid_argument("classify: configuration is not a non-degenerate triangle");
    const auto close = [rel_tol](double a, double b) {
        return std::fabs(a - b) <= rel_tol * std::fmax(std::fabs(a), std::fabs(b));
    };
    const int equal_pairs =
        int(close(c.r12, c.r13)) + int(close(c.r12, c.r23)) + int(close(c.r13, c.r23));
    if (equal_pairs == 3) return TriangleClass::Equilateral;
    if (equal_pairs == 1) return TriangleClass::Isosceles;
    return TriangleClass::Scalene;
}

ShapeFunction make_shape(double c1, double c2, double p, double q, InteractionMode mode) {
    if (!(c1 > 0.0)) throw std::invalid_argument("shape: c1 must be positive");
    if (!(c2 >= 0.0)) throw std::invalid_argument("shape: c2 must be nonnegative");
    if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("shape: exponents must be positive");
    if (p == q) throw std::invalid_argument("shape: p and q must differ");
    if (mode == InteractionMode::AttractiveRepulsive && c2 > 0.0 && q < p)
        throw std::invalid_argument(
            "shape: attractive-repulsive mode requires the repulsive exponent to exceed the "
            "attractive one (q > p)");
    ShapeFunction s{c1, c2, p, q, mode, ShapeKind::Monotone};
    if (mode == InteractionMode::AttractiveRepulsive && c2 > 0.0) s.kind = ShapeKind::TwoBranch;
    return s;
}

ShapeSet build_shapes(const MassTriple& masses, const PairCouplings& couplings,
                      const ExponentPair& exps, InteractionMode mode) {
    if (!(masses.m1 > 0.0) || !(masses.m2 > 0.0) || !(masses.m3 > 0.0))
        throw std::invalid_argument("build_shapes: masses must be strictly positive");
    const double alpha = exps.attractive;
    const double beta = exps.repulsive;
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("build_shapes: exponents must be positive");
    if (alpha == beta) throw std::invalid_argument("build_shapes: alpha must differ from beta");
    if (mode == InteractionMode::AttractiveRepulsive && beta < alpha)
        throw std::invalid_argument("build_shapes: attractive-repulsive mode requires beta > alpha");

    const double total = masses.total();
    ShapeSet set;
    for (int pair = 0; pair < 3; ++pair) {
        const double A = couplings.A[pair];
        const double B = couplings.B[pair];
        if (!(A > 0.0))
            throw std::invalid_argument(std::string("build_shapes: coupling A") + pair_name(pair) +
                                        " must be positive");
        if (!(B >= 0.0))
            throw std::invalid_argument(std::string("build_shapes: coupling B") + pair_name(pair) +
                                        " must be nonnegative");
        const double weight = total / masses.pair_product(pair);
        set.pair[pair] =
            make_shape(alpha * A * weight, beta * B * weight, alpha + 2.0, beta + 2.0, mode);
    }

    set.k = set.pair[kPair13].c1 / set.pair[kPair12].c1;
    set.k1 = set.pair[kPair23].c1 / set.pair[kPair12].c1;
    const double base_c2 = set.pair[kPair12].c2;
    if (base_c2 > 0.0) {
        const double r13 = set.pair[kPair13].c2 / base_c2;
        const double r23 = set.pair[kPair23].c2 / base_c2;
        set.proportional = std::fabs(r13 - set.k) <= 1e-12 * set.k &&
                           std::fabs(r23 - set.k1) <= 1e-12 * set.k1;
    } else {
        set.proportional = set.pair[kPair13].c2 == 0.0 && set.pair[kPair23].c2 == 0.0;
    }
    return set;
}

double shape_eval(const ShapeFunction& s, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("shape_eval: x must be positive");
    const double t1 = s.c1 * std::pow(x, -s.p);
    const double t2 = s.c2 * std::pow(x, -s.q);
    return s.mode == InteractionMode::AttractiveRepulsive ? t1 - t2 : t1 + t2;
}

double shape_deriv(const ShapeFunction& s, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("shape_deriv: x must be positive");
    const double t1 = -s.p * s.c1 * std::pow(x, -s.p - 1.0);
    const double t2 = -s.q * s.c2 * std::pow(x, -s.q - 1.0);
    return s.mode == InteractionMode::AttractiveRepulsive ? t1 - t2 : t1 + t2;
}

double shape_zero(const ShapeFunction& s) {
    if (s.kind != ShapeKind::TwoBranch)
        throw std::invalid_argument("shape_zero: monotone shape has no positive zero");
    return std::pow(s.c2 / s.c1, 1.0 / (s.q - s.p));
}

ShapeCrit shape_crit(const ShapeFunction& s) {
    if (s.kind != ShapeKind::TwoBranch)
        throw std::invalid_argument("shape_crit: monotone shape has no interior maximum");
    const double xc = std::pow(s.q * s.c2 / (s.p * s.c1), 1.0 / (s.q - s.p));
    return {xc, shape_eval(s, xc)};
}

namespace {

[[noreturn]] void bracket_failure(const char* what, const ShapeFunction& s, double eta) {
    std::ostringstream msg;
    msg << "solve_level: " << what << " (c1=" << s.c1 << ", c2=" << s.c2 << ", p=" << s.p
        << ", q=" << s.q << ", eta=" << eta << ")";
    throw numerical_error(msg.str());
}

double solve_on(const ShapeFunction& s, double eta, double a, double b) {
    RootOptions opt;
    opt.residual_tol = 1e-12 * std::fmax(1.0, eta);
    return solve_bracketed([&](double x) { return shape_eval(s, x) - eta; }, a, b, opt);
}

} // namespace

LevelRoots solve_level(const ShapeFunction& s, double eta) {
    LevelRoots out;
    out.level = eta;

    if (s.kind == ShapeKind::Monotone) {
        if (!(eta > 0.0))
            throw std::invalid_argument("solve_level: eta must be positive for a monotone shape");
        // Characteristic length where the dominant term alone equals eta.
        double x = std::pow(s.c1 / eta, 1.0 / s.p);
        double lo = x, hi = x;
        int n = 0;
        while (shape_eval(s, lo) < eta) {
            lo *= 0.5;
            if (++n > 200) bracket_failure("could not bracket the monotone root from below", s, eta);
        }
        n = 0;
        while (shape_eval(s, hi) > eta) {
            hi *= 2.0;
            if (++n > 200) bracket_failure("could not bracket the monotone root from above", s, eta);
        }
        const double root = (lo == hi) ? lo : solve_on(s, eta, lo, hi);
        out.low = out.high = root;
        return out;
    }

    if (!(eta >= 0.0)) throw std::invalid_argument("solve_level: eta must be nonnegative");
    const double x0 = shape_zero(s);
    const auto [xc, f_max] = shape_crit(s);

    if (eta == 0.0) {
        out.low = x0;
        out.high_unbounded = true;
        return out;
    }
    if (std::fabs(eta - f_max) <= 1e-12 * std::fmax(f_max, eta)) {
        out.low = out.high = xc;
        out.coincident = true;
        return out;
    }
    if (eta > f_max) return out; // no admissible distance at this level

    out.low = solve_on(s, eta, x0, xc);
    double hi = 2.0 * xc;
    int n = 0;
    while (shape_eval(s, hi) > eta) {
        hi *= 2.0;
        if (++n > 200) bracket_failure("could not bracket the high root", s, eta);
    }
    out.high = solve_on(s, eta, xc, hi);
    return out;
}

} // namespace qcc
