#pragma once

// Per-pair shape functions f(x) = c1 x^-p -/+ c2 x^-q whose level sets give
// the admissible mutual distances of a central configuration. The coefficients
// absorb the mass weights so that the per-pair condition reads f(r) = omega^2
// exactly: c1 = M*alpha*A/(mi*mj), c2 = M*beta*B/(mi*mj), p = alpha+2,
// q = beta+2.

#include <array>
#include <optional>

#include "qcc/types.hpp"

namespace qcc {

enum class ShapeKind {
    TwoBranch, // attractive-repulsive with c2 > 0: zero at x0, maximum at xc
    Monotone,  // strictly decreasing on (0, inf)
};

struct ShapeFunction {
    double c1 = 1.0; // coefficient of x^-p, > 0
    double c2 = 1.0; // coefficient of x^-q, >= 0
    double p = 3.0;  // attractive exponent + 2
    double q = 4.0;  // repulsive exponent + 2
    InteractionMode mode = InteractionMode::AttractiveRepulsive;
    ShapeKind kind = ShapeKind::TwoBranch;
};

// Validates coefficients/exponents and derives the kind.
ShapeFunction make_shape(double c1, double c2, double p, double q, InteractionMode mode);

// The three pair shapes plus the proportionality data (g = k f, h = k1 f).
struct ShapeSet {
    std::array<ShapeFunction, 3> pair; // slot order (12, 13, 23)
    double k = 1.0;                    // c1_13 / c1_12
    double k1 = 1.0;                   // c1_23 / c1_12
    bool proportional = true;          // c2 ratios match k, k1 within 1e-12
};

ShapeSet build_shapes(const MassTriple& masses, const PairCouplings& couplings,
                      const ExponentPair& exps, InteractionMode mode);

double shape_eval(const ShapeFunction& s, double x);
double shape_deriv(const ShapeFunction& s, double x);

// Zero x0 = (c2/c1)^(1/(q-p)) of a two-branch shape.
double shape_zero(const ShapeFunction& s);

struct ShapeCrit {
    double xc = 0.0;    // argmax, (q c2 / (p c1))^(1/(q-p))
    double f_max = 0.0; // value at the maximum
};
ShapeCrit shape_crit(const ShapeFunction& s);

// Roots of f(x) = eta. For a two-branch shape `low` lies in (x0, xc] and
// `high` in [xc, inf); they coincide at xc when eta matches f_max within
// 1e-12 relative. eta = 0 gives low = x0 and an unbounded high branch. For a
// monotone shape the unique root is stored in both slots.
struct LevelRoots {
    std::optional<double> low;
    std::optional<double> high;
    bool high_unbounded = false; // eta = 0: the high root escaped to infinity
    bool coincident = false;     // eta = f_max: both roots equal xc
    double level = 0.0;

    bool none() const { return !low && !high; }
    double branch(bool high_branch) const {
        const auto& r = high_branch ? high : low;
        if (!r) throw numerical_error("LevelRoots: requested branch is absent");
        return *r;
    }
};

LevelRoots solve_level(const ShapeFunction& s, double eta);

} // namespace qcc
