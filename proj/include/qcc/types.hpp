#pragma once

// Shared domain value types for the quasi-homogeneous central-configuration
// library. Everything here is a plain immutable value; functions that take
// these types never mutate them.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qcc {

// Thrown when an iteration cap or bracketing search fails. Precondition
// violations use std::invalid_argument instead.
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Pair slots are always ordered (12, 13, 23).
inline constexpr int kPair12 = 0;
inline constexpr int kPair13 = 1;
inline constexpr int kPair23 = 2;
inline constexpr std::array<std::pair<int, int>, 3> kPairBodies{{{0, 1}, {0, 2}, {1, 2}}};

inline const char* pair_name(int pair) {
    static constexpr const char* names[3] = {"12", "13", "23"};
    return names[pair];
}

enum class InteractionMode {
    AttractiveRepulsive,  // pair potential A/r^alpha - B/r^beta
    AttractiveAttractive, // pair potential A/r^alpha + B/r^beta
};

inline const char* to_string(InteractionMode m) {
    return m == InteractionMode::AttractiveRepulsive ? "attractive-repulsive"
                                                     : "attractive-attractive";
}

struct ExponentPair {
    double attractive = 1.0; // alpha
    double repulsive = 2.0;  // beta
};

struct MassTriple {
    double m1 = 1.0 / 3.0;
    double m2 = 1.0 / 3.0;
    double m3 = 1.0 / 3.0;

    double total() const { return m1 + m2 + m3; }
    double operator[](int i) const { return i == 0 ? m1 : (i == 1 ? m2 : m3); }
    // Product of the two masses joined by a pair slot.
    double pair_product(int pair) const {
        const auto [a, b] = kPairBodies[pair];
        return (*this)[a] * (*this)[b];
    }
};

struct PairCouplings {
    std::array<double, 3> A{1.0, 1.0, 1.0};
    std::array<double, 3> B{1.0, 1.0, 1.0};
};

enum class TriangleStatus { NonDegenerate, Degenerate, Invalid };

inline const char* to_string(TriangleStatus s) {
    switch (s) {
        case TriangleStatus::NonDegenerate: return "non_degenerate";
        case TriangleStatus::Degenerate: return "degenerate";
        default: return "invalid";
    }
}

enum class TriangleClass { Equilateral, Isosceles, Scalene };

inline const char* to_string(TriangleClass c) {
    switch (c) {
        case TriangleClass::Equilateral: return "equilateral";
        case TriangleClass::Isosceles: return "isosceles";
        default: return "scalene";
    }
}

// Three mutual distances, slot order (r12, r13, r23).
struct ConfigTriple {
    double r12 = 0.0;
    double r13 = 0.0;
    double r23 = 0.0;

    double operator[](int pair) const { return pair == 0 ? r12 : (pair == 1 ? r13 : r23); }

    // Triangle classification with the relative tolerance used to decide the
    // collinear-limit (degenerate) band.
    TriangleStatus status(double rel_tol = 1e-12) const {
        const double scale = std::fmax(r12, std::fmax(r13, r23));
        const double s1 = r13 + r23 - r12;
        const double s2 = r12 + r23 - r13;
        const double s3 = r12 + r13 - r23;
        const double min_slack = std::fmin(s1, std::fmin(s2, s3));
        if (min_slack > rel_tol * scale) return TriangleStatus::NonDegenerate;
        if (min_slack < -rel_tol * scale) return TriangleStatus::Invalid;
        return TriangleStatus::Degenerate;
    }
};

// Mass-weighted moment of inertia in terms of mutual distances,
// I = (m1 m2 r12^2 + m1 m3 r13^2 + m2 m3 r23^2) / M.
inline double inertia(const ConfigTriple& c, const MassTriple& m) {
    return (m.m1 * m.m2 * c.r12 * c.r12 + m.m1 * m.m3 * c.r13 * c.r13 +
            m.m2 * m.m3 * c.r23 * c.r23) /
           m.total();
}

// Shape classification of a non-degenerate triangle by pairwise side equality.
TriangleClass classify(const ConfigTriple& c, double rel_tol = 1e-8);

} // namespace qcc
