#pragma once

// Branch-combination families of non-collinear central configurations:
// sampling of moment-of-inertia curves over the level eta = omega^2,
// triangle-validity bookkeeping, bifurcation detection, and solution
// counting at a queried moment of inertia.

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcc/shape.hpp"
#include "qcc/types.hpp"

namespace qcc {

enum class Branch : std::uint8_t { Low = 0, High = 1 };

// One branch letter per pair slot (12, 13, 23). Low sorts before High.
struct BranchChoice {
    std::array<Branch, 3> branch{Branch::Low, Branch::Low, Branch::Low};

    std::string label() const {
        std::string s(3, 'L');
        for (int i = 0; i < 3; ++i)
            if (branch[i] == Branch::High) s[i] = 'H';
        return s;
    }
    auto operator<=>(const BranchChoice&) const = default;
};

// An equivalence class of branch labels under the symmetries of the shape
// set (pair-slot permutations induced by swapping identical shapes, and
// Low=High identification on monotone pairs).
struct FamilyClass {
    BranchChoice rep;                  // lexicographically smallest member
    std::vector<BranchChoice> members; // sorted
};

struct FamilyContext {
    ShapeSet shapes;
    MassTriple masses;
};

struct FamilySample {
    double eta = 0.0;
    ConfigTriple config;
    double inertia = 0.0;
    TriangleStatus valid = TriangleStatus::Invalid;
};

// Maximal eta-subinterval on which a family's configuration is a strict
// triangle. Endpoints refined by bisection when the interval terminates in a
// collinear limit inside the grid.
struct ValidityInterval {
    double eta_hi = 0.0;
    double eta_lo = 0.0;
    bool degenerate_hi = false;
    bool degenerate_lo = false;
    ConfigTriple config_hi;
    ConfigTriple config_lo;
    double inertia_hi = 0.0;
    double inertia_lo = 0.0;
};

// Maximal piece of a validity interval on which the inertia varies
// monotonically with eta. eta_hi > eta_lo.
struct MonotoneSegment {
    double eta_hi = 0.0;
    double eta_lo = 0.0;
    double inertia_at_hi = 0.0;
    double inertia_at_lo = 0.0;

    double i_min() const { return std::fmin(inertia_at_hi, inertia_at_lo); }
    double i_max() const { return std::fmax(inertia_at_hi, inertia_at_lo); }
};

struct InteriorExtremum {
    double eta = 0.0;
    double inertia = 0.0;
};

struct FamilyCurve {
    FamilyClass family;
    std::vector<FamilySample> samples; // grid order, strictly decreasing eta
    std::vector<ValidityInterval> validity;
    std::vector<MonotoneSegment> segments;
    std::vector<InteriorExtremum> extrema;

    bool has_valid_samples() const { return !validity.empty(); }
};

enum class BifKind { Onset, BranchMeeting, InteriorExtremum, TriangleDegeneracy };

inline const char* to_string(BifKind k) {
    switch (k) {
        case BifKind::Onset: return "onset";
        case BifKind::BranchMeeting: return "branch_meeting";
        case BifKind::InteriorExtremum: return "interior_extremum";
        default: return "triangle_degeneracy";
    }
}

struct BifurcationPoint {
    double inertia = 0.0;
    BifKind kind = BifKind::Onset;
    std::vector<std::string> families;
};

struct InertiaSolution {
    std::string family;
    double eta = 0.0;
    ConfigTriple config;
    TriangleClass cls = TriangleClass::Equilateral;
};

// Label order with Low before High (so "LLH" sorts before "LHL").
inline bool family_label_less(const std::string& a, const std::string& b) {
    const auto rank = [](char c) { return c == 'L' ? 0 : 1; };
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (rank(a[i]) != rank(b[i])) return rank(a[i]) < rank(b[i]);
    return a.size() < b.size();
}

// Family labels collapsed by the symmetry group of the shape set: 4 classes
// for three identical two-branch shapes, 6 when exactly the (12,13) shapes
// coincide, 8 when all differ; a single class when every pair is monotone.
std::vector<FamilyClass> enumerate_families(const ShapeSet& shapes);

// Strictly decreasing eta grid. Two-branch sets are sampled geometrically in
// (eta_meet - eta) starting exactly at the meeting level eta_meet =
// min over pairs of f_max; monotone sets get a geometric sweep around the
// level at the shape's crossover length.
std::vector<double> make_eta_grid(const ShapeSet& shapes, int n);

// Distances solving each pair's level equation at eta, branches per label.
ConfigTriple config_at(const FamilyContext& ctx, const BranchChoice& label, double eta);
double inertia_at(const FamilyContext& ctx, const BranchChoice& label, double eta);

FamilyCurve sample_family(const FamilyContext& ctx, const FamilyClass& family,
                          std::span<const double> eta_grid);

struct FamilyScan {
    std::vector<double> grid;
    std::vector<FamilyCurve> curves; // ordered by class representative
};

FamilyScan scan_families(const FamilyContext& ctx, int n_grid);

std::vector<BifurcationPoint> bifurcation_scan(const std::vector<FamilyCurve>& curves,
                                               const FamilyContext& ctx);

// All non-collinear relative equilibria with moment of inertia I: one
// solution per monotone segment whose inertia range contains I, deduplicated
// where families meet. Every returned configuration satisfies the per-pair
// shape residual bound 1e-10.
std::vector<InertiaSolution> count_at_inertia(const std::vector<FamilyCurve>& curves,
                                              const FamilyContext& ctx, double I);

// Scaling threshold f(xc)/f(2 xc) of a two-branch shape: the proportionality
// factor at which the scaled shape's high root at the meeting level reaches
// twice the maximizer.
double k_tilde(const ShapeFunction& base);

} // namespace qcc
