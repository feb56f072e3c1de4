#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "qcc/families.hpp"

using namespace qcc;

namespace {

MassTriple equal_masses() { return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; }

// Canonical normalization: every pair shape is f(x) = x^-3 - x^-4.
FamilyContext canonical_ctx() {
    const ShapeFunction f = make_shape(1.0, 1.0, 3.0, 4.0, InteractionMode::AttractiveRepulsive);
    return {ShapeSet{{f, f, f}, 1.0, 1.0, true}, equal_masses()};
}

// Pairs (12,13) canonical, pair 23 scaled by factor.
FamilyContext scaled_ctx(double factor) {
    const ShapeFunction f = make_shape(1.0, 1.0, 3.0, 4.0, InteractionMode::AttractiveRepulsive);
    const ShapeFunction g =
        make_shape(factor, factor, 3.0, 4.0, InteractionMode::AttractiveRepulsive);
    return {ShapeSet{{f, f, g}, 1.0, factor, true}, equal_masses()};
}

std::set<std::string> labels_of(const std::vector<FamilyClass>& classes) {
    std::set<std::string> out;
    for (const auto& c : classes) out.insert(c.rep.label());
    return out;
}

const FamilyCurve& curve_of(const FamilyScan& scan, const std::string& label) {
    for (const auto& c : scan.curves)
        if (c.family.rep.label() == label) return c;
    REQUIRE(false);
    return scan.curves.front();
}

// Values frozen from a 50-digit oracle for the canonical shape.
constexpr double kOnset = 1.0 / 3.0;
constexpr double kMeeting = 16.0 / 27.0;
constexpr double kLLHMinInertia = 0.57696102186885257;
constexpr double kLLHMinEta = 0.10151939955035967;
constexpr double kDegeneracyInertia = 75.0 / 98.0;
constexpr double kDegeneracyEta = 2744.0 / 50625.0;

} // namespace

TEST_CASE("inertia formula in mutual distances") {
    CHECK(inertia({1.0, 1.0, 1.0}, equal_masses()) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(inertia({1.0, 1.0, 2.0}, equal_masses()) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(inertia({1.0, 1.0, 1.0}, {0.5, 0.25, 0.25}) == doctest::Approx(0.3125).epsilon(1e-15));
}

TEST_CASE("classify by side equality") {
    CHECK(classify({1.0, 1.0, 1.0}) == TriangleClass::Equilateral);
    CHECK(classify({1.2, 1.2, 1.9}) == TriangleClass::Isosceles);
    CHECK(classify({1.1, 1.3, 1.6}) == TriangleClass::Scalene);
    // the canonical eta=0.05 low/low/high combination is not a triangle
    const ConfigTriple bad{1.0641, 1.0641, 2.2245};
    CHECK(bad.status() == TriangleStatus::Invalid);
    CHECK_THROWS_AS(classify(bad), std::invalid_argument);
    CHECK(ConfigTriple{1.0, 1.0, 2.0}.status() == TriangleStatus::Degenerate);
}

TEST_CASE("enumerate_families collapses by shape symmetry") {
    const auto identical = enumerate_families(canonical_ctx().shapes);
    CHECK(labels_of(identical) == std::set<std::string>{"LLL", "LLH", "LHH", "HHH"});
    for (const auto& c : identical) {
        if (c.rep.label() == "LLH") CHECK(c.members.size() == 3);
        if (c.rep.label() == "LLL") CHECK(c.members.size() == 1);
    }

    const auto two_equal = enumerate_families(scaled_ctx(1.5).shapes);
    CHECK(two_equal.size() == 6);
    CHECK(labels_of(two_equal) ==
          std::set<std::string>{"LLL", "LLH", "LHL", "LHH", "HHL", "HHH"});

    const ShapeFunction f = make_shape(1.0, 1.0, 3.0, 4.0, InteractionMode::AttractiveRepulsive);
    const ShapeFunction g = make_shape(1.3, 1.3, 3.0, 4.0, InteractionMode::AttractiveRepulsive);
    const ShapeFunction h = make_shape(1.9, 1.9, 3.0, 4.0, InteractionMode::AttractiveRepulsive);
    const auto distinct = enumerate_families(ShapeSet{{f, g, h}, 1.3, 1.9, true});
    CHECK(distinct.size() == 8);

    const ShapeFunction aa = make_shape(9.0, 18.0, 3.0, 4.0, InteractionMode::AttractiveAttractive);
    const auto monotone = enumerate_families(ShapeSet{{aa, aa, aa}, 1.0, 1.0, true});
    CHECK(monotone.size() == 1);
    CHECK(monotone.front().rep.label() == "LLL");
}

TEST_CASE("sample_family traces the canonical curves") {
    const FamilyContext ctx = canonical_ctx();
    const FamilyScan scan = scan_families(ctx, 2000);
    REQUIRE(scan.curves.size() == 4);

    SUBCASE("all-low family spans onset to meeting") {
        const FamilyCurve& lll = curve_of(scan, "LLL");
        REQUIRE_FALSE(lll.validity.empty());
        CHECK(lll.samples.front().inertia == doctest::Approx(kMeeting).epsilon(1e-12));
        // infimum at the bottom of the grid approaches x0^2/3 from above
        const double tail = lll.samples.back().inertia;
        CHECK(tail > kOnset);
        CHECK(tail - kOnset < 1e-4);
        CHECK(lll.segments.size() == 1);
        CHECK(lll.extrema.empty());
        for (const auto& s : lll.samples) CHECK(s.valid == TriangleStatus::NonDegenerate);
    }
    SUBCASE("low-low-high family has the fold and the collinear end") {
        const FamilyCurve& llh = curve_of(scan, "LLH");
        REQUIRE(llh.validity.size() == 1);
        REQUIRE(llh.extrema.size() == 1);
        CHECK(llh.extrema.front().inertia == doctest::Approx(kLLHMinInertia).epsilon(1e-11));
        CHECK(llh.extrema.front().eta == doctest::Approx(kLLHMinEta).epsilon(1e-9));
        CHECK(llh.segments.size() == 2);
        const auto& iv = llh.validity.front();
        CHECK(iv.degenerate_lo);
        CHECK_FALSE(iv.degenerate_hi);
        CHECK(iv.inertia_lo == doctest::Approx(kDegeneracyInertia).epsilon(1e-11));
        CHECK(iv.eta_lo == doctest::Approx(kDegeneracyEta).epsilon(1e-9));
        // collinear limit: largest side equals the sum of the others
        const ConfigTriple& deg = iv.config_lo;
        CHECK(deg.r23 == doctest::Approx(deg.r12 + deg.r13).epsilon(1e-8));
    }
    SUBCASE("high families extend to large inertia") {
        const FamilyCurve& hhh = curve_of(scan, "HHH");
        CHECK(hhh.segments.size() == 1);
        CHECK(hhh.extrema.empty());
        CHECK(hhh.samples.front().inertia == doctest::Approx(kMeeting).epsilon(1e-12));
        CHECK(hhh.samples.back().inertia > 100.0);
        const FamilyCurve& lhh = curve_of(scan, "LHH");
        CHECK(lhh.segments.size() == 1);
        for (const auto& s : lhh.samples) CHECK(s.valid == TriangleStatus::NonDegenerate);
    }
    SUBCASE("every valid sample satisfies the per-pair residual") {
        for (const auto& curve : scan.curves)
            for (const auto& s : curve.samples) {
                if (s.valid != TriangleStatus::NonDegenerate) continue;
                for (int pair = 0; pair < 3; ++pair)
                    CHECK(std::fabs(shape_eval(ctx.shapes.pair[pair], s.config[pair]) - s.eta) <=
                          1e-10 * std::fmax(1.0, s.eta));
            }
    }
}

TEST_CASE("symmetric-deviation identity near the meeting point") {
    const FamilyContext ctx = canonical_ctx();
    const double xc = 4.0 / 3.0;
    oracle::Rng rng(44);
    for (int i = 0; i < 50; ++i) {
        const double eps = rng.uniform(0.0, 2.0 / 3.0 * xc);
        const double lhs = 2.0 * (xc - eps) * (xc - eps) + (xc + eps) * (xc + eps);
        const double rhs = 3.0 * xc * xc - 2.0 * eps * xc + 3.0 * eps * eps;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
    }
    // consequence: the low-low-high curve initially decreases below the meeting
    const BranchChoice llh{{Branch::Low, Branch::Low, Branch::High}};
    const double f_max = 27.0 / 256.0;
    CHECK(inertia_at(ctx, llh, f_max * (1.0 - 1e-5)) < inertia_at(ctx, llh, f_max));
}

TEST_CASE("bifurcation scan finds exactly the four canonical values") {
    const FamilyContext ctx = canonical_ctx();
    const FamilyScan scan = scan_families(ctx, 2000);
    const auto points = bifurcation_scan(scan.curves, ctx);
    REQUIRE(points.size() == 4);
    CHECK(std::is_sorted(points.begin(), points.end(),
                         [](const BifurcationPoint& a, const BifurcationPoint& b) {
                             return a.inertia < b.inertia;
                         }));
    CHECK(points[0].kind == BifKind::Onset);
    CHECK(points[0].inertia == doctest::Approx(kOnset).epsilon(1e-12));
    CHECK(points[1].kind == BifKind::InteriorExtremum);
    CHECK(points[1].inertia == doctest::Approx(kLLHMinInertia).epsilon(1e-10));
    CHECK(points[2].kind == BifKind::BranchMeeting);
    CHECK(points[2].inertia == doctest::Approx(kMeeting).epsilon(1e-12));
    CHECK(points[2].families.size() == 4);
    CHECK(points[3].kind == BifKind::TriangleDegeneracy);
    CHECK(points[3].inertia == doctest::Approx(kDegeneracyInertia).epsilon(1e-10));
}

TEST_CASE("count_at_inertia matches the analytic profile") {
    const FamilyContext ctx = canonical_ctx();
    const FamilyScan scan = scan_families(ctx, 2000);

    const auto count = [&](double I) { return count_at_inertia(scan.curves, ctx, I).size(); };
    CHECK(count(0.30) == 0);
    CHECK(count(0.40) == 1);
    CHECK(count(0.50) == 1);
    CHECK(count(0.58) == 3);
    CHECK(count(0.59) == 3);
    CHECK(count(0.60) == 3);
    CHECK(count(0.70) == 3);
    CHECK(count(0.80) == 2);
    CHECK(count(10.0) == 2);

    SUBCASE("meeting point includes the equilateral coincident configuration") {
        const auto sols = count_at_inertia(scan.curves, ctx, kMeeting);
        const bool has_meeting =
            std::any_of(sols.begin(), sols.end(), [](const InertiaSolution& s) {
                return std::fabs(s.config.r12 - 4.0 / 3.0) < 1e-6 &&
                       std::fabs(s.config.r13 - 4.0 / 3.0) < 1e-6 &&
                       std::fabs(s.config.r23 - 4.0 / 3.0) < 1e-6;
            });
        CHECK(has_meeting);
    }
    SUBCASE("large inertia keeps only the two upper curves") {
        const auto sols = count_at_inertia(scan.curves, ctx, 10.0);
        REQUIRE(sols.size() == 2);
        CHECK(sols[0].family == "LHH");
        CHECK(sols[0].cls == TriangleClass::Isosceles);
        CHECK(sols[1].family == "HHH");
        CHECK(sols[1].cls == TriangleClass::Equilateral);
    }
    SUBCASE("solutions verify against the shape equations") {
        for (const double I : {0.45, 0.585, 0.65, 2.0}) {
            for (const auto& s : count_at_inertia(scan.curves, ctx, I)) {
                CHECK(inertia(s.config, ctx.masses) == doctest::Approx(I).epsilon(1e-9));
                for (int pair = 0; pair < 3; ++pair)
                    CHECK(std::fabs(shape_eval(ctx.shapes.pair[pair], s.config[pair]) - s.eta) <=
                          1e-10);
            }
        }
    }
}

TEST_CASE("equal-mass permutation symmetry is a strict class collapse") {
    const FamilyContext ctx = canonical_ctx();
    const auto classes = enumerate_families(ctx.shapes);
    const double eta = 0.08;
    for (const auto& cls : classes) {
        const ConfigTriple base = config_at(ctx, cls.rep, eta);
        for (const auto& member : cls.members) {
            const ConfigTriple other = config_at(ctx, member, eta);
            std::array<double, 3> a{base.r12, base.r13, base.r23};
            std::array<double, 3> b{other.r12, other.r13, other.r23};
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("dense-scan oracle agrees with the segment counter") {
    const FamilyContext ctx = canonical_ctx();
    const FamilyScan scan = scan_families(ctx, 2000);

    // Oracle: uniform dense scan with an independent bisection root-solver,
    // counting crossings of each family's inertia curve.
    const double f_max = 27.0 / 256.0;
    const int n_scan = 20000;
    const std::array<std::array<int, 3>, 4> label_bits{{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}}};

    const auto f = [](double x) { return std::pow(x, -3.0) - std::pow(x, -4.0); };
    const auto oracle_root = [&](double eta, bool high) {
        if (high) {
            double hi = 4.0 / 3.0;
            while (f(hi) > eta) hi *= 2.0;
            return oracle::bisect([&](double x) { return f(x) - eta; }, 4.0 / 3.0, hi, 90);
        }
        return oracle::bisect([&](double x) { return f(x) - eta; }, 1.0, 4.0 / 3.0, 90);
    };

    std::vector<std::vector<std::pair<double, bool>>> profile(4); // (inertia, valid) per family
    for (int fam = 0; fam < 4; ++fam) {
        profile[fam].reserve(n_scan);
        for (int i = 0; i < n_scan; ++i) {
            const double eta = f_max * (1.0 - double(i) / n_scan * (1.0 - 1e-4));
            double r[3];
            for (int slot = 0; slot < 3; ++slot)
                r[slot] = oracle_root(eta, label_bits[fam][slot] == 1);
            const bool valid = r[0] + r[1] > r[2] && r[0] + r[2] > r[1] && r[1] + r[2] > r[0];
            const double inertia_value = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]) / 9.0;
            profile[fam].push_back({inertia_value, valid});
        }
    }
    const auto oracle_count = [&](double I) {
        int n = 0;
        for (int fam = 0; fam < 4; ++fam) {
            for (std::size_t i = 0; i + 1 < profile[fam].size(); ++i) {
                const auto& [i0, v0] = profile[fam][i];
                const auto& [i1, v1] = profile[fam][i + 1];
                if (!v0 || !v1) continue;
                if ((i0 - I) * (i1 - I) < 0.0) ++n;
            }
        }
        return n;
    };

    oracle::Rng rng(2718);
    for (int i = 0; i < 60; ++i) {
        const double I = std::exp(rng.uniform(std::log(0.05), std::log(50.0)));
        const int expected = oracle_count(I);
        const int got = static_cast<int>(count_at_inertia(scan.curves, ctx, I).size());
        CHECK(got == expected);
    }
}

TEST_CASE("attractive-attractive families have one solution per level") {
    const ShapeFunction f = make_shape(9.0, 18.0, 3.0, 4.0, InteractionMode::AttractiveAttractive);
    const ShapeFunction g =
        make_shape(9.0 * 1.4, 18.0 * 1.4, 3.0, 4.0, InteractionMode::AttractiveAttractive);
    SUBCASE("equal couplings give equilateral configurations, no bifurcations") {
        const FamilyContext ctx{ShapeSet{{f, f, f}, 1.0, 1.0, true}, equal_masses()};
        const FamilyScan scan = scan_families(ctx, 600);
        REQUIRE(scan.curves.size() == 1);
        const FamilyCurve& c = scan.curves.front();
        double prev = -1.0;
        // samples run over decreasing eta, so inertia strictly increases
        for (const auto& s : c.samples) {
            CHECK(s.valid == TriangleStatus::NonDegenerate);
            CHECK(classify(s.config) == TriangleClass::Equilateral);
            CHECK(s.inertia > prev);
            prev = s.inertia;
        }
        CHECK(bifurcation_scan(scan.curves, ctx).empty());
        CHECK(count_at_inertia(scan.curves, ctx, prev * 0.5).size() == 1);
    }
    SUBCASE("two equal couplings give isosceles configurations") {
        const FamilyContext ctx{ShapeSet{{f, f, g}, 1.0, 1.4, true}, equal_masses()};
        const FamilyScan scan = scan_families(ctx, 400);
        REQUIRE(scan.curves.size() == 1);
        for (const auto& s : scan.curves.front().samples)
            CHECK(classify(s.config) == TriangleClass::Isosceles);
        CHECK(bifurcation_scan(scan.curves, ctx).empty());
    }
    SUBCASE("all-different couplings give scalene configurations") {
        const ShapeFunction h =
            make_shape(9.0 * 0.7, 18.0 * 0.7, 3.0, 4.0, InteractionMode::AttractiveAttractive);
        const FamilyContext ctx{ShapeSet{{f, g, h}, 1.4, 0.7, true}, equal_masses()};
        const FamilyScan scan = scan_families(ctx, 400);
        REQUIRE(scan.curves.size() == 1);
        for (const auto& s : scan.curves.front().samples)
            CHECK(classify(s.config) == TriangleClass::Scalene);
        CHECK(bifurcation_scan(scan.curves, ctx).empty());
    }
}

TEST_CASE("vanishing repulsive coupling gives a pure scale family") {
    const ShapeFunction f = make_shape(1.0, 0.0, 3.0, 4.0, InteractionMode::AttractiveRepulsive);
    REQUIRE(f.kind == ShapeKind::Monotone);
    const FamilyContext ctx{ShapeSet{{f, f, f}, 1.0, 1.0, true}, equal_masses()};
    const FamilyScan scan = scan_families(ctx, 800);
    REQUIRE(scan.curves.size() == 1);
    const auto& samples = scan.curves.front().samples;
    for (const auto& s : samples) CHECK(classify(s.config) == TriangleClass::Equilateral);
    CHECK(samples.back().inertia / samples.front().inertia > 1e3);
    CHECK(bifurcation_scan(scan.curves, ctx).empty());
    for (const double I : {0.01, 0.5, 20.0})
        CHECK(count_at_inertia(scan.curves, ctx, I).size() == 1);
}

TEST_CASE("k_tilde threshold") {
    const ShapeFunction base = make_shape(1.0, 1.0, 3.0, 4.0, InteractionMode::AttractiveRepulsive);
    CHECK(k_tilde(base) == doctest::Approx(3.2).epsilon(1e-14));

    oracle::Rng rng(17);
    for (int i = 0; i < 20; ++i) {
        const ShapeFunction s = make_shape(rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0),
                                           rng.uniform(2.3, 4.5), rng.uniform(4.6, 7.0),
                                           InteractionMode::AttractiveRepulsive);
        CHECK(k_tilde(s) > 1.0);
    }
    const ShapeFunction mono = make_shape(1.0, 0.0, 3.0, 4.0, InteractionMode::AttractiveRepulsive);
    CHECK_THROWS_AS(k_tilde(mono), std::invalid_argument);
}

TEST_CASE("the first scaled-high family exists below k_tilde and not above") {
    // base shape c1=1, c2=2 (k_tilde depends only on the exponents: 3.2 again)
    const ShapeFunction base = make_shape(1.0, 2.0, 3.0, 4.0, InteractionMode::AttractiveRepulsive);
    const double kt = k_tilde(base);
    CHECK(kt == doctest::Approx(3.2).epsilon(1e-13));

    for (const double factor : {0.9 * kt, 1.1 * kt}) {
        const ShapeFunction scaled = make_shape(factor * 1.0, factor * 2.0, 3.0, 4.0,
                                                InteractionMode::AttractiveRepulsive);
        const FamilyContext ctx{ShapeSet{{base, base, scaled}, 1.0, factor, true}, equal_masses()};
        const FamilyScan scan = scan_families(ctx, 1200);
        const FamilyCurve& llh = curve_of(scan, "LLH"); // low on (12,13), high on the scaled pair
        if (factor < kt) {
            CHECK(llh.has_valid_samples());
        } else {
            CHECK_FALSE(llh.has_valid_samples());
        }
    }
}

TEST_CASE("two-equal census across the scaling threshold") {
    const double kt = 3.2;
    SUBCASE("below the threshold all six families have validity intervals") {
        const FamilyScan scan = scan_families(scaled_ctx(0.9 * kt), 1500);
        REQUIRE(scan.curves.size() == 6);
        for (const auto& c : scan.curves) CHECK(c.has_valid_samples());
    }
    SUBCASE("above the threshold the anchored scaled-high families vanish") {
        const FamilyContext ctx = scaled_ctx(1.1 * kt);
        const FamilyScan scan = scan_families(ctx, 1500);
        REQUIRE(scan.curves.size() == 6);
        CHECK_FALSE(curve_of(scan, "LLH").has_valid_samples());
        CHECK_FALSE(curve_of(scan, "LHH").has_valid_samples());
        // The all-high family keeps a detached validity window at lower
        // levels: (x2, x2, x_b) recovers the triangle inequality once
        // x_b/x2 falls below 2.
        const FamilyCurve& hhh = curve_of(scan, "HHH");
        CHECK(hhh.has_valid_samples());
        CHECK(hhh.validity.front().degenerate_hi);
        CHECK(hhh.validity.front().eta_hi < scan.grid.front());
        for (const auto& s : hhh.samples)
            if (s.valid == TriangleStatus::NonDegenerate)
                for (int pair = 0; pair < 3; ++pair)
                    CHECK(std::fabs(shape_eval(ctx.shapes.pair[pair], s.config[pair]) - s.eta) <=
                          1e-10);
    }
}
