#include "qcc/families.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qcc/parallel.hpp"
#include "qcc/rootfind.hpp"

namespace qcc {

namespace {

bool shape_equiv(const ShapeFunction& a, const ShapeFunction& b) {
    const auto close = [](double x, double y) {
        return std::fabs(x - y) <= 1e-12 * std::fmax(std::fabs(x), std::fabs(y));
    };
    return a.mode == b.mode && a.kind == b.kind && close(a.c1, b.c1) && close(a.c2, b.c2) &&
           close(a.p, b.p) && close(a.q, b.q);
}

// Slot permutation induced by a body permutation: pair {a,b} maps to the
// slot of {perm[a], perm[b]}.
std::array<int, 3> slot_perm(const std::array<int, 3>& body_perm) {
    std::array<int, 3> out{};
    for (int slot = 0; slot < 3; ++slot) {
        const auto [a, b] = kPairBodies[slot];
        const int pa = body_perm[a], pb = body_perm[b];
        const int lo = std::min(pa, pb), hi = std::max(pa, pb);
        for (int s = 0; s < 3; ++s)
            if (kPairBodies[s] == std::pair<int, int>{lo, hi}) out[slot] = s;
    }
    return out;
}

constexpr std::array<std::array<int, 3>, 6> kBodyPerms{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

// Normalize: monotone pairs have a single root, so their letter is fixed Low.
BranchChoice normalize(BranchChoice c, const ShapeSet& shapes) {
    for (int i = 0; i < 3; ++i)
        if (shapes.pair[i].kind == ShapeKind::Monotone) c.branch[i] = Branch::Low;
    return c;
}

} // namespace

std::vector<FamilyClass> enumerate_families(const ShapeSet& shapes) {
    // Allowed slot permutations: those mapping every slot to a slot holding
    // an equivalent shape.
    std::vector<std::array<int, 3>> allowed;
    for (const auto& bp : kBodyPerms) {
        const auto sp = slot_perm(bp);
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) ok = shape_equiv(shapes.pair[sp[i]], shapes.pair[i]);
        if (ok) allowed.push_back(sp);
    }

    std::map<BranchChoice, std::vector<BranchChoice>> classes;
    for (int bits = 0; bits < 8; ++bits) {
        BranchChoice label;
        for (int i = 0; i < 3; ++i)
            label.branch[i] = (bits >> i) & 1 ? Branch::High : Branch::Low;
        BranchChoice canon = normalize(label, shapes);
        for (const auto& sp : allowed) {
            BranchChoice permuted;
            for (int i = 0; i < 3; ++i) permuted.branch[i] = label.branch[sp[i]];
            permuted = normalize(permuted, shapes);
            canon = std::min(canon, permuted);
        }
        classes[canon].push_back(normalize(label, shapes));
    }

    std::vector<FamilyClass> out;
    for (auto& [rep, members] : classes) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        out.push_back(FamilyClass{rep, members});
    }
    return out;
}

std::vector<double> make_eta_grid(const ShapeSet& shapes, int n) {
    if (n < 2) throw std::invalid_argument("make_eta_grid: need at least 2 points");

    bool any_two_branch = false;
    double eta_meet = 0.0;
    for (const auto& s : shapes.pair) {
        if (s.kind != ShapeKind::TwoBranch) continue;
        const double fm = shape_crit(s).f_max;
        eta_meet = any_two_branch ? std::fmin(eta_meet, fm) : fm;
        any_two_branch = true;
    }

    std::vector<double> grid(static_cast<std::size_t>(n));
    if (any_two_branch) {
        // Geometric in the gap below the meeting level: curvature of the
        // inertia curves concentrates where branches coalesce.
        constexpr double gap0 = 1e-9;   // first relative gap below eta_meet
        constexpr double floor = 1e-4;  // smallest eta as a fraction of eta_meet
        grid[0] = eta_meet;
        const double ratio = std::pow((1.0 - floor) / gap0, 1.0 / double(n - 2));
        double gap = gap0;
        for (int i = 1; i < n; ++i) {
            grid[static_cast<std::size_t>(i)] = eta_meet * (1.0 - gap);
            gap *= ratio;
        }
        grid[static_cast<std::size_t>(n - 1)] = eta_meet * floor;
    } else {
        // Monotone sweep centred on the level at the crossover length of the
        // base pair (unit length when the second term vanishes).
        const ShapeFunction& base = shapes.pair[kPair12];
        const double x_char =
            base.c2 > 0.0 ? std::pow(base.c2 / base.c1, 1.0 / (base.q - base.p)) : 1.0;
        const double eta_char = shape_eval(base, x_char);
        const double hi = eta_char * 1e4;
        const double lo = eta_char * 1e-4;
        const double r = std::pow(lo / hi, 1.0 / double(n - 1));
        double eta = hi;
        for (int i = 0; i < n; ++i) {
            grid[static_cast<std::size_t>(i)] = eta;
            eta *= r;
        }
    }
    return grid;
}

ConfigTriple config_at(const FamilyContext& ctx, const BranchChoice& label, double eta) {
    double r[3];
    for (int i = 0; i < 3; ++i) {
        const LevelRoots roots = solve_level(ctx.shapes.pair[i], eta);
        if (roots.none()) {
            std::ostringstream msg;
            msg << "config_at: level eta=" << eta << " exceeds the maximum of pair "
                << pair_name(i);
            throw numerical_error(msg.str());
        }
        r[i] = roots.branch(label.branch[i] == Branch::High);
    }
    return ConfigTriple{r[0], r[1], r[2]};
}

double inertia_at(const FamilyContext& ctx, const BranchChoice& label, double eta) {
    return inertia(config_at(ctx, label, eta), ctx.masses);
}

namespace {

double triangle_slack(const ConfigTriple& c) {
    const double s1 = c.r13 + c.r23 - c.r12;
    const double s2 = c.r12 + c.r23 - c.r13;
    const double s3 = c.r12 + c.r13 - c.r23;
    return std::fmin(s1, std::fmin(s2, s3));
}

// Refine the collinear limit between a valid and an invalid eta.
double refine_degeneracy(const FamilyContext& ctx, const BranchChoice& label, double eta_valid,
                         double eta_invalid) {
    RootOptions opt;
    opt.residual_tol = 1e-12;
    const double a = std::fmin(eta_valid, eta_invalid);
    const double b = std::fmax(eta_valid, eta_invalid);
    return solve_bracketed(
        [&](double eta) { return triangle_slack(config_at(ctx, label, eta)); }, a, b, opt);
}

struct SegPoint {
    double eta;
    double inertia;
};

void finalize_curve(const FamilyContext& ctx, FamilyCurve& curve) {
    const auto& samples = curve.samples;
    const BranchChoice& rep = curve.family.rep;
    const std::size_t n = samples.size();

    // Maximal runs of strictly valid samples.
    std::size_t i = 0;
    while (i < n) {
        if (samples[i].valid != TriangleStatus::NonDegenerate) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && samples[j + 1].valid == TriangleStatus::NonDegenerate) ++j;

        ValidityInterval iv;
        if (i == 0) {
            iv.eta_hi = samples[i].eta;
            iv.config_hi = samples[i].config;
            iv.inertia_hi = samples[i].inertia;
        } else if (samples[i - 1].valid == TriangleStatus::Degenerate) {
            iv.eta_hi = samples[i - 1].eta;
            iv.config_hi = samples[i - 1].config;
            iv.inertia_hi = samples[i - 1].inertia;
            iv.degenerate_hi = true;
        } else {
            iv.eta_hi = refine_degeneracy(ctx, rep, samples[i].eta, samples[i - 1].eta);
            iv.config_hi = config_at(ctx, rep, iv.eta_hi);
            iv.inertia_hi = inertia(iv.config_hi, ctx.masses);
            iv.degenerate_hi = true;
        }
        if (j == n - 1) {
            iv.eta_lo = samples[j].eta;
            iv.config_lo = samples[j].config;
            iv.inertia_lo = samples[j].inertia;
        } else if (samples[j + 1].valid == TriangleStatus::Degenerate) {
            iv.eta_lo = samples[j + 1].eta;
            iv.config_lo = samples[j + 1].config;
            iv.inertia_lo = samples[j + 1].inertia;
            iv.degenerate_lo = true;
        } else {
            iv.eta_lo = refine_degeneracy(ctx, rep, samples[j].eta, samples[j + 1].eta);
            iv.config_lo = config_at(ctx, rep, iv.eta_lo);
            iv.inertia_lo = inertia(iv.config_lo, ctx.masses);
            iv.degenerate_lo = true;
        }

        // Segmentation points: refined endpoints plus the interior samples.
        std::vector<SegPoint> pts;
        pts.push_back({iv.eta_hi, iv.inertia_hi});
        for (std::size_t s = i; s <= j; ++s) {
            if (samples[s].eta < pts.back().eta)
                pts.push_back({samples[s].eta, samples[s].inertia});
        }
        if (iv.eta_lo < pts.back().eta) pts.push_back({iv.eta_lo, iv.inertia_lo});

        // Sign walk with plateau tie-break: zero differences inherit the
        // current direction.
        std::vector<double> boundaries_eta{pts.front().eta};
        std::vector<double> boundaries_inertia{pts.front().inertia};
        int dir = 0;
        std::size_t last_move = 0; // index of the right end of the last nonzero difference
        for (std::size_t kk = 1; kk < pts.size(); ++kk) {
            const double d = pts[kk].inertia - pts[kk - 1].inertia;
            const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
            if (s == 0) continue;
            if (dir != 0 && s != dir) {
                // Extremum bracketed strictly between the endpoints of the two
                // opposing moves.
                const double lo = pts[kk].eta;
                const double hi = pts[last_move - 1].eta;
                const double sign = dir > 0 ? 1.0 : -1.0;
                const double eta_ext = minimize_scalar(
                    [&](double eta) { return -sign * inertia_at(ctx, rep, eta); }, lo, hi);
                const double i_ext = inertia_at(ctx, rep, eta_ext);
                curve.extrema.push_back({eta_ext, i_ext});
                boundaries_eta.push_back(eta_ext);
                boundaries_inertia.push_back(i_ext);
            }
            dir = s;
            last_move = kk;
        }
        boundaries_eta.push_back(pts.back().eta);
        boundaries_inertia.push_back(pts.back().inertia);

        for (std::size_t b = 0; b + 1 < boundaries_eta.size(); ++b) {
            if (!(boundaries_eta[b] > boundaries_eta[b + 1])) continue;
            MonotoneSegment seg;
            seg.eta_hi = boundaries_eta[b];
            seg.eta_lo = boundaries_eta[b + 1];
            seg.inertia_at_hi = boundaries_inertia[b];
            seg.inertia_at_lo = boundaries_inertia[b + 1];
            curve.segments.push_back(seg);
        }

        curve.validity.push_back(iv);
        i = j + 1;
    }
}

} // namespace

FamilyCurve sample_family(const FamilyContext& ctx, const FamilyClass& family,
                          std::span<const double> eta_grid) {
    FamilyCurve curve;
    curve.family = family;
    curve.samples.resize(eta_grid.size());
    parallel_for(eta_grid.size(), [&](std::size_t idx) {
        FamilySample& s = curve.samples[idx];
        s.eta = eta_grid[idx];
        s.config = config_at(ctx, family.rep, s.eta);
        s.inertia = inertia(s.config, ctx.masses);
        s.valid = s.config.status();
    });
    finalize_curve(ctx, curve);
    return curve;
}

FamilyScan scan_families(const FamilyContext& ctx, int n_grid) {
    FamilyScan scan;
    scan.grid = make_eta_grid(ctx.shapes, n_grid);
    for (const auto& family : enumerate_families(ctx.shapes))
        scan.curves.push_back(sample_family(ctx, family, scan.grid));
    return scan;
}

namespace {

bool config_close(const ConfigTriple& a, const ConfigTriple& b, double rel) {
    const auto close = [rel](double x, double y) {
        return std::fabs(x - y) <= rel * std::fmax(1.0, std::fmax(std::fabs(x), std::fabs(y)));
    };
    return close(a.r12, b.r12) && close(a.r13, b.r13) && close(a.r23, b.r23);
}

int kind_rank(BifKind k) { return static_cast<int>(k); }

} // namespace

std::vector<BifurcationPoint> bifurcation_scan(const std::vector<FamilyCurve>& curves,
                                               const FamilyContext& ctx) {
    std::vector<BifurcationPoint> points;
    if (curves.empty()) return points;

    const bool any_two_branch =
        std::any_of(ctx.shapes.pair.begin(), ctx.shapes.pair.end(),
                    [](const ShapeFunction& s) { return s.kind == ShapeKind::TwoBranch; });

    // Onset: the all-Low family's inertia infimum as eta -> 0+ is the
    // zero-distance triple; emitted when the family stays valid down to the
    // bottom of the grid.
    if (any_two_branch) {
        const bool all_two_branch =
            std::all_of(ctx.shapes.pair.begin(), ctx.shapes.pair.end(),
                        [](const ShapeFunction& s) { return s.kind == ShapeKind::TwoBranch; });
        for (const auto& curve : curves) {
            if (curve.family.rep != BranchChoice{}) continue; // all-Low class only
            if (!all_two_branch || curve.validity.empty() || curve.samples.empty()) break;
            const auto& last = curve.validity.back();
            if (last.degenerate_lo || last.eta_lo > curve.samples.back().eta) break;
            const ConfigTriple zeros{shape_zero(ctx.shapes.pair[0]), shape_zero(ctx.shapes.pair[1]),
                                     shape_zero(ctx.shapes.pair[2])};
            if (zeros.status() != TriangleStatus::Invalid)
                points.push_back({inertia(zeros, ctx.masses), BifKind::Onset,
                                  {curve.family.rep.label()}});
            break;
        }
    }

    // Branch meeting at the top of the grid: families whose configurations
    // coincide there exchange or terminate.
    if (any_two_branch) {
        struct Meet {
            ConfigTriple config;
            double inertia;
            std::vector<std::string> labels;
        };
        std::vector<Meet> meets;
        for (const auto& curve : curves) {
            if (curve.samples.empty()) continue;
            const FamilySample& top = curve.samples.front();
            if (top.valid != TriangleStatus::NonDegenerate) continue;
            bool grouped = false;
            for (auto& m : meets) {
                if (config_close(m.config, top.config, 1e-9)) {
                    m.labels.push_back(curve.family.rep.label());
                    grouped = true;
                    break;
                }
            }
            if (!grouped) meets.push_back({top.config, top.inertia, {curve.family.rep.label()}});
        }
        for (auto& m : meets)
            if (m.labels.size() >= 2)
                points.push_back({m.inertia, BifKind::BranchMeeting, std::move(m.labels)});
    }

    for (const auto& curve : curves) {
        for (const auto& ext : curve.extrema)
            points.push_back({ext.inertia, BifKind::InteriorExtremum, {curve.family.rep.label()}});
        for (const auto& iv : curve.validity) {
            if (iv.degenerate_hi)
                points.push_back(
                    {iv.inertia_hi, BifKind::TriangleDegeneracy, {curve.family.rep.label()}});
            if (iv.degenerate_lo)
                points.push_back(
                    {iv.inertia_lo, BifKind::TriangleDegeneracy, {curve.family.rep.label()}});
        }
    }

    std::sort(points.begin(), points.end(), [](const BifurcationPoint& a, const BifurcationPoint& b) {
        if (a.inertia != b.inertia) return a.inertia < b.inertia;
        if (kind_rank(a.kind) != kind_rank(b.kind)) return kind_rank(a.kind) < kind_rank(b.kind);
        return a.families < b.families;
    });

    // Merge points closer than 1e-9 in inertia.
    std::vector<BifurcationPoint> merged;
    for (auto& pt : points) {
        if (!merged.empty() && pt.inertia - merged.back().inertia <= 1e-9) {
            auto& fam = merged.back().families;
            fam.insert(fam.end(), pt.families.begin(), pt.families.end());
            std::sort(fam.begin(), fam.end(), family_label_less);
            fam.erase(std::unique(fam.begin(), fam.end()), fam.end());
            continue;
        }
        std::sort(pt.families.begin(), pt.families.end(), family_label_less);
        pt.families.erase(std::unique(pt.families.begin(), pt.families.end()), pt.families.end());
        merged.push_back(std::move(pt));
    }
    return merged;
}

std::vector<InertiaSolution> count_at_inertia(const std::vector<FamilyCurve>& curves,
                                              const FamilyContext& ctx, double I) {
    if (!(I > 0.0)) throw std::invalid_argument("count_at_inertia: inertia must be positive");
    const double i_tol = 1e-12 * std::fmax(1.0, I);

    std::vector<InertiaSolution> out;
    for (const auto& curve : curves) {
        const BranchChoice& rep = curve.family.rep;
        for (const auto& seg : curve.segments) {
            if (I < seg.i_min() - i_tol || I > seg.i_max() + i_tol) continue;

            double eta_star;
            const double g_lo = seg.inertia_at_lo - I;
            const double g_hi = seg.inertia_at_hi - I;
            if (std::fabs(g_lo) <= i_tol) {
                eta_star = seg.eta_lo;
            } else if (std::fabs(g_hi) <= i_tol) {
                eta_star = seg.eta_hi;
            } else if ((g_lo > 0.0) == (g_hi > 0.0)) {
                continue; // containment was within tolerance only
            } else {
                RootOptions opt;
                opt.residual_tol = i_tol;
                eta_star = solve_bracketed(
                    [&](double eta) { return inertia_at(ctx, rep, eta) - I; }, seg.eta_lo,
                    seg.eta_hi, opt);
            }

            const ConfigTriple config = config_at(ctx, rep, eta_star);
            if (config.status() != TriangleStatus::NonDegenerate) continue;

            for (int pair = 0; pair < 3; ++pair) {
                const double resid = std::fabs(shape_eval(ctx.shapes.pair[pair], config[pair]) -
                                               eta_star);
                if (resid > 1e-10 * std::fmax(1.0, eta_star)) {
                    std::ostringstream msg;
                    msg << "count_at_inertia: shape residual " << resid << " on pair "
                        << pair_name(pair) << " at eta=" << eta_star;
                    throw numerical_error(msg.str());
                }
            }
            out.push_back({rep.label(), eta_star, config, classify(config)});
        }
    }

    std::sort(out.begin(), out.end(), [](const InertiaSolution& a, const InertiaSolution& b) {
        if (a.family != b.family) return family_label_less(a.family, b.family);
        return a.eta < b.eta;
    });

    // Families meeting at a common configuration count once.
    std::vector<InertiaSolution> unique;
    for (auto& sol : out) {
        const bool dup = std::any_of(unique.begin(), unique.end(), [&](const InertiaSolution& u) {
            return config_close(u.config, sol.config, 1e-10);
        });
        if (!dup) unique.push_back(std::move(sol));
    }
    return unique;
}

double k_tilde(const ShapeFunction& base) {
    const auto [xc, f_max] = shape_crit(base); // rejects monotone shapes
    return f_max / shape_eval(base, 2.0 * xc);
}

} // namespace qcc
