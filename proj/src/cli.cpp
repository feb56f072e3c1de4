#include "qcc/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "qcc/collinear.hpp"
#include "qcc/dynamics.hpp"
#include "qcc/families.hpp"
#include "qcc/parallel.hpp"
#include "qcc/runconfig.hpp"

namespace qcc::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitEmpty = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerifyFailed = 4;

// Shortest decimal that round-trips.
std::string fmt(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

int report_error(const std::exception& e, int code) {
    std::cerr << "qcc: error: " << e.what() << "\n";
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const config_error& e) {
        return report_error(e, kExitConfig);
    } catch (const std::invalid_argument& e) {
        return report_error(e, kExitConfig);
    } catch (const numerical_error& e) {
        return report_error(e, kExitNumerical);
    }
}

ordered_json resolved_config_json(const RunConfig& cfg) {
    ordered_json out;
    out["masses"] = {cfg.masses.m1, cfg.masses.m2, cfg.masses.m3};
    out["alpha"] = cfg.exps.attractive;
    out["beta"] = cfg.exps.repulsive;
    out["mode"] = to_string(cfg.mode);
    out["couplings"] = {{"A", cfg.couplings.A}, {"B", cfg.couplings.B}};
    out["grid"] = cfg.grid;
    out["tolerances"] = {{"classify_rel", cfg.tol.classify_rel},
                         {"verify_residual", cfg.tol.verify_residual},
                         {"verify_periodicity", cfg.tol.verify_periodicity},
                         {"integrate_rel", cfg.tol.integrate_rel},
                         {"integrate_abs", cfg.tol.integrate_abs}};
    return out;
}

ordered_json solution_json(const InertiaSolution& s, const MassTriple& masses) {
    ordered_json j;
    j["family"] = s.family;
    j["eta"] = s.eta;
    j["r12"] = s.config.r12;
    j["r13"] = s.config.r13;
    j["r23"] = s.config.r23;
    j["inertia"] = inertia(s.config, masses);
    j["class"] = to_string(s.cls);
    return j;
}

struct CsvRow {
    std::string label;
    double eta;
    ConfigTriple config;
    double inertia_value;
    TriangleStatus status;
    std::string cls; // empty for degenerate endpoint rows
};

std::vector<CsvRow> family_rows(const FamilyScan& scan, const FamilyContext& ctx,
                                double classify_tol) {
    std::vector<CsvRow> rows;
    for (const auto& curve : scan.curves) {
        const std::string label = curve.family.rep.label();
        std::vector<CsvRow> curve_rows;
        for (const auto& s : curve.samples) {
            if (s.valid != TriangleStatus::NonDegenerate) continue;
            curve_rows.push_back({label, s.eta, s.config, s.inertia, s.valid,
                                  to_string(classify(s.config, classify_tol))});
        }
        for (const auto& iv : curve.validity) {
            if (iv.degenerate_hi)
                curve_rows.push_back(
                    {label, iv.eta_hi, iv.config_hi, iv.inertia_hi, TriangleStatus::Degenerate, ""});
            if (iv.degenerate_lo)
                curve_rows.push_back(
                    {label, iv.eta_lo, iv.config_lo, iv.inertia_lo, TriangleStatus::Degenerate, ""});
        }
        std::sort(curve_rows.begin(), curve_rows.end(),
                  [](const CsvRow& a, const CsvRow& b) { return a.eta > b.eta; });
        rows.insert(rows.end(), curve_rows.begin(), curve_rows.end());
    }
    (void)ctx;
    return rows;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write output file: " + path.string());
    out << content;
}

} // namespace

int cmd_analyze(const std::string& config_path, const std::string& out_dir,
                const std::string& format, std::optional<int> grid_override) {
    return guarded([&]() {
        if (format != "csv" && format != "json")
            throw config_error("format must be 'csv' or 'json'");
        const RunConfig cfg = load_run_config(config_path);
        const int n_grid = grid_override.value_or(cfg.grid);
        if (n_grid < 100) throw config_error("grid must be at least 100");

        const FamilyContext ctx = cfg.family_context();
        const FamilyScan scan = scan_families(ctx, n_grid);
        const auto bifurcations = bifurcation_scan(scan.curves, ctx);

        fs::create_directories(out_dir);

        // families table
        const auto rows = family_rows(scan, ctx, cfg.tol.classify_rel);
        if (format == "csv") {
            std::string csv = "family_label,eta,r12,r13,r23,inertia,triangle_status,class\n";
            for (const auto& r : rows) {
                csv += r.label;
                csv += ',';
                csv += fmt(r.eta);
                csv += ',';
                csv += fmt(r.config.r12);
                csv += ',';
                csv += fmt(r.config.r13);
                csv += ',';
                csv += fmt(r.config.r23);
                csv += ',';
                csv += fmt(r.inertia_value);
                csv += ',';
                csv += to_string(r.status);
                csv += ',';
                csv += r.cls;
                csv += '\n';
            }
            write_text_file(fs::path(out_dir) / "families.csv", csv);
        } else {
            ordered_json arr = ordered_json::array();
            for (const auto& r : rows) {
                ordered_json j;
                j["family_label"] = r.label;
                j["eta"] = r.eta;
                j["r12"] = r.config.r12;
                j["r13"] = r.config.r13;
                j["r23"] = r.config.r23;
                j["inertia"] = r.inertia_value;
                j["triangle_status"] = to_string(r.status);
                j["class"] = r.cls;
                arr.push_back(j);
            }
            write_text_file(fs::path(out_dir) / "families.json", arr.dump(2) + "\n");
        }

        ordered_json bif = ordered_json::array();
        for (const auto& b : bifurcations) {
            ordered_json j;
            j["inertia"] = b.inertia;
            j["kind"] = to_string(b.kind);
            j["families"] = b.families;
            bif.push_back(j);
        }
        write_text_file(fs::path(out_dir) / "bifurcations.json", bif.dump(2) + "\n");

        // metadata
        ordered_json meta;
        meta["tool"] = "qcc";
        meta["version"] = kToolVersion;
        meta["config"] = resolved_config_json(cfg);
        ordered_json pairs = ordered_json::array();
        for (int i = 0; i < 3; ++i) {
            const ShapeFunction& s = ctx.shapes.pair[i];
            ordered_json pj;
            pj["pair"] = pair_name(i);
            pj["c1"] = s.c1;
            pj["c2"] = s.c2;
            pj["p"] = s.p;
            pj["q"] = s.q;
            pj["kind"] = s.kind == ShapeKind::TwoBranch ? "two_branch" : "monotone";
            if (s.kind == ShapeKind::TwoBranch) {
                const auto crit = shape_crit(s);
                pj["x0"] = shape_zero(s);
                pj["xc"] = crit.xc;
                pj["f_max"] = crit.f_max;
            }
            pairs.push_back(pj);
        }
        meta["pairs"] = pairs;
        meta["k"] = ctx.shapes.k;
        meta["k1"] = ctx.shapes.k1;
        meta["proportional"] = ctx.shapes.proportional;
        if (ctx.shapes.pair[kPair12].kind == ShapeKind::TwoBranch)
            meta["k_tilde"] = k_tilde(ctx.shapes.pair[kPair12]);
        else
            meta["k_tilde"] = nullptr;
        meta["grid_points"] = n_grid;
        meta["eta_top"] = scan.grid.front();
        meta["eta_bottom"] = scan.grid.back();
        ordered_json fams = ordered_json::array();
        int index = 1;
        for (const auto& curve : scan.curves) {
            ordered_json fj;
            fj["index"] = index++;
            fj["label"] = curve.family.rep.label();
            ordered_json members = ordered_json::array();
            for (const auto& m : curve.family.members) members.push_back(m.label());
            fj["members"] = members;
            ordered_json intervals = ordered_json::array();
            for (const auto& iv : curve.validity) {
                ordered_json ij;
                ij["eta_hi"] = iv.eta_hi;
                ij["eta_lo"] = iv.eta_lo;
                ij["inertia_hi"] = iv.inertia_hi;
                ij["inertia_lo"] = iv.inertia_lo;
                ij["ends_degenerate_hi"] = iv.degenerate_hi;
                ij["ends_degenerate_lo"] = iv.degenerate_lo;
                intervals.push_back(ij);
            }
            fj["validity_intervals"] = intervals;
            fams.push_back(fj);
        }
        meta["families"] = fams;
        write_text_file(fs::path(out_dir) / "meta.json", meta.dump(2) + "\n");
        return kExitOk;
    });
}

int cmd_count(const std::string& config_path, double inertia_query) {
    return guarded([&]() {
        const RunConfig cfg = load_run_config(config_path);
        if (!(inertia_query > 0.0)) throw config_error("--inertia must be positive");
        const FamilyContext ctx = cfg.family_context();
        const FamilyScan scan = scan_families(ctx, cfg.grid);
        const auto solutions = count_at_inertia(scan.curves, ctx, inertia_query);

        ordered_json out;
        out["inertia"] = inertia_query;
        out["count"] = solutions.size();
        ordered_json arr = ordered_json::array();
        for (const auto& s : solutions) arr.push_back(solution_json(s, cfg.masses));
        out["solutions"] = arr;
        std::cout << out.dump(2) << "\n";
        return solutions.empty() ? kExitEmpty : kExitOk;
    });
}

int cmd_solve(const std::string& config_path, double omega_sq) {
    return guarded([&]() {
        const RunConfig cfg = load_run_config(config_path);
        if (!(omega_sq > 0.0)) throw config_error("--omega2 must be positive");
        const FamilyContext ctx = cfg.family_context();

        bool solvable = true;
        for (const auto& s : ctx.shapes.pair) {
            if (s.kind == ShapeKind::TwoBranch &&
                omega_sq > shape_crit(s).f_max * (1.0 + 1e-12))
                solvable = false;
        }

        std::vector<InertiaSolution> solutions;
        if (solvable) {
            for (const auto& family : enumerate_families(ctx.shapes)) {
                const ConfigTriple config = config_at(ctx, family.rep, omega_sq);
                if (config.status() != TriangleStatus::NonDegenerate) continue;
                const bool dup =
                    std::any_of(solutions.begin(), solutions.end(), [&](const InertiaSolution& u) {
                        const auto close = [](double x, double y) {
                            return std::fabs(x - y) <= 1e-10 * std::fmax(1.0, std::fmax(x, y));
                        };
                        return close(u.config.r12, config.r12) && close(u.config.r13, config.r13) &&
                               close(u.config.r23, config.r23);
                    });
                if (dup) continue;
                solutions.push_back({family.rep.label(), omega_sq, config,
                                     classify(config, cfg.tol.classify_rel)});
            }
        }

        ordered_json out;
        out["omega2"] = omega_sq;
        out["count"] = solutions.size();
        ordered_json arr = ordered_json::array();
        for (const auto& s : solutions) arr.push_back(solution_json(s, cfg.masses));
        out["solutions"] = arr;
        std::cout << out.dump(2) << "\n";
        return solutions.empty() ? kExitEmpty : kExitOk;
    });
}

namespace {

struct VerifyEntry {
    std::string family;
    double eta = 0.0;
    double omega = 0.0; // signed; period uses |omega|
    ConfigTriple config;
};

std::vector<VerifyEntry> entries_from_solution_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open solution file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("solution file is not valid JSON: ") + e.what());
    }

    nlohmann::json items = nlohmann::json::array();
    if (j.is_array()) {
        items = j;
    } else if (j.is_object() && j.contains("solutions")) {
        items = j["solutions"];
    } else {
        items.push_back(j);
    }

    std::vector<VerifyEntry> out;
    for (const auto& item : items) {
        VerifyEntry e;
        if (item.contains("family")) e.family = item["family"].get<std::string>();
        if (item.contains("eta")) {
            e.eta = item["eta"].get<double>();
        } else if (item.contains("omega2")) {
            e.eta = item["omega2"].get<double>();
        } else {
            throw config_error("solution entry missing 'eta' (or 'omega2')");
        }
        if (!(e.eta > 0.0)) throw config_error("solution entry has nonpositive eta");
        e.omega = item.contains("omega") ? item["omega"].get<double>() : std::sqrt(e.eta);
        for (const char* field : {"r12", "r13", "r23"}) {
            if (!item.contains(field))
                throw config_error(std::string("solution entry missing '") + field + "'");
        }
        e.config = ConfigTriple{item["r12"].get<double>(), item["r13"].get<double>(),
                                item["r23"].get<double>()};
        out.push_back(e);
    }
    return out;
}

std::vector<VerifyEntry> entries_from_analysis_dir(const std::string& dir) {
    const fs::path path = fs::path(dir) / "families.csv";
    std::ifstream in(path);
    if (!in) throw config_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw config_error("empty families table: " + path.string());
    if (line.rfind("family_label,eta,r12,r13,r23,inertia,triangle_status", 0) != 0)
        throw config_error("unexpected families.csv header in " + path.string());

    std::vector<VerifyEntry> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<std::string, 8> fields;
        std::size_t start = 0;
        for (int f = 0; f < 8; ++f) {
            const std::size_t comma = line.find(',', start);
            fields[f] = line.substr(start, comma == std::string::npos ? comma : comma - start);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields[6] != "non_degenerate") continue;
        VerifyEntry e;
        e.family = fields[0];
        e.eta = std::stod(fields[1]);
        e.omega = std::sqrt(e.eta);
        e.config = ConfigTriple{std::stod(fields[2]), std::stod(fields[3]), std::stod(fields[4])};
        out.push_back(e);
    }
    return out;
}

} // namespace

int cmd_verify(const std::string& config_path, const std::string& solution_file,
               const std::string& all_dir) {
    return guarded([&]() {
        if (solution_file.empty() == all_dir.empty())
            throw config_error("verify needs exactly one of --solution FILE or --all DIR");
        const RunConfig cfg = load_run_config(config_path);
        const System sys = cfg.system();

        const std::vector<VerifyEntry> entries = solution_file.empty()
                                                     ? entries_from_analysis_dir(all_dir)
                                                     : entries_from_solution_file(solution_file);
        if (entries.empty()) {
            ordered_json out;
            out["count"] = 0;
            out["all_pass"] = true;
            out["solutions"] = ordered_json::array();
            std::cout << out.dump(2) << "\n";
            return kExitEmpty;
        }

        struct Result {
            ordered_json json;
            bool pass = false;
            std::string numerical_failure;
        };
        std::vector<Result> results(entries.size());

        parallel_for(entries.size(), [&](std::size_t idx) {
            const VerifyEntry& e = entries[idx];
            Result& res = results[idx];
            ordered_json j;
            if (!e.family.empty()) j["family"] = e.family;
            j["eta"] = e.eta;
            j["r12"] = e.config.r12;
            j["r13"] = e.config.r13;
            j["r23"] = e.config.r23;
            try {
                const PlanarState placed = embed(e.config, cfg.masses);
                const double residual = cc_residual(placed, sys, e.eta);
                const double period = 2.0 * M_PI / std::fabs(e.omega);
                const PlanarState rotating = rigid_rotation_state(placed, e.omega);

                IntegrateOptions opt;
                opt.rel_tol = cfg.tol.integrate_rel;
                opt.abs_tol = cfg.tol.integrate_abs;
                const Trajectory traj = integrate(rotating, sys, period, opt);
                const PeriodicityError perr = periodicity_error(traj, period);

                const double e0 = total_energy(rotating, sys);
                const double l0 = angular_momentum(rotating, cfg.masses);
                double e_drift = 0.0, l_drift = 0.0;
                for (const auto& st : traj.states()) {
                    e_drift = std::fmax(e_drift, std::fabs(total_energy(st, sys) - e0));
                    l_drift =
                        std::fmax(l_drift, std::fabs(angular_momentum(st, cfg.masses) - l0));
                }
                e_drift /= std::fmax(std::fabs(e0), 1e-30);
                l_drift /= std::fmax(std::fabs(l0), 1e-30);

                const bool pass = residual <= cfg.tol.verify_residual &&
                                  perr.total() <= cfg.tol.verify_periodicity;
                j["cc_residual"] = residual;
                j["period"] = period;
                j["periodicity_error"] = perr.total();
                j["position_error"] = perr.position;
                j["velocity_error"] = perr.velocity;
                j["energy_drift"] = e_drift;
                j["angular_momentum_drift"] = l_drift;
                j["com_drift"] = traj.stats().max_com_drift;
                j["steps"] = traj.stats().steps;
                j["pass"] = pass;
                res.pass = pass;
            } catch (const std::invalid_argument& err) {
                j["error"] = err.what();
                j["pass"] = false;
                res.pass = false;
            } catch (const numerical_error& err) {
                res.numerical_failure = err.what();
            }
            res.json = std::move(j);
        });

        for (const auto& r : results)
            if (!r.numerical_failure.empty()) throw numerical_error(r.numerical_failure);

        ordered_json out;
        std::size_t passed = 0;
        ordered_json arr = ordered_json::array();
        for (const auto& r : results) {
            passed += r.pass ? 1u : 0u;
            arr.push_back(r.json);
        }
        out["count"] = entries.size();
        out["passed"] = passed;
        out["failed"] = entries.size() - passed;
        out["all_pass"] = passed == entries.size();
        out["solutions"] = arr;
        std::cout << out.dump(2) << "\n";
        return passed == entries.size() ? kExitOk : kExitVerifyFailed;
    });
}

int cmd_collinear(const std::string& config_path, double omega_sq) {
    return guarded([&]() {
        const RunConfig cfg = load_run_config(config_path);
        if (!(omega_sq > 0.0)) throw config_error("--omega2 must be positive");
        const System sys = cfg.system();
        const CollinearCount counts = count_collinear(sys, omega_sq);

        ordered_json out;
        out["omega2"] = omega_sq;
        out["total"] = counts.total;
        ordered_json arr = ordered_json::array();
        for (const auto& per : counts.orderings) {
            ordered_json oj;
            oj["ordering"] = {per.ordering[0] + 1, per.ordering[1] + 1, per.ordering[2] + 1};
            ordered_json sols = ordered_json::array();
            for (const auto& sol : per.solutions) {
                ordered_json sj;
                sj["s"] = {sol.s[0], sol.s[1], sol.s[2]};
                sj["gap1"] = sol.gap1;
                sj["gap2"] = sol.gap2;
                sj["residual"] = sol.residual;
                sj["fold"] = sol.fold_flag;
                const PlanarState planar = embed_on_line(sol, cfg.masses);
                sj["planar_residual"] = cc_residual(planar, sys, omega_sq);
                sols.push_back(sj);
            }
            oj["solutions"] = sols;
            arr.push_back(oj);
        }
        out["orderings"] = arr;
        std::cout << out.dump(2) << "\n";
        return counts.total == 0 ? kExitEmpty : kExitOk;
    });
}

int cmd_ktilde(const std::string& config_path) {
    return guarded([&]() {
        const RunConfig cfg = load_run_config(config_path);
        const ShapeSet shapes = cfg.shape_set();
        const ShapeFunction& base = shapes.pair[kPair12];
        if (base.kind != ShapeKind::TwoBranch)
            throw config_error(
                "k_tilde is defined only for two-branch (attractive-repulsive, B > 0) shapes");
        const auto crit = shape_crit(base);
        ordered_json out;
        out["k_tilde"] = k_tilde(base);
        out["x0"] = shape_zero(base);
        out["xc"] = crit.xc;
        out["f_max"] = crit.f_max;
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    });
}

} // namespace qcc::cli
