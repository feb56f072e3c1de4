// Command-line front end: relative equilibria of the planar three-body
// problem under quasi-homogeneous pair potentials.

#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qcc/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qcc: planar relative equilibria under quasi-homogeneous potentials"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("qcc ") + qcc::cli::kToolVersion);

    std::string config_path;
    std::string out_dir;
    std::string format = "csv";
    std::optional<int> grid_override;
    double inertia_query = 0.0;
    double omega_sq = 0.0;
    std::string solution_file;
    std::string all_dir;

    auto* analyze = app.add_subcommand(
        "analyze", "Trace family curves, write families/bifurcations/meta files");
    analyze->add_option("--config", config_path, "JSON run configuration")->required();
    analyze->add_option("--out", out_dir, "output directory")->required();
    analyze->add_option("--format", format, "families table format: csv or json");
    int grid_opt = 0;
    auto* grid_flag = analyze->add_option("--grid", grid_opt, "override the eta grid size");

    auto* count = app.add_subcommand("count", "Count relative equilibria at a moment of inertia");
    count->add_option("--config", config_path, "JSON run configuration")->required();
    count->add_option("--inertia", inertia_query, "queried moment of inertia")->required();

    auto* solve = app.add_subcommand("solve", "All configurations at a level omega^2");
    solve->add_option("--config", config_path, "JSON run configuration")->required();
    solve->add_option("--omega2", omega_sq, "squared angular velocity")->required();

    auto* verify =
        app.add_subcommand("verify", "Residual, periodicity and energy checks for solutions");
    verify->add_option("--config", config_path, "JSON run configuration")->required();
    verify->add_option("--solution", solution_file, "solution JSON file");
    verify->add_option("--all", all_dir, "analysis output directory to verify");

    auto* collinear = app.add_subcommand("collinear", "Collinear relative equilibria at omega^2");
    collinear->add_option("--config", config_path, "JSON run configuration")->required();
    collinear->add_option("--omega2", omega_sq, "squared angular velocity")->required();

    auto* ktilde = app.add_subcommand("ktilde", "Scaling threshold of the base pair shape");
    ktilde->add_option("--config", config_path, "JSON run configuration")->required();

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed()) {
        if (grid_flag->count() > 0) grid_override = grid_opt;
        return qcc::cli::cmd_analyze(config_path, out_dir, format, grid_override);
    }
    if (count->parsed()) return qcc::cli::cmd_count(config_path, inertia_query);
    if (solve->parsed()) return qcc::cli::cmd_solve(config_path, omega_sq);
    if (verify->parsed()) return qcc::cli::cmd_verify(config_path, solution_file, all_dir);
    if (collinear->parsed()) return qcc::cli::cmd_collinear(config_path, omega_sq);
    if (ktilde->parsed()) return qcc::cli::cmd_ktilde(config_path);
    return 1;
}
