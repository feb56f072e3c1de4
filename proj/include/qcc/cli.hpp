#pragma once

// Subcommand implementations behind the qcc binary. Each returns the process
// exit code: 0 ok, 1 config error, 2 empty result, 3 numerical failure,
// 4 verification failure.

#include <optional>
#include <string>

namespace qcc::cli {

inline constexpr const char* kToolVersion = "0.1.0";

int cmd_analyze(const std::string& config_path, const std::string& out_dir,
                const std::string& format = "csv", std::optional<int> grid_override = {});
int cmd_count(const std::string& config_path, double inertia_query);
int cmd_solve(const std::string& config_path, double omega_sq);
int cmd_verify(const std::string& config_path, const std::string& solution_file,
               const std::string& all_dir);
int cmd_collinear(const std::string& config_path, double omega_sq);
int cmd_ktilde(const std::string& config_path);

} // namespace qcc::cli
