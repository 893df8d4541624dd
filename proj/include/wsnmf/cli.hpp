#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <filesystem>

namespace wsnmf {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Runs the command-line tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Plain row-major CSV, 17 significant digits, no header.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path);

}  // namespace wsnmf
