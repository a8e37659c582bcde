#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "config.hpp"

namespace shellgsm::cli {

enum ExitCode { exit_ok = 0, exit_config = 2, exit_numeric = 3, exit_validation = 4 };

/// Error carrying the process exit code it should map to.
class RunError : public std::runtime_error {
public:
  RunError(const std::string& what, int code) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

private:
  int code_;
};

struct RunOptions {
  std::string out_dir = "out";
  int threads = 1;
  std::optional<int> lmax_override;
  std::optional<double> tol;
};

/// Runs `task` (one of the [task] types) and writes CSV files plus
/// manifest.json into options.out_dir. Returns the exit code.
int run_task(const std::string& task, const Config& config, const RunOptions& options);

}  // namespace shellgsm::cli
