#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "calnet/geometry.hpp"

namespace calnet::cli {

enum class Command { check_minimal, calibrate_current, compare, calibrate_partition, counterexample, oracle };

struct RunConfig {
  Command command = Command::check_minimal;
  std::vector<std::string> inputs;
  ToleranceConfig tol;
  bool exact_mode = false;
  std::optional<std::string> svg_out;
  std::uint64_t seed = 0;

  std::string mode = "same";
  std::optional<std::string> quotient_path, embedding_path, clip_path;
  std::optional<std::string> delta, delta_prime;
  bool traces = false;
  std::string d = "1", h, outer_len = "2", cx_delta = "7/10";
};

enum ExitCode : int { pass = 0, certification_failure = 1, input_error = 2, hypothesis_violation = 3 };

/// Parses arguments (without the program name), runs the command, writes the
/// JSON result to `out` and diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace calnet::cli
