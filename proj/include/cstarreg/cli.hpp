#pragma once

// Command-line front end: parses flags into a RunConfig and runs one command,
// writing a deterministic JSON (or CSV) report.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cstarreg::cli {

struct RunConfig {
  std::string command;  // polar | mp | cutdown | lemma3 | dist | theorem | suite
  std::string input;    // file path or gallery name
  std::string gallery;
  std::vector<double> deltas;
  std::optional<double> gamma;
  double epsilon = 0.01;
  int gridN = 256;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  int n = 8;
  double ratio = 0.5;
  std::string outPath;
  std::string format = "json";  // json | csv
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInconsistent = 2;

/// Checks command-specific requirements; throws InvalidArgument.
void validate(const RunConfig& config);

/// Runs the command. The report goes to config.outPath, or to `out` when no
/// path is set; diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Flag parsing plus run(); the body of the executable.
int main_entry(int argc, char** argv);

}  // namespace cstarreg::cli
