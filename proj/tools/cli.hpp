#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nhimp/correlation.hpp"
#include "nhimp/params.hpp"
#include "nhimp/partition.hpp"

namespace nhimp::cli {

enum class Command { spectrum, corr, ee, fit, sweep, verify };
enum class Format { csv, json };

/// start:stop:count, inclusive at both ends.
struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

Range parse_range(const std::string& text);

struct Grid {
  Range tR;
  Range tL;
};

struct RunConfig {
  Command command = Command::fit;
  ModelParams params{1.0, 0.0, 0.0, 0.0, 0};
  PartitionKind partition = PartitionKind::I;
  int L0 = 0;
  std::vector<int> LAList;  ///< empty: command default
  Route route = Route::analytic;
  std::optional<Grid> grid;
  std::string output;  ///< empty: stdout
  Format format = Format::csv;
  int threads = 1;  ///< parse_args defaults this to the hardware concurrency
  std::vector<int> criteria;  ///< verify: subset to run, empty for all
};

/// Parses argv (flags override values from --config). Throws InvalidArgument
/// on usage errors. Returns nullopt when help was printed to `out`.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Executes one command, writing artifacts to config.output or `out`.
/// Returns 0 on success, 3 when verify finds a failing criterion. Library
/// errors propagate as exceptions.
int run(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Full entry point with the exit-code mapping: 0 ok, 1 usage, 2 numerical, 3 verify.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "%.12g" formatting used for every emitted number.
std::string format_number(double x);

}  // namespace nhimp::cli
