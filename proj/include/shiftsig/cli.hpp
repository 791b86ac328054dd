#pragma once

// Subcommands of the `shiftsig` tool. Each returns the process exit code:
// 0 success, 1 I/O, format or configuration error, 2 nothing to test/evaluate.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "shiftsig/permtest.hpp"
#include "shiftsig/simulate.hpp"

namespace shiftsig::cli {

struct PermutationOptions {
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::uint64_t exact_threshold = 10'000;
  std::string stages = "1000:0.05,10000:0.005,100000";

  [[nodiscard]] permtest::PermutationConfig config() const;
};

struct TestOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<std::filesystem::path> words;
  PermutationOptions permutation;
  unsigned threads = 0;
};

struct SimulateOptions {
  std::filesystem::path output;  // occurrences; ".bin" selects the binary format
  std::filesystem::path truth;
  simulate::SimulationConfig config;
};

struct EvalOptions {
  std::filesystem::path results;
  std::optional<std::filesystem::path> truth;
  std::optional<std::filesystem::path> annotations;
  /// Occurrence file of the simulation, enables the detection-factor regression.
  std::optional<std::filesystem::path> occurrences;
  std::optional<std::filesystem::path> curve_prefix;
  double alpha = 0.05;
  std::size_t k_max = 500;
  bool relative_gain = false;
};

struct DumpNullOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  std::string word;
  PermutationOptions permutation;
};

int cmd_test(const TestOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_dump_null(const DumpNullOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace shiftsig::cli
