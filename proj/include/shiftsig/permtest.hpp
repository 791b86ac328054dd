#pragma once

// Exact and adaptive Monte-Carlo permutation tests of "no semantic shift".
//
// A relabelling keeps the group sizes (n1, n2) and reassigns occurrences to
// periods. Only the set partition matters, so the kernel always selects the
// smaller group and derives the other group's sum from the pooled sum.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shiftsig/core.hpp"
#include "shiftsig/random.hpp"

namespace shiftsig::permtest {

/// One Monte-Carlo stage. A stage with `escalate_below` set hands over to
/// the next stage when its p-value falls strictly below the threshold.
struct Stage {
  std::uint64_t permutations = 0;
  std::optional<double> escalate_below;

  friend bool operator==(const Stage&, const Stage&) = default;
};

std::vector<Stage> default_stages();

/// Parses "1000:0.05,10000:0.005,100000". Throws InvalidConfig.
std::vector<Stage> parse_stages(std::string_view text);
std::string format_stages(std::span<const Stage> stages);

struct PermutationConfig {
  double alpha = 0.05;
  std::vector<Stage> stages = default_stages();
  std::uint64_t exact_threshold = 10'000;
  std::uint64_t master_seed = 0;

  /// Throws InvalidConfig.
  void validate() const;
};

enum class Method : std::uint8_t { Exact, MonteCarlo };

std::string_view to_string(Method method) noexcept;
/// Throws MalformedRow.
Method parse_method(std::string_view text);

struct PValue {
  double value = 1.0;
  Method method = Method::Exact;
  std::uint64_t n_used = 0;
  bool floored = false;
};

struct NullDistribution {
  std::string word;
  std::vector<double> samples;
  double observed = 0.0;
};

/// C(n1 + n2, min(n1, n2)); nullopt when it does not fit in 64 bits.
std::optional<std::uint64_t> combinations_count(std::uint64_t n1, std::uint64_t n2) noexcept;

/// Concatenates C1 then C2 into one pooled block (first n1 rows are group 1).
Occurrences pool(const Occurrences& c1, const Occurrences& c2);

/// Evaluates the shift statistic for relabellings of a pooled block.
class PermutationKernel {
 public:
  /// Throws InvalidSplit unless 1 <= n1 < pooled.size().
  PermutationKernel(const Occurrences& pooled, std::size_t n1);

  [[nodiscard]] std::size_t pooled_size() const noexcept { return pooled_.size(); }
  /// Size of the group the kernel selects: min(n1, n2).
  [[nodiscard]] std::size_t selected_size() const noexcept { return selected_; }

  /// Statistic when `selected` (selected_size() distinct row indices) forms
  /// the smaller group. Rows are summed in the order given. A split with a
  /// zero-norm group mean scores 2, the maximum distance.
  double statistic(std::span<const std::uint32_t> selected);

  /// Statistic of the observed labelling, summed in row order.
  double observed();

  [[nodiscard]] std::vector<std::uint32_t> identity_selection() const;

 private:
  const Occurrences& pooled_;
  std::size_t n1_;
  std::size_t selected_;
  std::vector<double> total_;
  std::vector<double> selected_mean_;
  std::vector<double> other_mean_;
};

/// Permuted statistics within this distance of the observed value count as
/// reaching it. Relabellings that are mathematically tied with the observed
/// one (the mirror partition when n1 == n2, swaps of duplicate rows) are
/// summed in a different order and can land a few ulps below it.
inline constexpr double kTieTolerance = 1e-12;

[[nodiscard]] inline bool reaches_observed(double statistic, double observed) noexcept {
  return statistic >= observed - kTieTolerance;
}

/// Exhaustive enumeration of every choice of group 1. Throws
/// TooManyCombinations when C(n, n1) exceeds `exact_threshold`.
/// When n1 == n2 each partition is visited once rather than twice (as the
/// side holding row 0), which leaves p unchanged and n_used = C(n, n1) / 2.
/// `null_out`, when given, receives every enumerated statistic.
PValue exact_pvalue(const Occurrences& pooled, std::size_t n1, double observed,
                    std::uint64_t exact_threshold = 10'000, NullDistribution* null_out = nullptr);

struct MonteCarloResult {
  PValue p;
  NullDistribution null;
};

/// `permutations` uniformly random relabellings drawn from `rng`. Throws
/// InvalidSplit. When `keep_samples` is false the null samples are dropped.
MonteCarloResult monte_carlo_pvalue(const Occurrences& pooled, std::size_t n1, double observed,
                                    std::uint64_t permutations, random::CounterRng& rng,
                                    bool keep_samples = true);
MonteCarloResult monte_carlo_pvalue(const Occurrences& pooled, std::size_t n1, double observed,
                                    std::uint64_t permutations, std::uint64_t seed,
                                    bool keep_samples = true);

/// Philox stream key of a word: derive_key(master_seed, word).
std::uint64_t word_stream_key(std::uint64_t master_seed, std::string_view word) noexcept;

struct AdaptiveResult {
  ShiftStatistic statistic;
  /// Observed value as computed by the permutation kernel; this is the value
  /// permuted statistics are compared against.
  double observed = 0.0;
  PValue p;
  /// p-value of each Monte-Carlo stage run, in order (empty for exact).
  std::vector<double> stage_pvalues;
  /// Samples of the final stage (all assignments when exact), if requested.
  NullDistribution null;
};

/// Observed statistic plus exact or staged Monte-Carlo p-value. Stage i draws
/// from substream i of the word's stream, so each escalation is a fresh
/// sample and the result does not depend on which other words are tested.
AdaptiveResult adaptive_pvalue(std::string_view word, const Occurrences& c1,
                               const Occurrences& c2, const PermutationConfig& cfg,
                               bool keep_null = false);

/// TSV: "# word=<w> observed=<x> n=<n>" then one statistic per line (%.17g).
void write_null_distribution(const NullDistribution& null, std::ostream& out);
/// Throws MalformedHeader or MalformedRow.
NullDistribution read_null_distribution(std::istream& in);

}  // namespace shiftsig::permtest
