#pragma once

// Batch testing: shift statistic, permutation p-value, and BH adjustment for
// every tested word, dispatched over a worker pool.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shiftsig/core.hpp"
#include "shiftsig/multiplicity.hpp"
#include "shiftsig/permtest.hpp"

namespace shiftsig::pipeline {

struct TestPlan {
  std::vector<std::string> words;    // testable, in byte order
  std::vector<std::string> skipped;  // requested but absent from a period
};

/// Words with at least one occurrence in each period. When `requested` is
/// given only those words are considered.
TestPlan plan_tests(const OccurrenceSet& corpora, const std::vector<std::string>* requested = nullptr);

struct TestRun {
  /// One per tested word, in the order of the input word list, BH-adjusted.
  std::vector<ShiftResult> results;
  /// Words whose statistic is undefined (zero-norm period mean) with the reason.
  std::vector<std::pair<std::string, std::string>> failed;
};

/// 0 means: SHIFTSIG_THREADS if set and positive, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Results depend only on (corpora, words, cfg); `threads` changes wall time only.
TestRun run_tests(const OccurrenceSet& corpora, std::span<const std::string> words,
                  const permtest::PermutationConfig& cfg, unsigned threads);

}  // namespace shiftsig::pipeline
