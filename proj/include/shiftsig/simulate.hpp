#pragma once

// Synthetic two-period corpora with injected semantic shifts, generated
// directly in embedding space.
//
// Each word is a mixture of Gaussian senses around unit-sphere directions.
// Base frequencies follow Zipf's law over ranks; each period samples every
// word's occurrence count as Poisson(rate * base_frequency), the large-corpus
// limit of resampling `rate` of the sentences with replacement. A shift copies
// fresh draws from the donor's sense mixture into the acceptor's C2
// occurrences, leaving the donor and C1 untouched.
//
// Random streams (all Philox, see random.hpp), seed = master_seed:
//   model      key derive_key(seed, "model"),     substream = word index
//   corpora    key derive_key(seed, "corpora"),   substream = 2 * word index + period
//   pairs      key derive_key(seed, "pairs"),     substream 0
//   injection  key derive_key(seed, "injection"), substream = pair index

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "shiftsig/core.hpp"
#include "shiftsig/random.hpp"

namespace shiftsig::simulate {

struct SimulationConfig {
  std::size_t vocab_size = 2'000;
  std::size_t dim = 32;
  std::size_t n_shifts = 100;
  /// Eligibility band for shift pairs, inclusive.
  std::uint64_t freq_min = 5;
  std::uint64_t freq_max = 500;
  double zipf_s = 1.1;
  /// Fraction of the base corpus each period resamples.
  double rate = 0.7;
  /// Shift proportions are uniform on (proportion_min, proportion_max].
  double proportion_min = 0.0;
  double proportion_max = 1.0;
  /// Sense counts are uniform on {1..max_senses}.
  std::size_t max_senses = 5;
  /// Words with more senses than this are not eligible for shift pairs.
  std::size_t sense_cap = 5;
  /// Sense spread as a multiple of the mean distance between sense directions.
  double spread_ratio = 0.5;
  std::uint64_t master_seed = 0;

  /// Throws InvalidConfig.
  void validate() const;
};

struct SenseComponent {
  EmbeddingVector direction;  // unit norm
  double spread = 0.0;        // RMS distance of a draw from `direction`
  double weight = 0.0;
};

struct WordModel {
  std::string word;
  std::uint64_t base_frequency = 0;
  std::vector<SenseComponent> senses;
};

struct SenseModel {
  std::size_t dim = 0;
  std::vector<WordModel> words;  // index = frequency rank - 1
  double mean_inter_sense_distance = 0.0;

  /// Throws UnknownWord.
  [[nodiscard]] const WordModel& at(std::string_view word) const;
};

struct ShiftPair {
  std::string acceptor;
  std::string donor;

  friend bool operator==(const ShiftPair&, const ShiftPair&) = default;
};

struct InjectedShift {
  std::string acceptor;
  std::string donor;
  double proportion = 0.0;
  std::uint64_t injected_count = 0;

  friend bool operator==(const InjectedShift&, const InjectedShift&) = default;
};

struct SimulationGroundTruth {
  std::vector<InjectedShift> pairs;

  [[nodiscard]] std::unordered_set<std::string> shifted_words() const;
  [[nodiscard]] bool is_shifted(std::string_view word) const;
  [[nodiscard]] std::uint64_t total_injected() const noexcept;
};

/// Name of the word at 0-based frequency rank `index`: "w" + zero-padded rank.
std::string word_name(std::size_t index, std::size_t vocab_size);

/// Zipf base frequency of 1-based `rank`, anchored so the rarest word of the
/// vocabulary sits at freq_min: round(freq_min * (vocab_size / rank)^s).
std::uint64_t zipf_frequency(std::size_t rank, const SimulationConfig& cfg) noexcept;

SenseModel build_sense_model(const SimulationConfig& cfg);

/// One occurrence vector from the word's sense mixture.
void sample_occurrence(const WordModel& word, random::CounterRng& rng, std::span<double> out);

/// Both periods; every model word is present (possibly with zero occurrences).
OccurrenceSet generate_corpora(const SenseModel& model, const SimulationConfig& cfg);

/// Words inside the frequency band and under the sense cap, sorted by
/// descending base frequency (ties by rank).
std::vector<std::string> eligible_words(const SenseModel& model, const SimulationConfig& cfg);

/// Pairs consecutive eligible words and samples n_shifts pairs without
/// replacement; acceptor/donor roles within a pair are random.
/// Throws InsufficientEligibleWords.
std::vector<ShiftPair> select_shift_pairs(const SenseModel& model, const SimulationConfig& cfg);

/// Appends round_half_even(p * donor C2 count) donor-mixture draws to each
/// acceptor's C2 occurrences. Throws UnknownWord.
SimulationGroundTruth inject_shifts(OccurrenceSet& corpora, std::span<const ShiftPair> pairs,
                                    const SenseModel& model, const SimulationConfig& cfg);

struct Simulation {
  SenseModel model;
  OccurrenceSet corpora;
  SimulationGroundTruth truth;
  std::size_t eligible_count = 0;
};

/// build_sense_model -> generate_corpora -> select_shift_pairs -> inject_shifts.
Simulation run_simulation(const SimulationConfig& cfg);

}  // namespace shiftsig::simulate
