#pragma once

// Per-occurrence embeddings, period means, and the cosine shift statistic.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shiftsig {

using EmbeddingVector = std::vector<double>;

enum class Period : std::uint8_t { C1 = 0, C2 = 1 };

std::string_view to_string(Period period) noexcept;

/// Row-major block of occurrence vectors sharing one dimension. Row order is
/// the occurrence order and fixes the summation order of every mean.
class Occurrences {
 public:
  explicit Occurrences(std::size_t dim);
  Occurrences(std::size_t dim, std::initializer_list<std::initializer_list<double>> rows);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

  /// Throws DimensionMismatch or NonFiniteValue.
  void append(std::span<const double> vector);
  void append(const Occurrences& other);
  void reserve(std::size_t rows) { data_.reserve(rows * dim_); }

  friend bool operator==(const Occurrences&, const Occurrences&) = default;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

struct WordOccurrences {
  Occurrences c1;
  Occurrences c2;

  explicit WordOccurrences(std::size_t dim) : c1(dim), c2(dim) {}

  [[nodiscard]] const Occurrences& at(Period p) const noexcept { return p == Period::C1 ? c1 : c2; }
  [[nodiscard]] Occurrences& at(Period p) noexcept { return p == Period::C1 ? c1 : c2; }

  friend bool operator==(const WordOccurrences&, const WordOccurrences&) = default;
};

/// All occurrence vectors of a two-period corpus, keyed by word.
class OccurrenceSet {
 public:
  using WordMap = std::map<std::string, WordOccurrences, std::less<>>;

  explicit OccurrenceSet(std::size_t dim);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

  /// Validates the word (nonempty, no tab/newline) and the vector.
  void add(std::string_view word, Period period, std::span<const double> vector);

  /// Registers a word with no occurrences yet; returns its storage.
  WordOccurrences& ensure_word(std::string_view word);

  [[nodiscard]] const WordOccurrences* find(std::string_view word) const;
  [[nodiscard]] WordOccurrences* find(std::string_view word);
  /// Throws UnknownWord.
  [[nodiscard]] const WordOccurrences& at(std::string_view word) const;

  [[nodiscard]] const WordMap& words() const noexcept { return words_; }
  [[nodiscard]] std::size_t vocabulary_size() const noexcept { return words_.size(); }
  [[nodiscard]] std::size_t count(Period period) const noexcept;

  friend bool operator==(const OccurrenceSet&, const OccurrenceSet&) = default;

 private:
  std::size_t dim_;
  WordMap words_;
};

/// Throws MalformedRow if the word cannot be stored in the interchange formats.
void validate_word(std::string_view word);

struct ShiftStatistic {
  std::string word;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double distance = 0.0;
};

/// Coordinate-wise mean, accumulated sequentially in row order in double.
/// Throws EmptyInput.
EmbeddingVector mean_embedding(const Occurrences& vectors);

/// 1 - a.b / (|a||b|), clamped to [0, 2].
/// Throws DimensionMismatch or DegenerateVector (zero norm).
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Cosine distance between the two period means.
ShiftStatistic shift_statistic(const Occurrences& c1, const Occurrences& c2,
                               std::string word = {});

}  // namespace shiftsig
