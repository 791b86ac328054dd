#include "shiftsig/core.hpp"

#include <algorithm>
#include <cmath>

#include "shiftsig/error.hpp"

namespace shiftsig {

std::string_view to_string(Period period) noexcept {
  return period == Period::C1 ? "C1" : "C2";
}

Occurrences::Occurrences(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorKind::DimensionMismatch, "embedding dimension must be positive");
}

Occurrences::Occurrences(std::size_t dim,
                         std::initializer_list<std::initializer_list<double>> rows)
    : Occurrences(dim) {
  for (const auto& r : rows) append(std::span<const double>(r.begin(), r.size()));
}

void Occurrences::append(std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "vector has " + std::to_string(vector.size()) +
                                                  " values, expected " + std::to_string(dim_));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, "embedding value is not finite");
  }
  data_.insert(data_.end(), vector.begin(), vector.end());
}

void Occurrences::append(const Occurrences& other) {
  if (other.dim_ != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "cannot merge blocks of different dimension");
  }
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
}

void validate_word(std::string_view word) {
  if (word.empty()) throw Error(ErrorKind::MalformedRow, "empty word");
  if (word.find_first_of("\t\n\r") != std::string_view::npos) {
    throw Error(ErrorKind::MalformedRow, "word contains tab or newline");
  }
}

OccurrenceSet::OccurrenceSet(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorKind::DimensionMismatch, "embedding dimension must be positive");
}

WordOccurrences& OccurrenceSet::ensure_word(std::string_view word) {
  if (auto it = words_.find(word); it != words_.end()) return it->second;
  validate_word(word);
  return words_.emplace(std::string(word), WordOccurrences(dim_)).first->second;
}

void OccurrenceSet::add(std::string_view word, Period period, std::span<const double> vector) {
  ensure_word(word).at(period).append(vector);
}

const WordOccurrences* OccurrenceSet::find(std::string_view word) const {
  auto it = words_.find(word);
  return it == words_.end() ? nullptr : &it->second;
}

WordOccurrences* OccurrenceSet::find(std::string_view word) {
  auto it = words_.find(word);
  return it == words_.end() ? nullptr : &it->second;
}

const WordOccurrences& OccurrenceSet::at(std::string_view word) const {
  if (const auto* w = find(word)) return *w;
  throw Error(ErrorKind::UnknownWord, "word '" + std::string(word) + "' not in occurrence set");
}

std::size_t OccurrenceSet::count(Period period) const noexcept {
  std::size_t total = 0;
  for (const auto& [_, w] : words_) total += w.at(period).size();
  return total;
}

EmbeddingVector mean_embedding(const Occurrences& vectors) {
  if (vectors.empty()) throw Error(ErrorKind::EmptyInput, "mean of zero occurrences");
  const std::size_t dim = vectors.dim();
  EmbeddingVector sum(dim, 0.0);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto row = vectors.row(i);
    for (std::size_t j = 0; j < dim; ++j) sum[j] += row[j];
  }
  const double n = static_cast<double>(vectors.size());
  for (double& v : sum) v /= n;
  return sum;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "cosine distance of vectors with different dimension");
  }
  double dot = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (!(aa > 0.0) || !(bb > 0.0)) {
    throw Error(ErrorKind::DegenerateVector, "cosine distance with a zero-norm vector");
  }
  const double d = 1.0 - dot / (std::sqrt(aa) * std::sqrt(bb));
  return std::clamp(d, 0.0, 2.0);
}

ShiftStatistic shift_statistic(const Occurrences& c1, const Occurrences& c2, std::string word) {
  if (c1.dim() != c2.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "periods have different embedding dimension");
  }
  const auto m1 = mean_embedding(c1);
  const auto m2 = mean_embedding(c2);
  return ShiftStatistic{std::move(word), c1.size(), c2.size(), cosine_distance(m1, m2)};
}

}  // namespace shiftsig
