#pragma once

// Benjamini-Hochberg adjusted p-values across all words tested together.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shiftsig/permtest.hpp"

namespace shiftsig {

struct ShiftResult {
  std::string word;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double distance = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  permtest::Method method = permtest::Method::Exact;
  std::uint64_t n_used = 0;

  [[nodiscard]] bool significant_at(double alpha) const noexcept { return p_adjusted < alpha; }
};

namespace multiplicity {

/// Step-up adjusted p-values, returned in input order:
///   adjusted_(k) = min(1, min_{j >= k} m * p_(j) / j)
/// over the stably sorted p-values. Throws EmptyResultSet, or InvalidConfig
/// when a p-value lies outside (0, 1].
std::vector<double> bh_adjust(std::span<const double> p_raw);

/// Sets p_adjusted on every result from its p_raw; m = results.size().
void bh_adjust(std::span<ShiftResult> results);

/// Results with p_adjusted < alpha, ordered by distance descending (stable).
std::vector<ShiftResult> discoveries(std::span<const ShiftResult> results, double alpha);

}  // namespace multiplicity
}  // namespace shiftsig
