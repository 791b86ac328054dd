#pragma once

// Evaluation against simulated truth and human annotations, plus the
// logistic-regression analysis of which factors drive detection.

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "shiftsig/core.hpp"
#include "shiftsig/multiplicity.hpp"
#include "shiftsig/simulate.hpp"

namespace shiftsig::evaluate {

/// Human shift score per word.
struct AnnotationTable {
  std::vector<std::pair<std::string, double>> rows;  // file order

  [[nodiscard]] std::unordered_map<std::string, double> by_word() const;
};

struct PrecisionCurve {
  /// (K, TP(K) / K) for K = 1..k_max.
  std::vector<std::pair<std::size_t, double>> points;

  [[nodiscard]] std::size_t k_max() const noexcept { return points.size(); }
  /// Precision at K (1-based). K must be <= k_max().
  [[nodiscard]] double at(std::size_t k) const { return points.at(k - 1).second; }
};

/// Points stop at min(k_max, ranking.size()); they are never padded.
/// Throws EmptyRanking.
PrecisionCurve precision_at_k(std::span<const std::string> ranking,
                              const std::unordered_set<std::string>& truth, std::size_t k_max);

/// TSV "K\tprecision" with a header row.
void write_curve(const PrecisionCurve& curve, std::ostream& out);

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws LengthMismatch, or
/// DegenerateInput for fewer than 3 points or a constant input.
double spearman(std::span<const double> x, std::span<const double> y);

/// Columns to mean 0, sample standard deviation 1. Throws ZeroVariance.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& columns);

struct LogisticOptions {
  int max_iter = 100;
  double tol = 1e-8;
};

struct RegressionResult {
  /// Index 0 is the intercept, then one entry per covariate column.
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  Eigen::VectorXd z_scores;
  Eigen::VectorXd p_values;  // two-sided Wald
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Bernoulli log-likelihood of `y` under logit(p) = beta0 + X beta.
double logistic_log_likelihood(const Eigen::MatrixXd& x, std::span<const int> y,
                               const Eigen::VectorXd& beta);
/// Gradient of the log-likelihood with respect to (beta0, beta).
Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, std::span<const int> y,
                                  const Eigen::VectorXd& beta);

/// Maximum-likelihood fit by IRLS (Newton steps), intercept added.
/// Converged when the largest coefficient change falls below tol.
/// Throws SeparationDetected, SingularDesign, LengthMismatch, DegenerateInput.
RegressionResult logistic_fit(const Eigen::MatrixXd& x, std::span<const int> y,
                              LogisticOptions options = {});

enum class Filter { Baseline, Permutation, Fdr };

std::string_view to_string(Filter filter) noexcept;

/// Baseline keeps everything, Permutation keeps p_raw < alpha, Fdr keeps
/// p_adjusted < alpha; the result is ordered by distance descending.
std::vector<ShiftResult> apply_filter(std::span<const ShiftResult> results, Filter filter, double alpha);

enum class GainMeasure {
  Absolute,  // injected occurrence count
  Relative,  // injected count / acceptor C2 count before injection
};

/// Rows of the detection analysis: one per injected pair whose acceptor was
/// tested and whose donor and acceptor both occur in C1.
struct DetectionFactors {
  std::vector<std::string> acceptors;
  /// Columns: frequency gain, acceptor final C2 frequency, donor-acceptor
  /// cosine distance between their C1 means. Raw (unstandardized) scale.
  Eigen::MatrixXd covariates;
  std::vector<int> detected;  // p_adjusted < alpha

  static constexpr std::string_view kNames[3] = {"frequency_gain", "acceptor_frequency",
                                                 "donor_acceptor_distance"};
};

DetectionFactors detection_factors(std::span<const ShiftResult> results,
                                   const simulate::SimulationGroundTruth& truth,
                                   const OccurrenceSet& corpora, double alpha,
                                   GainMeasure gain = GainMeasure::Absolute);

}  // namespace shiftsig::evaluate
