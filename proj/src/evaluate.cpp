#include "shiftsig/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "shiftsig/detail/text.hpp"
#include "shiftsig/error.hpp"

namespace shiftsig::evaluate {

std::unordered_map<std::string, double> AnnotationTable::by_word() const {
  return {rows.begin(), rows.end()};
}

PrecisionCurve precision_at_k(std::span<const std::string> ranking,
                              const std::unordered_set<std::string>& truth, std::size_t k_max) {
  if (ranking.empty()) throw Error(ErrorKind::EmptyRanking, "precision@K of an empty ranking");
  if (k_max == 0) throw Error(ErrorKind::InvalidConfig, "k_max must be at least 1");
  PrecisionCurve curve;
  const std::size_t limit = std::min(k_max, ranking.size());
  curve.points.reserve(limit);
  std::size_t hits = 0;
  for (std::size_t k = 1; k <= limit; ++k) {
    if (truth.contains(ranking[k - 1])) ++hits;
    curve.points.emplace_back(k, static_cast<double>(hits) / static_cast<double>(k));
  }
  return curve;
}

void write_curve(const PrecisionCurve& curve, std::ostream& out) {
  out << "K\tprecision\n";
  for (const auto& [k, p] : curve.points) out << k << '\t' << detail::format_g(p, 6) << '\n';
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean((i+1)..j).
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 3) throw Error(ErrorKind::DegenerateInput, "Spearman needs at least 3 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const auto n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(ErrorKind::DegenerateInput, "constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& columns) {
  const auto n = columns.rows();
  if (n < 2) throw Error(ErrorKind::ZeroVariance, "standardizing needs at least two rows");
  Eigen::MatrixXd out(columns.rows(), columns.cols());
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    const double mean = columns.col(c).mean();
    const Eigen::VectorXd centered = columns.col(c).array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      throw Error(ErrorKind::ZeroVariance, "column " + std::to_string(c) + " has zero variance");
    }
    out.col(c) = centered / sd;
  }
  return out;
}

namespace {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  return design;
}

Eigen::VectorXd outcome_vector(std::span<const int> y) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) v(static_cast<Eigen::Index>(i)) = y[i] != 0 ? 1.0 : 0.0;
  return v;
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// log(1 + exp(eta)) without overflow.
double softplus(double eta) { return std::max(eta, 0.0) + std::log1p(std::exp(-std::fabs(eta))); }

void check_shapes(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd* beta) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorKind::LengthMismatch, "design rows and outcomes differ in length");
  }
  if (beta && beta->size() != x.cols() + 1) {
    throw Error(ErrorKind::LengthMismatch, "coefficient vector must hold intercept plus one per column");
  }
}

}  // namespace

double logistic_log_likelihood(const Eigen::MatrixXd& x, std::span<const int> y,
                               const Eigen::VectorXd& beta) {
  check_shapes(x, y, &beta);
  const Eigen::VectorXd eta = with_intercept(x) * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll += (y[static_cast<std::size_t>(i)] != 0 ? eta(i) : 0.0) - softplus(eta(i));
  }
  return ll;
}

Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, std::span<const int> y,
                                  const Eigen::VectorXd& beta) {
  check_shapes(x, y, &beta);
  const Eigen::MatrixXd design = with_intercept(x);
  const Eigen::VectorXd eta = design * beta;
  const Eigen::VectorXd mu = eta.unaryExpr(&sigmoid);
  return design.transpose() * (outcome_vector(y) - mu);
}

RegressionResult logistic_fit(const Eigen::MatrixXd& x, std::span<const int> y, LogisticOptions options) {
  check_shapes(x, y, nullptr);
  const Eigen::VectorXd yv = outcome_vector(y);
  const double positives = yv.sum();
  if (positives == 0.0 || positives == static_cast<double>(yv.size())) {
    throw Error(ErrorKind::DegenerateInput, "outcomes must contain both classes");
  }
  const Eigen::MatrixXd design = with_intercept(x);
  const auto p = design.cols();
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(design).rank() < p) {
    throw Error(ErrorKind::SingularDesign, "design matrix (with intercept) is rank deficient");
  }

  RegressionResult result;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd mu(design.rows());
  Eigen::VectorXd w(design.rows());
  auto update_fit = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd eta = design * b;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      mu(i) = sigmoid(eta(i));
      w(i) = mu(i) * (1.0 - mu(i));
    }
  };

  update_fit(beta);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const Eigen::MatrixXd info = design.transpose() * w.asDiagonal() * design;
    const Eigen::VectorXd score = design.transpose() * (yv - mu);
    Eigen::LDLT<Eigen::MatrixXd> solver(info);
    if (solver.info() != Eigen::Success || !solver.isPositive() ||
        solver.vectorD().minCoeff() <= 1e-14 * solver.vectorD().maxCoeff()) {
      throw Error(ErrorKind::SeparationDetected,
                  "information matrix became singular; fitted probabilities collapsed to 0 or 1");
    }
    const Eigen::VectorXd step = solver.solve(score);
    beta += step;
    update_fit(beta);
    result.iterations = iter;
    if (step.cwiseAbs().maxCoeff() < options.tol) {
      result.converged = true;
      break;
    }
  }

  // Diverging coefficients with fitted probabilities pinned at 0/1 mean the
  // classes are (quasi-)separable and the MLE does not exist.
  const double max_residual = (yv - mu).cwiseAbs().maxCoeff();
  if (max_residual < 1e-8 || (!result.converged && (w.array() < 1e-12).any())) {
    throw Error(ErrorKind::SeparationDetected, "outcomes are separable by the covariates");
  }

  const Eigen::MatrixXd info = design.transpose() * w.asDiagonal() * design;
  const Eigen::MatrixXd covariance = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  result.coefficients = beta;
  result.standard_errors = covariance.diagonal().cwiseSqrt();
  result.z_scores = beta.cwiseQuotient(result.standard_errors);
  result.p_values = result.z_scores.unaryExpr([](double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); });
  result.log_likelihood = logistic_log_likelihood(x, y, beta);
  return result;
}

std::string_view to_string(Filter filter) noexcept {
  switch (filter) {
    case Filter::Baseline: return "baseline";
    case Filter::Permutation: return "permutation";
    case Filter::Fdr: return "fdr";
  }
  return "unknown";
}

std::vector<ShiftResult> apply_filter(std::span<const ShiftResult> results, Filter filter, double alpha) {
  std::vector<ShiftResult> out;
  for (const auto& r : results) {
    const bool keep = filter == Filter::Baseline || (filter == Filter::Permutation && r.p_raw < alpha) ||
                      (filter == Filter::Fdr && r.p_adjusted < alpha);
    if (keep) out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ShiftResult& a, const ShiftResult& b) { return a.distance > b.distance; });
  return out;
}

DetectionFactors detection_factors(std::span<const ShiftResult> results,
                                   const simulate::SimulationGroundTruth& truth,
                                   const OccurrenceSet& corpora, double alpha, GainMeasure gain) {
  std::unordered_map<std::string_view, const ShiftResult*> by_word;
  for (const auto& r : results) by_word.emplace(r.word, &r);

  DetectionFactors out;
  std::vector<std::array<double, 3>> rows;
  for (const auto& pair : truth.pairs) {
    const auto it = by_word.find(pair.acceptor);
    if (it == by_word.end()) continue;
    const auto* acceptor = corpora.find(pair.acceptor);
    const auto* donor = corpora.find(pair.donor);
    if (!acceptor || !donor || acceptor->c1.empty() || donor->c1.empty()) continue;
    const ShiftResult& r = *it->second;
    double gain_value = static_cast<double>(pair.injected_count);
    if (gain == GainMeasure::Relative) {
      const double before = static_cast<double>(r.n2) - gain_value;
      gain_value = before > 0.0 ? gain_value / before : gain_value;
    }
    double distance = 0.0;
    try {
      distance = cosine_distance(mean_embedding(acceptor->c1), mean_embedding(donor->c1));
    } catch (const Error&) {
      continue;
    }
    rows.push_back({gain_value, static_cast<double>(r.n2), distance});
    out.acceptors.push_back(pair.acceptor);
    out.detected.push_back(r.p_adjusted < alpha ? 1 : 0);
  }
  out.covariates.resize(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index c = 0; c < 3; ++c) out.covariates(static_cast<Eigen::Index>(i), c) = rows[i][c];
  }
  return out;
}

}  // namespace shiftsig::evaluate
