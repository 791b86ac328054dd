#pragma once

// Independent reference implementations used only by tests. They follow the
// textbook definitions directly and share no code with the library paths
// they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;  // rows

inline double cosine_distance_of_means(const Matrix& rows, const std::vector<bool>& in_group1) {
  const std::size_t dim = rows.front().size();
  std::vector<double> a(dim, 0.0);
  std::vector<double> b(dim, 0.0);
  double na = 0;
  double nb = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& target = in_group1[i] ? a : b;
    (in_group1[i] ? na : nb) += 1;
    for (std::size_t j = 0; j < dim; ++j) target[j] += rows[i][j];
  }
  double dot = 0;
  double aa = 0;
  double bb = 0;
  for (std::size_t j = 0; j < dim; ++j) {
    a[j] /= na;
    b[j] /= nb;
    dot += a[j] * b[j];
    aa += a[j] * a[j];
    bb += b[j] * b[j];
  }
  return 1.0 - dot / std::sqrt(aa * bb);
}

/// Enumerates every group-1 subset of size n1 through bitmasks (rows <= 24).
/// Ties with the observed value are resolved with a relative tolerance, so
/// mathematically tied relabellings all count.
inline double exact_pvalue(const Matrix& pooled, std::size_t n1) {
  const std::size_t n = pooled.size();
  std::vector<bool> identity(n, false);
  for (std::size_t i = 0; i < n1; ++i) identity[i] = true;
  const double observed = cosine_distance_of_means(pooled, identity);
  const double slack = 1e-12 * std::max(1.0, std::fabs(observed));
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
    std::vector<bool> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = ((mask >> i) & 1U) != 0;
    ++total;
    if (cosine_distance_of_means(pooled, g) >= observed - slack) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

/// BH adjusted p straight from the definition: for the element at sorted
/// rank r, min(1, min over ranks j >= r of m * p_(j) / j). O(m^2).
inline std::vector<double> bh_adjusted(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<std::pair<double, std::size_t>> sorted;
  for (std::size_t i = 0; i < m; ++i) sorted.emplace_back(p[i], i);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> out(m);
  for (std::size_t r = 0; r < m; ++r) {
    double best = 1.0;
    for (std::size_t j = r; j < m; ++j) {
      best = std::min(best, static_cast<double>(m) * sorted[j].first / static_cast<double>(j + 1));
    }
    out[sorted[r].second] = best;
  }
  return out;
}

/// Textbook step-up: largest k with p_(k) <= k alpha / m; reject ranks 1..k.
inline std::vector<bool> bh_reject(const std::vector<double>& p, double alpha) {
  const std::size_t m = p.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::size_t k = 0;
  for (std::size_t r = 1; r <= m; ++r) {
    if (p[idx[r - 1]] <= static_cast<double>(r) * alpha / static_cast<double>(m)) k = r;
  }
  std::vector<bool> reject(m, false);
  for (std::size_t r = 0; r < k; ++r) reject[idx[r]] = true;
  return reject;
}

/// Rank by counting: rank_i = #{x_j < x_i} + (#{x_j == x_i} + 1) / 2.
inline std::vector<double> count_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0;
    double equal = 0;
    for (double v : x) {
      if (v < x[i]) less += 1;
      if (v == x[i]) equal += 1;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0;
  double mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double num = 0;
  double da = 0;
  double db = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(da * db);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(count_ranks(x), count_ranks(y));
}

/// Logistic MLE by plain gradient ascent with a fixed step 4 / lambda_max
/// bound, run until the gradient is negligible. Intercept first.
inline std::vector<double> logistic_gradient_ascent(const Matrix& x, const std::vector<int>& y,
                                                    double grad_tol = 1e-11,
                                                    std::size_t max_steps = 20'000'000) {
  const std::size_t n = x.size();
  const std::size_t p = x.empty() ? 1 : x.front().size() + 1;
  auto design = [&](std::size_t i, std::size_t j) { return j == 0 ? 1.0 : x[i][j - 1]; };
  // Hessian of the log-likelihood is bounded by X'X / 4; use the Frobenius
  // norm of X'X as a cheap upper bound on its largest eigenvalue.
  double frob = 0;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += design(i, a) * design(i, b);
      frob += s * s;
    }
  }
  const double step = 4.0 / std::sqrt(frob);
  std::vector<double> beta(p, 0.0);
  std::vector<double> grad(p);
  for (std::size_t it = 0; it < max_steps; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0;
      for (std::size_t j = 0; j < p; ++j) eta += design(i, j) * beta[j];
      const double mu = 1.0 / (1.0 + std::exp(-eta));
      for (std::size_t j = 0; j < p; ++j) grad[j] += design(i, j) * (y[i] - mu);
    }
    double norm = 0;
    for (double g : grad) norm = std::max(norm, std::fabs(g));
    if (norm < grad_tol) break;
    for (std::size_t j = 0; j < p; ++j) beta[j] += step * grad[j];
  }
  return beta;
}

}  // namespace oracle
