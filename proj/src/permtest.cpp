#include "shiftsig/permtest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "shiftsig/detail/text.hpp"
#include "shiftsig/detail/uint128.hpp"
#include "shiftsig/error.hpp"

namespace shiftsig::permtest {

std::vector<Stage> default_stages() {
  return {{1'000, 0.05}, {10'000, 0.005}, {100'000, std::nullopt}};
}

std::vector<Stage> parse_stages(std::string_view text) {
  std::vector<Stage> stages;
  for (auto field : detail::split(text, ',')) {
    const auto parts = detail::split(field, ':');
    if (parts.size() > 2) throw Error(ErrorKind::InvalidConfig, "bad stage '" + std::string(field) + "'");
    const auto n = detail::parse_uint(parts[0]);
    if (!n) throw Error(ErrorKind::InvalidConfig, "bad stage size '" + std::string(parts[0]) + "'");
    Stage stage{*n, std::nullopt};
    if (parts.size() == 2) {
      const auto t = detail::parse_double(parts[1]);
      if (!t) throw Error(ErrorKind::InvalidConfig, "bad stage threshold '" + std::string(parts[1]) + "'");
      stage.escalate_below = *t;
    }
    stages.push_back(stage);
  }
  PermutationConfig probe;
  probe.stages = stages;
  probe.validate();
  return stages;
}

std::string format_stages(std::span<const Stage> stages) {
  std::string out;
  for (const auto& s : stages) {
    if (!out.empty()) out += ',';
    out += std::to_string(s.permutations);
    if (s.escalate_below) {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, *s.escalate_below);
      out += ':';
      out.append(buf, res.ptr);
    }
  }
  return out;
}

void PermutationConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidConfig, "alpha must lie in (0, 1)");
  if (stages.empty()) throw Error(ErrorKind::InvalidConfig, "at least one permutation stage is required");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const bool last = i + 1 == stages.size();
    if (s.permutations == 0) throw Error(ErrorKind::InvalidConfig, "stage sizes must be positive");
    if (i > 0 && s.permutations <= stages[i - 1].permutations) {
      throw Error(ErrorKind::InvalidConfig, "stage sizes must be strictly increasing");
    }
    if (last && s.escalate_below) {
      throw Error(ErrorKind::InvalidConfig, "the last stage cannot carry an escalation threshold");
    }
    if (!last) {
      if (!s.escalate_below || !(*s.escalate_below > 0.0 && *s.escalate_below <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "every stage but the last needs a threshold in (0, 1]");
      }
      if (i > 0 && !(*s.escalate_below < *stages[i - 1].escalate_below)) {
        throw Error(ErrorKind::InvalidConfig, "stage thresholds must be strictly decreasing");
      }
    }
  }
}

std::string_view to_string(Method method) noexcept {
  return method == Method::Exact ? "exact" : "monte_carlo";
}

Method parse_method(std::string_view text) {
  if (text == "exact") return Method::Exact;
  if (text == "monte_carlo") return Method::MonteCarlo;
  throw Error(ErrorKind::MalformedRow, "unknown method '" + std::string(text) + "'");
}

std::optional<std::uint64_t> combinations_count(std::uint64_t n1, std::uint64_t n2) noexcept {
  const std::uint64_t k = std::min(n1, n2);
  const detail::uint128 n = static_cast<detail::uint128>(n1) + n2;
  detail::uint128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // c * (n - k + i) / i == C(n - k + i, i), exact at every step.
    c = c * (n - k + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(c);
}

Occurrences pool(const Occurrences& c1, const Occurrences& c2) {
  Occurrences pooled(c1.dim());
  pooled.reserve(c1.size() + c2.size());
  pooled.append(c1);
  pooled.append(c2);
  return pooled;
}

PermutationKernel::PermutationKernel(const Occurrences& pooled, std::size_t n1)
    : pooled_(pooled), n1_(n1) {
  const std::size_t n = pooled.size();
  if (n1 == 0 || n1 >= n) {
    throw Error(ErrorKind::InvalidSplit, "group 1 size " + std::to_string(n1) + " out of range for " +
                                             std::to_string(n) + " pooled occurrences");
  }
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::InvalidSplit, "too many pooled occurrences");
  }
  selected_ = std::min(n1, n - n1);
  const std::size_t dim = pooled.dim();
  total_.assign(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = pooled.row(i);
    for (std::size_t j = 0; j < dim; ++j) total_[j] += row[j];
  }
  selected_mean_.resize(dim);
  other_mean_.resize(dim);
}

double PermutationKernel::statistic(std::span<const std::uint32_t> selected) {
  const std::size_t dim = pooled_.dim();
  const double* data = pooled_.data().data();
  std::fill(selected_mean_.begin(), selected_mean_.end(), 0.0);
  double* acc = selected_mean_.data();
  for (const std::uint32_t idx : selected) {
    const double* row = data + std::size_t{idx} * dim;
    for (std::size_t j = 0; j < dim; ++j) acc[j] += row[j];
  }
  const double k = static_cast<double>(selected_);
  const double rest = static_cast<double>(pooled_.size() - selected_);
  double dot = 0.0;
  double ss = 0.0;
  double oo = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double s = acc[j] / k;
    const double o = (total_[j] - acc[j]) / rest;
    dot += s * o;
    ss += s * s;
    oo += o * o;
  }
  if (!(ss > 0.0) || !(oo > 0.0)) return 2.0;
  return std::clamp(1.0 - dot / (std::sqrt(ss) * std::sqrt(oo)), 0.0, 2.0);
}

std::vector<std::uint32_t> PermutationKernel::identity_selection() const {
  std::vector<std::uint32_t> sel(selected_);
  // The smaller group is C1 when n1 <= n2, otherwise C2.
  const auto first = static_cast<std::uint32_t>(selected_ == n1_ ? 0 : n1_);
  std::iota(sel.begin(), sel.end(), first);
  return sel;
}

double PermutationKernel::observed() {
  const auto sel = identity_selection();
  return statistic(sel);
}

PValue exact_pvalue(const Occurrences& pooled, std::size_t n1, double observed,
                    std::uint64_t exact_threshold, NullDistribution* null_out) {
  const std::size_t n = pooled.size();
  if (n1 > n) throw Error(ErrorKind::InvalidSplit, "group 1 larger than the pooled sample");
  const auto total = combinations_count(n1, n - n1);
  if (!total || *total > exact_threshold) {
    throw Error(ErrorKind::TooManyCombinations,
                "C(" + std::to_string(n) + ", " + std::to_string(n1) + ") exceeds the exact threshold");
  }
  if (null_out) {
    null_out->observed = observed;
    null_out->samples.clear();
  }
  if (n1 == 0 || n1 == n) {
    // Single assignment: the observed labelling itself.
    if (null_out) null_out->samples.push_back(observed);
    return PValue{1.0, Method::Exact, 1, false};
  }

  PermutationKernel kernel(pooled, n1);
  const std::size_t k = kernel.selected_size();
  // With equal group sizes a subset and its complement are the same
  // partition; enumerate each partition once, as the subset holding row 0.
  const bool mirrored = 2 * k == n;
  std::vector<std::uint32_t> comb(k);
  std::iota(comb.begin(), comb.end(), 0U);
  if (null_out) null_out->samples.reserve(mirrored ? *total / 2 : *total);

  std::uint64_t hits = 0;
  std::uint64_t visited = 0;
  for (;;) {
    const double stat = kernel.statistic(comb);
    if (reaches_observed(stat, observed)) ++hits;
    if (null_out) null_out->samples.push_back(stat);
    ++visited;
    // Advance to the next k-combination of {0..n-1} in lexicographic order.
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    if (mirrored && comb[0] != 0) break;
  }
  return PValue{static_cast<double>(hits) / static_cast<double>(visited), Method::Exact, visited, false};
}

MonteCarloResult monte_carlo_pvalue(const Occurrences& pooled, std::size_t n1, double observed,
                                    std::uint64_t permutations, random::CounterRng& rng,
                                    bool keep_samples) {
  if (permutations == 0) throw Error(ErrorKind::InvalidConfig, "need at least one permutation");
  PermutationKernel kernel(pooled, n1);
  const std::size_t n = pooled.size();
  const std::size_t k = kernel.selected_size();

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0U);

  MonteCarloResult result;
  result.null.observed = observed;
  if (keep_samples) result.null.samples.reserve(permutations);

  std::uint64_t hits = 0;
  for (std::uint64_t draw = 0; draw < permutations; ++draw) {
    // Partial Fisher-Yates: the first k slots become a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(random::uniform_below(rng, n - i));
      std::swap(order[i], order[j]);
    }
    const double stat = kernel.statistic(std::span<const std::uint32_t>(order.data(), k));
    if (reaches_observed(stat, observed)) ++hits;
    if (keep_samples) result.null.samples.push_back(stat);
  }

  const auto total = static_cast<double>(permutations);
  if (hits == 0) {
    result.p = PValue{1.0 / total, Method::MonteCarlo, permutations, true};
  } else {
    result.p = PValue{static_cast<double>(hits) / total, Method::MonteCarlo, permutations, false};
  }
  return result;
}

MonteCarloResult monte_carlo_pvalue(const Occurrences& pooled, std::size_t n1, double observed,
                                    std::uint64_t permutations, std::uint64_t seed,
                                    bool keep_samples) {
  random::CounterRng rng(random::mix64(seed), 0);
  return monte_carlo_pvalue(pooled, n1, observed, permutations, rng, keep_samples);
}

std::uint64_t word_stream_key(std::uint64_t master_seed, std::string_view word) noexcept {
  return random::derive_key(master_seed, word);
}

AdaptiveResult adaptive_pvalue(std::string_view word, const Occurrences& c1, const Occurrences& c2,
                               const PermutationConfig& cfg, bool keep_null) {
  AdaptiveResult result;
  result.statistic = shift_statistic(c1, c2, std::string(word));
  result.null.word = std::string(word);

  const Occurrences pooled = pool(c1, c2);
  PermutationKernel kernel(pooled, c1.size());
  result.observed = kernel.observed();
  result.null.observed = result.observed;

  const auto combos = combinations_count(c1.size(), c2.size());
  if (combos && *combos <= cfg.exact_threshold) {
    result.p = exact_pvalue(pooled, c1.size(), result.observed, cfg.exact_threshold,
                            keep_null ? &result.null : nullptr);
    result.null.word = std::string(word);
    return result;
  }

  const std::uint64_t key = word_stream_key(cfg.master_seed, word);
  for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
    const auto& stage = cfg.stages[s];
    random::CounterRng rng(key, s);
    auto mc = monte_carlo_pvalue(pooled, c1.size(), result.observed, stage.permutations, rng, keep_null);
    result.p = mc.p;
    result.stage_pvalues.push_back(mc.p.value);
    if (keep_null) result.null.samples = std::move(mc.null.samples);
    if (!stage.escalate_below || !(mc.p.value < *stage.escalate_below)) break;
  }
  return result;
}

void write_null_distribution(const NullDistribution& null, std::ostream& out) {
  out << "# word=" << null.word << " observed=" << detail::format_g(null.observed, 17)
      << " n=" << null.samples.size() << '\n';
  for (double s : null.samples) out << detail::format_g(s, 17) << '\n';
}

NullDistribution read_null_distribution(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("# word=")) {
    throw Error(ErrorKind::MalformedHeader, "line 1: expected '# word=<w> observed=<x> n=<n>'");
  }
  const auto obs_pos = line.rfind(" observed=");
  const auto n_pos = line.rfind(" n=");
  if (obs_pos == std::string::npos || n_pos == std::string::npos || n_pos < obs_pos) {
    throw Error(ErrorKind::MalformedHeader, "line 1: missing observed= or n=");
  }
  NullDistribution null;
  null.word = line.substr(7, obs_pos - 7);
  const std::string_view view(line);
  const auto observed = detail::parse_double(view.substr(obs_pos + 10, n_pos - obs_pos - 10));
  const auto count = detail::parse_uint(view.substr(n_pos + 3));
  if (!observed || !count) throw Error(ErrorKind::MalformedHeader, "line 1: unparsable header values");
  null.observed = *observed;
  null.samples.reserve(*count);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto v = detail::parse_double(line);
    if (!v) throw Error(ErrorKind::MalformedRow, "line " + std::to_string(lineno) + ": not a number");
    null.samples.push_back(*v);
  }
  if (null.samples.size() != *count) {
    throw Error(ErrorKind::MalformedRow, "header announces " + std::to_string(*count) + " samples, found " +
                                             std::to_string(null.samples.size()));
  }
  return null;
}

}  // namespace shiftsig::permtest
