#include "shiftsig/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "shiftsig/error.hpp"

namespace shiftsig::simulate {

void SimulationConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorKind::InvalidConfig, what); };
  if (vocab_size == 0) fail("vocab_size must be positive");
  if (dim == 0) fail("dim must be positive");
  if (!(freq_min < freq_max)) fail("freq_min must be below freq_max");
  if (!(zipf_s > 0.0) || !std::isfinite(zipf_s)) fail("zipf_s must be positive");
  if (!(rate > 0.0 && rate <= 1.0)) fail("rate must lie in (0, 1]");
  if (!(proportion_min >= 0.0 && proportion_min < proportion_max && proportion_max <= 1.0)) {
    fail("shift proportions must satisfy 0 <= min < max <= 1");
  }
  if (max_senses == 0) fail("max_senses must be positive");
  if (!(spread_ratio > 0.0) || !std::isfinite(spread_ratio)) fail("spread_ratio must be positive");
}

const WordModel& SenseModel::at(std::string_view word) const {
  for (const auto& w : words) {
    if (w.word == word) return w;
  }
  throw Error(ErrorKind::UnknownWord, "word '" + std::string(word) + "' not in sense model");
}

std::unordered_set<std::string> SimulationGroundTruth::shifted_words() const {
  std::unordered_set<std::string> out;
  for (const auto& p : pairs) out.insert(p.acceptor);
  return out;
}

bool SimulationGroundTruth::is_shifted(std::string_view word) const {
  return std::any_of(pairs.begin(), pairs.end(), [&](const InjectedShift& p) { return p.acceptor == word; });
}

std::uint64_t SimulationGroundTruth::total_injected() const noexcept {
  std::uint64_t total = 0;
  for (const auto& p : pairs) total += p.injected_count;
  return total;
}

std::string word_name(std::size_t index, std::size_t vocab_size) {
  const std::size_t width = std::max<std::size_t>(4, std::to_string(vocab_size).size());
  std::string digits = std::to_string(index + 1);
  return "w" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

std::uint64_t zipf_frequency(std::size_t rank, const SimulationConfig& cfg) noexcept {
  const double ratio = static_cast<double>(cfg.vocab_size) / static_cast<double>(rank);
  const double f = static_cast<double>(cfg.freq_min) * std::pow(ratio, cfg.zipf_s);
  return std::max<std::uint64_t>(1, random::round_half_even(f));
}

namespace {

void random_unit_vector(random::CounterRng& rng, std::span<double> out) {
  for (;;) {
    random::fill_normal(rng, out, 1.0);
    double norm2 = 0.0;
    for (double v : out) norm2 += v * v;
    if (norm2 > 1e-24) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& v : out) v *= inv;
      return;
    }
  }
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

SenseModel build_sense_model(const SimulationConfig& cfg) {
  cfg.validate();
  SenseModel model;
  model.dim = cfg.dim;
  model.words.reserve(cfg.vocab_size);
  const std::uint64_t key = random::derive_key(cfg.master_seed, "model");

  for (std::size_t i = 0; i < cfg.vocab_size; ++i) {
    random::CounterRng rng(key, i);
    WordModel w;
    w.word = word_name(i, cfg.vocab_size);
    w.base_frequency = zipf_frequency(i + 1, cfg);
    const std::size_t senses = 1 + static_cast<std::size_t>(random::uniform_below(rng, cfg.max_senses));
    double weight_sum = 0.0;
    for (std::size_t s = 0; s < senses; ++s) {
      SenseComponent c;
      c.direction.resize(cfg.dim);
      random_unit_vector(rng, c.direction);
      // Dirichlet(1, ..., 1) via normalized exponentials.
      c.weight = -std::log(1.0 - random::uniform01(rng));
      weight_sum += c.weight;
      w.senses.push_back(std::move(c));
    }
    for (auto& c : w.senses) c.weight /= weight_sum;
    model.words.push_back(std::move(w));
  }

  // Mean distance between consecutive sense directions in rank order; these
  // are independent uniform directions whether or not they share a word.
  double total = 0.0;
  std::size_t pairs = 0;
  const std::vector<double>* previous = nullptr;
  for (const auto& w : model.words) {
    for (const auto& c : w.senses) {
      if (previous) {
        total += euclidean(*previous, c.direction);
        ++pairs;
      }
      previous = &c.direction;
    }
  }
  model.mean_inter_sense_distance = pairs > 0 ? total / static_cast<double>(pairs) : std::numbers::sqrt2;
  const double spread = cfg.spread_ratio * model.mean_inter_sense_distance;
  for (auto& w : model.words) {
    for (auto& c : w.senses) c.spread = spread;
  }
  return model;
}

void sample_occurrence(const WordModel& word, random::CounterRng& rng, std::span<double> out) {
  const double u = random::uniform01(rng);
  std::size_t chosen = word.senses.size() - 1;
  double cumulative = 0.0;
  for (std::size_t s = 0; s < word.senses.size(); ++s) {
    cumulative += word.senses[s].weight;
    if (u < cumulative) {
      chosen = s;
      break;
    }
  }
  const auto& sense = word.senses[chosen];
  const double coord_sd = sense.spread / std::sqrt(static_cast<double>(out.size()));
  random::fill_normal(rng, out, coord_sd);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += sense.direction[j];
}

OccurrenceSet generate_corpora(const SenseModel& model, const SimulationConfig& cfg) {
  cfg.validate();
  OccurrenceSet corpora(model.dim);
  const std::uint64_t key = random::derive_key(cfg.master_seed, "corpora");
  std::vector<double> buffer(model.dim);
  for (std::size_t i = 0; i < model.words.size(); ++i) {
    const auto& w = model.words[i];
    auto& occ = corpora.ensure_word(w.word);
    for (const Period period : {Period::C1, Period::C2}) {
      random::CounterRng rng(key, 2 * i + static_cast<std::size_t>(period));
      const std::uint64_t count = random::poisson(rng, cfg.rate * static_cast<double>(w.base_frequency));
      auto& block = occ.at(period);
      block.reserve(count);
      for (std::uint64_t k = 0; k < count; ++k) {
        sample_occurrence(w, rng, buffer);
        block.append(buffer);
      }
    }
  }
  return corpora;
}

std::vector<std::string> eligible_words(const SenseModel& model, const SimulationConfig& cfg) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < model.words.size(); ++i) {
    const auto& w = model.words[i];
    if (w.base_frequency >= cfg.freq_min && w.base_frequency <= cfg.freq_max &&
        w.senses.size() <= cfg.sense_cap) {
      idx.push_back(i);
    }
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return model.words[a].base_frequency > model.words[b].base_frequency;
  });
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(model.words[i].word);
  return out;
}

std::vector<ShiftPair> select_shift_pairs(const SenseModel& model, const SimulationConfig& cfg) {
  if (cfg.n_shifts == 0) return {};
  const auto eligible = eligible_words(model, cfg);
  const std::size_t available = eligible.size() / 2;
  if (available < cfg.n_shifts) {
    throw Error(ErrorKind::InsufficientEligibleWords,
                std::to_string(eligible.size()) + " eligible words form " + std::to_string(available) +
                    " pairs, " + std::to_string(cfg.n_shifts) + " shifts requested");
  }
  random::CounterRng rng(random::derive_key(cfg.master_seed, "pairs"), 0);
  std::vector<std::size_t> order(available);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<ShiftPair> pairs;
  pairs.reserve(cfg.n_shifts);
  for (std::size_t i = 0; i < cfg.n_shifts; ++i) {
    const auto j = i + static_cast<std::size_t>(random::uniform_below(rng, available - i));
    std::swap(order[i], order[j]);
    const auto& first = eligible[2 * order[i]];
    const auto& second = eligible[2 * order[i] + 1];
    if (random::uniform_below(rng, 2) == 0) {
      pairs.push_back({first, second});
    } else {
      pairs.push_back({second, first});
    }
  }
  return pairs;
}

SimulationGroundTruth inject_shifts(OccurrenceSet& corpora, std::span<const ShiftPair> pairs,
                                    const SenseModel& model, const SimulationConfig& cfg) {
  SimulationGroundTruth truth;
  truth.pairs.reserve(pairs.size());
  const std::uint64_t key = random::derive_key(cfg.master_seed, "injection");
  std::vector<double> buffer(corpora.dim());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    if (pair.acceptor == pair.donor) {
      throw Error(ErrorKind::InvalidConfig, "acceptor and donor must differ");
    }
    auto* acceptor = corpora.find(pair.acceptor);
    const auto* donor = corpora.find(pair.donor);
    if (!acceptor) throw Error(ErrorKind::UnknownWord, "acceptor '" + pair.acceptor + "' not in corpora");
    if (!donor) throw Error(ErrorKind::UnknownWord, "donor '" + pair.donor + "' not in corpora");
    const auto& donor_model = model.at(pair.donor);

    random::CounterRng rng(key, i);
    const double u = random::uniform01(rng);
    const double p = cfg.proportion_max - u * (cfg.proportion_max - cfg.proportion_min);
    const std::uint64_t injected =
        random::round_half_even(p * static_cast<double>(donor->c2.size()));
    for (std::uint64_t k = 0; k < injected; ++k) {
      sample_occurrence(donor_model, rng, buffer);
      acceptor->c2.append(buffer);
    }
    truth.pairs.push_back({pair.acceptor, pair.donor, p, injected});
  }
  return truth;
}

Simulation run_simulation(const SimulationConfig& cfg) {
  auto model = build_sense_model(cfg);
  auto corpora = generate_corpora(model, cfg);
  const std::size_t eligible = eligible_words(model, cfg).size();
  const auto pairs = select_shift_pairs(model, cfg);
  auto truth = inject_shifts(corpora, pairs, model, cfg);
  return Simulation{std::move(model), std::move(corpora), std::move(truth), eligible};
}

}  // namespace shiftsig::simulate
