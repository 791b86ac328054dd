#include "shiftsig/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "shiftsig/error.hpp"

namespace shiftsig::pipeline {

TestPlan plan_tests(const OccurrenceSet& corpora, const std::vector<std::string>* requested) {
  TestPlan plan;
  auto consider = [&](const std::string& word) {
    const auto* occ = corpora.find(word);
    if (occ && !occ->c1.empty() && !occ->c2.empty()) {
      plan.words.push_back(word);
    } else {
      plan.skipped.push_back(word);
    }
  };
  if (requested) {
    std::vector<std::string> sorted = *requested;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const auto& w : sorted) consider(w);
  } else {
    for (const auto& [word, _] : corpora.words()) consider(word);
  }
  return plan;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SHIFTSIG_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

TestRun run_tests(const OccurrenceSet& corpora, std::span<const std::string> words,
                  const permtest::PermutationConfig& cfg, unsigned threads) {
  cfg.validate();
  const std::size_t n = words.size();
  std::vector<std::optional<ShiftResult>> slots(n);
  std::vector<std::string> failure(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const auto& occ = corpora.at(words[i]);
        const auto r = permtest::adaptive_pvalue(words[i], occ.c1, occ.c2, cfg);
        slots[i] = ShiftResult{words[i], r.statistic.n1, r.statistic.n2, r.statistic.distance,
                               r.p.value, r.p.value, r.p.method, r.p.n_used};
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::DegenerateVector || e.kind() == ErrorKind::EmptyInput) {
          failure[i] = e.what();
          continue;
        }
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next.store(n);
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next.store(n);
      }
    }
  };

  const unsigned pool = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(pool);
    for (unsigned t = 0; t < pool; ++t) workers.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  TestRun run;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      run.results.push_back(std::move(*slots[i]));
    } else {
      run.failed.emplace_back(words[i], failure[i]);
    }
  }
  if (!run.results.empty()) multiplicity::bh_adjust(run.results);
  return run;
}

}  // namespace shiftsig::pipeline
