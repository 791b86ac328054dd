#include "shiftsig/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "shiftsig/detail/text.hpp"
#include "shiftsig/error.hpp"
#include "shiftsig/evaluate.hpp"
#include "shiftsig/ingest.hpp"
#include "shiftsig/multiplicity.hpp"
#include "shiftsig/pipeline.hpp"

namespace shiftsig::cli {

permtest::PermutationConfig PermutationOptions::config() const {
  permtest::PermutationConfig cfg;
  cfg.alpha = alpha;
  cfg.master_seed = seed;
  cfg.exact_threshold = exact_threshold;
  cfg.stages = permtest::parse_stages(stages);
  cfg.validate();
  return cfg;
}

namespace {

void list_words(std::ostream& err, const std::vector<std::string>& words) {
  constexpr std::size_t kShown = 20;
  for (std::size_t i = 0; i < words.size() && i < kShown; ++i) err << (i ? ", " : " ") << words[i];
  if (words.size() > kShown) err << ", ... (" << words.size() - kShown << " more)";
  err << '\n';
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_test(const TestOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = opts.permutation.config();
    const auto corpora = ingest::read_occurrences(opts.input);

    std::optional<std::vector<std::string>> requested;
    if (opts.words) requested = ingest::read_word_list(*opts.words);
    const auto plan = pipeline::plan_tests(corpora, requested ? &*requested : nullptr);
    if (!plan.skipped.empty()) {
      err << "warning: skipped " << plan.skipped.size() << " word(s) missing from a period:";
      list_words(err, plan.skipped);
    }
    if (plan.words.empty()) {
      err << "error: no word occurs in both periods; nothing to test\n";
      return 2;
    }

    const unsigned threads = pipeline::resolve_threads(opts.threads);
    const auto run = pipeline::run_tests(corpora, plan.words, cfg, threads);
    for (const auto& [word, why] : run.failed) err << "warning: skipped '" << word << "': " << why << '\n';
    if (run.results.empty()) {
      err << "error: every candidate word was degenerate; nothing to test\n";
      return 2;
    }
    ingest::write_results(run.results, opts.output);

    const auto found = multiplicity::discoveries(run.results, cfg.alpha);
    const auto raw_significant = std::count_if(run.results.begin(), run.results.end(),
                                               [&](const ShiftResult& r) { return r.p_raw < cfg.alpha; });
    const auto exact = std::count_if(run.results.begin(), run.results.end(), [](const ShiftResult& r) {
      return r.method == permtest::Method::Exact;
    });
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << "tests (m): " << run.results.size() << '\n'
        << "exact / monte carlo: " << exact << " / " << run.results.size() - static_cast<std::size_t>(exact)
        << '\n'
        << "p_raw < " << detail::format_g(cfg.alpha, 6) << ": " << raw_significant << '\n'
        << "discoveries (p_adjusted < " << detail::format_g(cfg.alpha, 6) << "): " << found.size() << '\n'
        << "threads: " << threads << '\n'
        << "wall time: " << detail::format_g(seconds, 4) << " s\n";
    return 0;
  });
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto sim = simulate::run_simulation(opts.config);
    ingest::write_occurrences(sim.corpora, opts.output);
    ingest::write_ground_truth(sim.truth, opts.truth);
    out << "vocabulary: " << sim.model.words.size() << '\n'
        << "eligible words: " << sim.eligible_count << '\n'
        << "occurrences C1 / C2: " << sim.corpora.count(Period::C1) << " / " << sim.corpora.count(Period::C2)
        << '\n'
        << "shifts: " << sim.truth.pairs.size() << '\n'
        << "injected occurrences: " << sim.truth.total_injected() << '\n';
    return 0;
  });
}

namespace {

std::string format_optional(std::optional<double> v) {
  return v ? detail::format_g(*v, 6) : std::string("undefined");
}

}  // namespace

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!opts.truth && !opts.annotations) {
      err << "error: eval needs --truth and/or --annotations\n";
      return 1;
    }
    const auto results = ingest::read_results(opts.results);
    if (results.empty()) {
      err << "error: results file is empty\n";
      return 2;
    }
    constexpr evaluate::Filter kFilters[] = {evaluate::Filter::Baseline, evaluate::Filter::Permutation,
                                             evaluate::Filter::Fdr};

    if (opts.truth) {
      const auto truth = ingest::read_ground_truth(*opts.truth);
      const auto shifted = truth.shifted_words();
      std::unordered_set<std::string> tested;
      for (const auto& r : results) tested.insert(r.word);
      std::size_t missing = 0;
      for (const auto& w : shifted) missing += tested.contains(w) ? 0 : 1;
      if (missing > 0) {
        err << "warning: " << missing << " shifted word(s) absent from the results\n";
      }
      out << "precision\n";
      out << "filter\tresults\tprecision@10\tprecision@last\n";
      for (const auto filter : kFilters) {
        const auto ranked = evaluate::apply_filter(results, filter, opts.alpha);
        std::vector<std::string> ranking;
        for (const auto& r : ranked) ranking.push_back(r.word);
        std::optional<double> at10;
        std::optional<double> last;
        if (!ranking.empty()) {
          const auto curve = evaluate::precision_at_k(ranking, shifted, opts.k_max);
          if (curve.k_max() >= 10) at10 = curve.at(10);
          last = curve.points.back().second;
          if (opts.curve_prefix) {
            auto path = *opts.curve_prefix;
            path += "." + std::string(evaluate::to_string(filter)) + ".tsv";
            std::ofstream file(path);
            if (!file) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
            evaluate::write_curve(curve, file);
          }
        }
        out << evaluate::to_string(filter) << '\t' << ranking.size() << '\t' << format_optional(at10) << '\t'
            << format_optional(last) << '\n';
      }

      if (opts.occurrences) {
        const auto corpora = ingest::read_occurrences(*opts.occurrences);
        const auto factors = evaluate::detection_factors(
            results, truth, corpora, opts.alpha,
            opts.relative_gain ? evaluate::GainMeasure::Relative : evaluate::GainMeasure::Absolute);
        out << "detection regression (standardized covariates, response p_adjusted < "
            << detail::format_g(opts.alpha, 6) << ", rows " << factors.detected.size() << ")\n";
        try {
          const auto fit = evaluate::logistic_fit(evaluate::standardize(factors.covariates), factors.detected);
          out << "term\tbeta\tse\tp_wald\n";
          for (Eigen::Index i = 0; i < fit.coefficients.size(); ++i) {
            const std::string name =
                i == 0 ? std::string("intercept") : std::string(evaluate::DetectionFactors::kNames[i - 1]);
            out << name << '\t' << detail::format_g(fit.coefficients(i), 6) << '\t'
                << detail::format_g(fit.standard_errors(i), 6) << '\t' << detail::format_g(fit.p_values(i), 6)
                << '\n';
          }
          if (!fit.converged) out << "note: IRLS did not converge in " << fit.iterations << " iterations\n";
        } catch (const Error& e) {
          err << "warning: regression not fitted: " << e.what() << '\n';
        }
      }
    }

    if (opts.annotations) {
      const auto table = ingest::read_annotations(*opts.annotations);
      const auto scores = table.by_word();
      std::vector<ShiftResult> matched;
      for (const auto& r : results) {
        if (scores.contains(r.word)) matched.push_back(r);
      }
      if (matched.size() != results.size() || matched.size() != scores.size()) {
        err << "warning: results and annotations share " << matched.size() << " of " << results.size() << " / "
            << scores.size() << " words; using the intersection\n";
      }
      if (matched.empty()) {
        err << "error: no annotated word appears in the results\n";
        return 2;
      }
      out << "spearman\n";
      out << "filter\twords\trho\n";
      for (const auto filter : kFilters) {
        const auto kept = evaluate::apply_filter(matched, filter, opts.alpha);
        std::optional<double> rho;
        if (kept.size() >= 3) {
          std::vector<double> x;
          std::vector<double> y;
          for (const auto& r : kept) {
            x.push_back(r.distance);
            y.push_back(scores.at(r.word));
          }
          try {
            rho = evaluate::spearman(x, y);
          } catch (const Error&) {
            rho.reset();
          }
        }
        out << evaluate::to_string(filter) << '\t' << kept.size() << '\t' << format_optional(rho) << '\n';
      }
    }
    return 0;
  });
}

int cmd_dump_null(const DumpNullOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = opts.permutation.config();
    const auto corpora = ingest::read_occurrences(opts.input);
    const auto& occ = corpora.at(opts.word);
    if (occ.c1.empty() || occ.c2.empty()) {
      throw Error(ErrorKind::UnknownWord, "word '" + opts.word + "' does not occur in both periods");
    }
    const auto r = permtest::adaptive_pvalue(opts.word, occ.c1, occ.c2, cfg, true);
    std::ofstream file(opts.output);
    if (!file) throw Error(ErrorKind::Io, "cannot write '" + opts.output.string() + "'");
    permtest::write_null_distribution(r.null, file);
    file.flush();
    if (!file) throw Error(ErrorKind::Io, "write to '" + opts.output.string() + "' failed");
    out << "word: " << opts.word << '\n'
        << "n1 / n2: " << r.statistic.n1 << " / " << r.statistic.n2 << '\n'
        << "distance: " << detail::format_g(r.statistic.distance, 6) << '\n'
        << "p_raw: " << detail::format_g(r.p.value, 6) << (r.p.floored ? " (floored at 1/n)" : "") << '\n'
        << "method: " << permtest::to_string(r.p.method) << ", n = " << r.p.n_used << '\n';
    return 0;
  });
}

}  // namespace shiftsig::cli
