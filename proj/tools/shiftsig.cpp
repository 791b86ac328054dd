// shiftsig: significance testing of lexical semantic shifts.
//
//   shiftsig simulate  --output corpus.jsonl --truth truth.tsv [--n-shifts N ...]
//   shiftsig test      --input corpus.jsonl --output results.tsv [--seed S ...]
//   shiftsig eval      --results results.tsv (--truth truth.tsv | --annotations scores.tsv)
//   shiftsig dump-null --input corpus.jsonl --word W --output null.tsv

#include <iostream>

#include "CLI11.hpp"
#include "shiftsig/cli.hpp"

namespace {

void add_permutation_flags(CLI::App& cmd, shiftsig::cli::PermutationOptions& p) {
  cmd.add_option("--alpha", p.alpha, "Significance level")->capture_default_str();
  cmd.add_option("--seed", p.seed, "Master seed of the per-word permutation streams")->capture_default_str();
  cmd.add_option("--exact-threshold", p.exact_threshold,
                 "Enumerate all label assignments when there are at most this many")
      ->capture_default_str();
  cmd.add_option("--stages", p.stages, "Monte-Carlo stages as n1:t1,n2:t2,n3")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistically significant semantic shift detection"};
  app.require_subcommand(1);

  shiftsig::cli::TestOptions test;
  auto* test_cmd = app.add_subcommand("test", "Distance, permutation p-value and FDR for every word");
  test_cmd->add_option("--input", test.input, "Occurrence file (JSONL or binary)")->required();
  test_cmd->add_option("--output", test.output, "Results TSV")->required();
  test_cmd->add_option("--words", test.words, "Restrict tests to the words listed in this file");
  test_cmd->add_option("--threads", test.threads, "Worker threads (0: $SHIFTSIG_THREADS or all cores)")
      ->capture_default_str();
  add_permutation_flags(*test_cmd, test.permutation);

  shiftsig::cli::SimulateOptions sim;
  auto& sc = sim.config;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate corpora with injected semantic shifts");
  sim_cmd->add_option("--output", sim.output, "Occurrence file (.bin for binary, JSONL otherwise)")->required();
  sim_cmd->add_option("--truth", sim.truth, "Ground-truth TSV")->required();
  sim_cmd->add_option("--seed", sc.master_seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--vocab-size", sc.vocab_size)->capture_default_str();
  sim_cmd->add_option("--dim", sc.dim)->capture_default_str();
  sim_cmd->add_option("--n-shifts", sc.n_shifts)->capture_default_str();
  sim_cmd->add_option("--freq-min", sc.freq_min, "Lower edge of the eligibility band")->capture_default_str();
  sim_cmd->add_option("--freq-max", sc.freq_max, "Upper edge of the eligibility band")->capture_default_str();
  sim_cmd->add_option("--zipf-s", sc.zipf_s, "Zipf exponent")->capture_default_str();
  sim_cmd->add_option("--rate", sc.rate, "Resampling rate per period")->capture_default_str();
  sim_cmd->add_option("--max-senses", sc.max_senses)->capture_default_str();
  sim_cmd->add_option("--sense-cap", sc.sense_cap, "Max senses of a word eligible for shifts")
      ->capture_default_str();
  sim_cmd->add_option("--spread-ratio", sc.spread_ratio, "Sense spread / mean inter-sense distance")
      ->capture_default_str();
  sim_cmd->add_option("--proportion-min", sc.proportion_min)->capture_default_str();
  sim_cmd->add_option("--proportion-max", sc.proportion_max)->capture_default_str();

  shiftsig::cli::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Precision@K and Spearman for baseline / permutation / FDR");
  eval_cmd->add_option("--results", eval.results, "Results TSV from `test`")->required();
  eval_cmd->add_option("--truth", eval.truth, "Simulation ground-truth TSV");
  eval_cmd->add_option("--annotations", eval.annotations, "word<TAB>score annotations");
  eval_cmd->add_option("--occurrences", eval.occurrences,
                       "Simulated occurrence file; adds the detection-factor regression");
  eval_cmd->add_option("--curves", eval.curve_prefix, "Write <prefix>.<filter>.tsv precision curves");
  eval_cmd->add_option("--alpha", eval.alpha)->capture_default_str();
  eval_cmd->add_option("--k-max", eval.k_max)->capture_default_str();
  eval_cmd->add_flag("--relative-gain", eval.relative_gain,
                     "Regress on relative rather than absolute frequency gain");

  shiftsig::cli::DumpNullOptions dump;
  auto* dump_cmd = app.add_subcommand("dump-null", "Write the permutation null distribution of one word");
  dump_cmd->add_option("--input", dump.input, "Occurrence file")->required();
  dump_cmd->add_option("--word", dump.word)->required();
  dump_cmd->add_option("--output", dump.output, "Null distribution TSV")->required();
  add_permutation_flags(*dump_cmd, dump.permutation);

  CLI11_PARSE(app, argc, argv);

  if (*test_cmd) return shiftsig::cli::cmd_test(test, std::cout, std::cerr);
  if (*sim_cmd) return shiftsig::cli::cmd_simulate(sim, std::cout, std::cerr);
  if (*eval_cmd) return shiftsig::cli::cmd_eval(eval, std::cout, std::cerr);
  if (*dump_cmd) return shiftsig::cli::cmd_dump_null(dump, std::cout, std::cerr);
  return 1;
}
