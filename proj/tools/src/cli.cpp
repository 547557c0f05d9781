#include "dualgraph_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dualgraph/analysis.hpp"
#include "dualgraph/bleu.hpp"
#include "dualgraph/corpus.hpp"
#include "dualgraph/errors.hpp"
#include "dualgraph/gradient_suite.hpp"
#include "dualgraph/graph_stats.hpp"
#include "dualgraph/training.hpp"
#include "dualgraph/vocab.hpp"

namespace dualgraph::cli {

namespace {

namespace fs = std::filesystem;

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw DataError(std::string(what) + " not found: " + path);
}

int cmd_stats(const std::string& corpus_path, std::ostream& out) {
  require_file(corpus_path, "corpus");
  write_report_tsv(corpus_stats(read_amr_corpus(corpus_path)), out);
  return kExitOk;
}

nlohmann::json edges_json(const GraphView& view) {
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t target = 0; target < view.in_neighbors.size(); ++target) {
    for (int source : view.in_neighbors[target]) edges.push_back({source, static_cast<int>(target)});
  }
  return edges;
}

int cmd_preprocess(const std::string& corpus_path, const std::string& out_dir, std::size_t vocab_size,
                   std::ostream& out) {
  require_file(corpus_path, "corpus");
  const auto corpus = read_amr_corpus(corpus_path);
  if (corpus.empty()) throw DataError("corpus has no instances: " + corpus_path);
  fs::create_directories(out_dir);
  const VocabPair vocab = build_vocab(corpus, vocab_size);
  vocab.source.save(fs::path(out_dir) / "src_vocab.txt");
  vocab.target.save(fs::path(out_dir) / "tgt_vocab.txt");
  std::ofstream views(fs::path(out_dir) / "views.jsonl");
  for (const auto& inst : corpus) {
    const GraphView td = levi_transform(inst.graph);
    const GraphView bu = reverse_view(td);
    nlohmann::json row;
    row["id"] = inst.id;
    row["tokens"] = inst.tokens();
    row["labels"] = td.node_labels;
    row["concept_count"] = td.concept_count;
    row["root"] = td.root;
    row["top_down"] = edges_json(td);
    row["bottom_up"] = edges_json(bu);
    row["dfs_order"] = dfs_order(td);
    views << row.dump() << '\n';
  }
  out << "preprocessed " << corpus.size() << " instances into " << out_dir << " (source vocab "
      << vocab.source.size() << ", target vocab " << vocab.target.size() << ")\n";
  return kExitOk;
}

std::vector<AmrInstance> load_corpus_for(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("config has no '") + what + "' corpus");
  require_file(path, what);
  return read_amr_corpus(path);
}

int cmd_train(const std::string& config_path, std::ostream& out, std::ostream& err) {
  require_file(config_path, "config");
  const TrainConfig config = load_train_config(config_path);
  if (config.output_dir.empty()) throw UsageError("config has no 'output_dir'");
  Trainer trainer(config, load_corpus_for(config.train_path, "train"), load_corpus_for(config.dev_path, "dev"));
  err << "parameters: " << count_parameters(trainer.model().params) << '\n';
  const TrainResult result = trainer.run([&](const EpochRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "epoch %d  loss %.4f  dev BLEU %.2f  best %.2f  (%.1fs)\n", r.epoch,
                  r.train_loss, r.dev_bleu, r.best_so_far, r.seconds);
    err << buf << std::flush;
  });
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", result.best_bleu);
  out << "best dev BLEU " << buf << " at epoch " << result.best_epoch << (result.stopped_early ? " (early stop)" : "")
      << "\ncheckpoint " << result.checkpoint.string() << '\n';
  return kExitOk;
}

int cmd_generate(const std::string& ckpt, const std::string& input, int beam, int max_len,
                 const std::string& out_path, std::ostream& out) {
  require_file(ckpt, "checkpoint");
  require_file(input, "input corpus");
  if (beam < 1) throw UsageError("--beam must be at least 1");
  if (max_len < 1) throw UsageError("--max-len must be at least 1");
  Model model = load_model_dir(ckpt);
  const auto corpus = read_amr_corpus(input);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw DataError("cannot write " + out_path);
  }
  std::ostream& sink = out_path.empty() ? out : file;
  for (const auto& inst : corpus) sink << model.generate(inst.graph, beam, max_len) << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string refs;
  std::string hyps;
  std::string amr;
  std::string buckets;
  std::string baseline;
  bool adequacy = false;
  bool cased = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  require_file(a.hyps, "hypotheses");
  const auto hyps = read_lines(a.hyps);
  std::vector<AmrInstance> corpus;
  if (!a.amr.empty()) {
    require_file(a.amr, "AMR corpus");
    corpus = read_amr_corpus(a.amr);
  }
  std::vector<std::string> refs;
  if (!a.refs.empty()) {
    require_file(a.refs, "references");
    refs = read_lines(a.refs);
  } else if (!corpus.empty()) {
    for (const auto& inst : corpus) refs.push_back(inst.sentence);
  } else {
    throw UsageError("eval needs --refs or --amr");
  }
  if (refs.size() != hyps.size()) {
    throw UsageError("eval: " + std::to_string(hyps.size()) + " hypotheses but " + std::to_string(refs.size()) +
                     " references");
  }
  out << corpus_bleu(refs, hyps, a.cased).summary() << '\n';

  if (!a.buckets.empty() || a.adequacy) {
    if (corpus.empty()) throw UsageError("--buckets and --adequacy need --amr");
    if (corpus.size() != hyps.size()) {
      throw UsageError("eval: " + std::to_string(hyps.size()) + " hypotheses but " + std::to_string(corpus.size()) +
                       " AMR instances");
    }
  }
  if (!a.buckets.empty()) {
    std::vector<std::string> baseline;
    if (!a.baseline.empty()) {
      require_file(a.baseline, "baseline");
      baseline = read_lines(a.baseline);
    }
    const BucketTable table = bucket_eval(corpus, hyps, BucketSpec::defaults_for(parse_bucket_key(a.buckets)),
                                          a.baseline.empty() ? nullptr : &baseline, a.cased);
    for (const auto& w : table.warnings) err << "warning: " << w << '\n';
    out << "# per-bucket corpus BLEU (substitutes for METEOR)\n";
    write_bucket_tsv(table, out);
  }
  if (a.adequacy) {
    const CorpusAdequacy adequacy = corpus_adequacy(corpus, hyps);
    char buf[128];
    out << "# adequacy: suffix-strip stemmer stands in for lemmatization\n";
    std::snprintf(buf, sizeof buf, "ADDED\t%.4f\nMISS\t%.4f\nempty_outputs\t%zu\n", adequacy.added,
                  adequacy.missing, adequacy.empty_outputs);
    out << buf;
  }
  return kExitOk;
}

int cmd_ablate(const std::string& config_path, bool count_only, std::ostream& out, std::ostream& err) {
  require_file(config_path, "config");
  const TrainConfig base = load_train_config(config_path);
  const auto train = load_corpus_for(base.train_path, "train");
  const VocabPair vocab = build_vocab(train, base.vocab_size);
  std::vector<AmrInstance> dev;
  if (!count_only) dev = load_corpus_for(base.dev_path, "dev");

  out << "mode\tparameters\tdev_bleu\n";
  for (AblationMode mode : kAblationOrder) {
    TrainConfig config = base;
    config.model.ablation = mode;
    const std::size_t params = model_parameter_count(config.model, vocab.source.size(), vocab.target.size());
    std::string bleu = "-";
    if (!count_only) {
      if (!base.output_dir.empty()) config.output_dir = (fs::path(base.output_dir) / to_string(mode)).string();
      err << "training " << to_string(mode) << '\n';
      Trainer trainer(config, train, dev, vocab);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", trainer.run().best_bleu);
      bleu = buf;
    }
    out << to_string(mode) << '\t' << params << '\t' << bleu << '\n' << std::flush;
  }
  return kExitOk;
}

int cmd_gradcheck(int seeds, double eps, double tolerance, const std::string& only, std::ostream& out) {
  if (seeds < 1) throw UsageError("--seeds must be at least 1");
  if (!(eps > 0)) throw UsageError("--eps must be positive");
  std::vector<GradientTarget> targets;
  if (only.empty()) targets.assign(std::begin(kGradientTargets), std::end(kGradientTargets));
  else targets.push_back(parse_gradient_target(only));
  bool ok = true;
  out << "target\tseeds\tmax_rel_error\tworst_parameter\texcluded\tstatus\n";
  for (GradientTarget target : targets) {
    double worst = 0;
    std::string worst_param;
    std::size_t excluded = 0, total = 0;
    for (int s = 0; s < seeds; ++s) {
      const auto r = run_gradient_check(target, static_cast<std::uint64_t>(s), eps);
      excluded += r.excluded;
      total += r.parameters;
      if (r.max_relative_error >= worst) {
        worst = r.max_relative_error;
        worst_param = r.worst_parameter;
      }
    }
    const bool pass = worst < tolerance;
    ok = ok && pass;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s\t%d\t%.3e\t%s\t%zu/%zu\t%s\n", to_string(target).c_str(), seeds, worst,
                  worst_param.c_str(), excluded, total, pass ? "ok" : "FAIL");
    out << buf;
  }
  return ok ? kExitOk : kExitData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-to-text generation from AMR with dual graph encoders", "dualgraph"};
  app.require_subcommand(1);

  std::string stats_corpus;
  auto* stats = app.add_subcommand("stats", "Corpus statistics as TSV");
  stats->add_option("corpus", stats_corpus, "AMR corpus file")->required();

  std::string pre_corpus, pre_out;
  std::size_t pre_vocab = kDefaultVocabSize;
  auto* pre = app.add_subcommand("preprocess", "Write graph views and vocabularies");
  pre->add_option("corpus", pre_corpus, "AMR corpus file")->required();
  pre->add_option("--out", pre_out, "Output directory")->required();
  pre->add_option("--vocab-size", pre_vocab, "Vocabulary size, specials excluded");

  std::string train_config;
  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--config", train_config, "key = value config file")->required();

  std::string gen_ckpt, gen_input, gen_out;
  int gen_beam = 5, gen_max_len = kDefaultMaxDecodeLength;
  auto* gen = app.add_subcommand("generate", "Generate sentences for an AMR corpus");
  gen->add_option("--ckpt", gen_ckpt, "model.ckpt written by train")->required();
  gen->add_option("--input", gen_input, "AMR corpus file")->required();
  gen->add_option("--beam", gen_beam, "Beam size; 1 is greedy");
  gen->add_option("--max-len", gen_max_len, "Maximum output length");
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "BLEU, bucketed BLEU and adequacy");
  eval->add_option("--hyps", eval_args.hyps, "Hypotheses, one per line")->required();
  eval->add_option("--refs", eval_args.refs, "References, one per line");
  eval->add_option("--amr", eval_args.amr, "AMR corpus aligned with the hypotheses");
  eval->add_option("--buckets", eval_args.buckets, "graph_diameter, sentence_length or max_out_degree");
  eval->add_option("--baseline", eval_args.baseline, "Baseline hypotheses for bucket deltas");
  eval->add_flag("--adequacy", eval_args.adequacy, "Report ADDED and MISS");
  eval->add_flag("--cased", eval_args.cased, "Case-sensitive BLEU");

  std::string ablate_config;
  bool ablate_count_only = false;
  auto* ablate = app.add_subcommand("ablate", "Train the four encoder ablations and compare");
  ablate->add_option("--config", ablate_config, "key = value config file")->required();
  ablate->add_flag("--count-only", ablate_count_only, "Only count parameters");

  int gc_seeds = 20;
  double gc_eps = 1e-3, gc_tolerance = 1e-3;
  std::string gc_target;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gc->add_option("--seeds", gc_seeds, "Random instances per component");
  gc->add_option("--eps", gc_eps, "Central-difference step");
  gc->add_option("--tolerance", gc_tolerance, "Largest accepted relative error");
  gc->add_option("--target", gc_target, "Check only this component");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*stats) return cmd_stats(stats_corpus, out);
    if (*pre) return cmd_preprocess(pre_corpus, pre_out, pre_vocab, out);
    if (*train) return cmd_train(train_config, out, err);
    if (*gen) return cmd_generate(gen_ckpt, gen_input, gen_beam, gen_max_len, gen_out, out);
    if (*eval) return cmd_eval(eval_args, out, err);
    if (*ablate) return cmd_ablate(ablate_config, ablate_count_only, out, err);
    if (*gc) return cmd_gradcheck(gc_seeds, gc_eps, gc_tolerance, gc_target, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TrainingDiverged& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace dualgraph::cli
