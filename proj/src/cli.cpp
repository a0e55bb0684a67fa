#include "sensboot/cli.hpp"

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sensboot/blacklist.hpp"
#include "sensboot/classifier.hpp"
#include "sensboot/config.hpp"
#include "sensboot/corpus.hpp"
#include "sensboot/error.hpp"
#include "sensboot/eval.hpp"
#include "sensboot/ranking.hpp"
#include "sensboot/selection.hpp"
#include "sensboot/trainer.hpp"

namespace sensboot {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::vector<std::string> sets;
  bool quiet = false;
};

std::map<std::string, std::string> parse_sets(const std::vector<std::string>& sets) {
  std::map<std::string, std::string> out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || s.find('.') > eq) {
      throw ConfigError("--set expects section.key=value, got '" + s + "'");
    }
    out[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return out;
}

PipelineConfig resolve_config(const CommonOptions& opt) {
  auto overrides = parse_sets(opt.sets);
  if (opt.seed) overrides["global.seed"] = std::to_string(*opt.seed);
  if (opt.out_dir) overrides["global.out_dir"] = *opt.out_dir;
  if (opt.threads) overrides["global.threads"] = std::to_string(*opt.threads);
  PipelineConfig cfg = opt.config_path.empty() ? config_from_entries(overrides, "")
                                               : load_config(opt.config_path, overrides);
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  return cfg;
}

std::string out_file(const PipelineConfig& cfg, const std::string& name) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
  return (fs::path(cfg.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << text;
  if (!f) throw DataError("write failed: " + path);
}

// Accepts the configured gold classes and the binary label names.
LabelMapping label_mapping_with_binary(const LabelMapping& base) {
  auto sens = std::set<std::string>(base.sensitive_classes().begin(),
                                    base.sensitive_classes().end());
  auto non = std::set<std::string>(base.nonsensitive_classes().begin(),
                                   base.nonsensitive_classes().end());
  if (non.count("sensitive") || sens.count("nonsensitive")) return base;
  sens.insert("sensitive");
  non.insert("nonsensitive");
  return LabelMapping(std::move(sens), std::move(non));
}

std::vector<Utterance> read_data(const std::string& path, CorpusFormat format,
                                 const std::string& what) {
  require_file(path, what);
  return read_corpus(path, format).utterances;
}

struct Ranked {
  Corpus corpus;
  std::vector<TokenSeq> tokens;
  Blacklist blacklist;
  std::vector<ForumScore> scores;
  ForumPartition partition;
};

Ranked rank_corpus(const PipelineConfig& cfg) {
  require_file(cfg.corpus_path, "corpus.path");
  require_file(cfg.blacklist_path, "blacklist.path");
  Blacklist bl = load_blacklist(cfg.blacklist_path);
  Corpus corpus = read_corpus(cfg.corpus_path, cfg.corpus_format);
  auto tokens = tokenize_all(corpus.utterances);
  auto scores = score_forums(corpus.utterances, tokens, bl);
  auto partition = partition_forums(scores, cfg.rank_low, cfg.rank_high);
  return Ranked{std::move(corpus), std::move(tokens), std::move(bl), std::move(scores),
                std::move(partition)};
}

std::string format_counts(const WeakLabeledSet& set) {
  std::ostringstream os;
  os << "examples " << set.examples.size() << "\n";
  for (const auto& [k, v] : set.label_counts()) os << "label " << k << " " << v << "\n";
  for (const auto& [k, v] : set.provenance_counts()) {
    os << "provenance " << k << " " << v << "\n";
  }
  return os.str();
}

std::string format_read_stats(const std::string& path, const ReadStats& st) {
  std::ostringstream os;
  os << path << ": " << st.records << " records, " << st.skipped << " skipped\n";
  for (const auto& [reason, n] : st.skip_reasons) os << "  skipped " << reason << ": " << n << "\n";
  return os.str();
}

int cmd_rank(const CommonOptions& opt, std::ostream& out) {
  const auto cfg = resolve_config(opt);
  const auto r = rank_corpus(cfg);
  write_forum_report(out_file(cfg, "forum_scores.tsv"), r.scores);
  const auto summary = format_partition_summary(r.partition);
  write_text(out_file(cfg, "partition.txt"), summary);
  if (!opt.quiet) {
    out << format_read_stats(cfg.corpus_path, r.corpus.stats);
    out << "forums " << r.scores.size() << "\n" << summary;
  }
  return 0;
}

int cmd_sample(const CommonOptions& opt, int stage, const std::string& checkpoint_flag,
               std::ostream& out) {
  auto cfg = resolve_config(opt);
  if (stage != 1 && stage != 2) throw ConfigError("--stage must be 1 or 2");
  std::optional<Classifier> model;
  if (stage == 2) {
    const std::string ckpt = checkpoint_flag.empty() ? cfg.stage2_checkpoint : checkpoint_flag;
    if (ckpt.empty()) {
      throw ConfigError("stage 2 requires a checkpoint (--checkpoint or stage2.checkpoint)");
    }
    require_file(ckpt, "checkpoint");
    model.emplace(load_checkpoint(ckpt));
  }
  const auto r = rank_corpus(cfg);
  WeakLabeledSet set;
  if (stage == 1) {
    set = sample_stage1(r.corpus.utterances, r.tokens, r.partition, cfg.stage1_n_per_class,
                        cfg.stage1_seed());
  } else {
    const auto s2 = cfg.stage2();
    set = sample_stage2(r.corpus.utterances, r.partition, *model, r.blacklist, s2);
    const auto violations = validate_stage2(set, *model, r.blacklist, s2, &r.partition);
    if (!violations.empty()) {
      std::string msg = "stage 2 validation failed with " +
                        std::to_string(violations.size()) + " violation(s): " + violations[0];
      throw DataError(msg);
    }
  }
  const auto path = out_file(cfg, "stage" + std::to_string(stage) + ".jsonl");
  write_weak_set(path, set);
  write_weak_set_stats(stats_path_for(path), set);
  if (!opt.quiet) {
    out << format_counts(set);
    if (stage == 2) out << "validation ok\n";
  }
  return 0;
}

int cmd_train(const CommonOptions& opt, const std::string& data_path,
              const std::string& dev_path, const std::string& name, const std::string& format,
              const std::string& embeddings_flag, std::ostream& out) {
  const auto cfg = resolve_config(opt);
  const auto fmt = parse_corpus_format(format);
  auto data = read_data(data_path, fmt, "training data");
  if (data.empty()) throw DataError("empty training set: " + data_path);
  std::vector<Utterance> train_data;
  std::vector<Utterance> dev_data;
  if (!dev_path.empty()) {
    train_data = std::move(data);
    dev_data = read_data(dev_path, fmt, "dev data");
  } else {
    auto split = split_dataset(data, cfg.split_spec());
    train_data = std::move(split.train);
    dev_data = std::move(split.dev);
    if (!split.test.empty()) {
      write_corpus(out_file(cfg, name + ".test.jsonl"), CorpusFormat::kJsonl, split.test);
    }
  }
  std::optional<std::string> embeddings = cfg.embeddings_path;
  if (!embeddings_flag.empty()) embeddings = embeddings_flag;
  if (embeddings) require_file(*embeddings, "embeddings.path");

  const auto mapping = label_mapping_with_binary(cfg.labels);
  auto fit = fit_classifier(train_data, dev_data, mapping, cfg.train_config(), embeddings,
                            [&](const EpochLog& e) {
                              if (opt.quiet) return;
                              out << "epoch " << e.epoch << " loss " << e.train_loss;
                              if (e.dev_accuracy) out << " dev_accuracy " << *e.dev_accuracy;
                              out << "\n";
                            });
  const auto ckpt = out_file(cfg, name + ".ckpt");
  save_checkpoint(ckpt, fit.model);
  write_text(out_file(cfg, name + ".log.tsv"), format_train_log(fit.training.log));
  if (!opt.quiet) {
    const auto& best = fit.training.log.at(fit.training.best_epoch - 1);
    out << "vocabulary " << fit.model.vocab().size() << " (" << fit.pretrained_rows
        << " pretrained rows)\n";
    if (fit.training.dev_fallback) {
      out << "no dev data; kept final epoch " << best.epoch << "\n";
    } else {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", *best.dev_accuracy);
      out << "best dev accuracy " << buf << " at epoch " << best.epoch << "\n";
    }
    out << "checkpoint " << ckpt << "\n";
  }
  return 0;
}

int cmd_eval(const CommonOptions& opt, const std::string& checkpoint,
             const std::string& test_path, const std::string& baseline,
             const std::string& name, const std::string& format, std::ostream& out) {
  const auto cfg = resolve_config(opt);
  if (checkpoint.empty() == baseline.empty()) {
    throw ConfigError("eval needs exactly one of --checkpoint or --baseline blacklist");
  }
  if (!baseline.empty() && baseline != "blacklist") {
    throw ConfigError("unknown baseline '" + baseline + "'");
  }
  const auto data = read_data(test_path, parse_corpus_format(format), "test set");
  if (data.empty()) throw DataError("empty test set: " + test_path);
  const auto mapping = label_mapping_with_binary(cfg.labels);
  std::vector<std::string> golds;
  golds.reserve(data.size());
  for (const auto& u : data) {
    if (!u.gold_label) throw DataError("test record '" + u.id + "' has no label");
    mapping.collapse(*u.gold_label);
    golds.push_back(*u.gold_label);
  }
  const auto tokens = tokenize_all(data);
  std::vector<BinaryLabel> preds(data.size());
  std::string description;
  if (!baseline.empty()) {
    require_file(cfg.blacklist_path, "blacklist.path");
    const auto bl = load_blacklist(cfg.blacklist_path);
    for (std::size_t i = 0; i < data.size(); ++i) {
      preds[i] = contains_match(tokens[i], bl) ? BinaryLabel::kSensitive
                                               : BinaryLabel::kNonsensitive;
    }
    description = "blacklist baseline (" + cfg.blacklist_path + ") on " + test_path;
  } else {
    require_file(checkpoint, "checkpoint");
    const auto model = load_checkpoint(checkpoint);
    const auto scores = model.score_batch(tokens);
    for (std::size_t i = 0; i < data.size(); ++i) {
      preds[i] = predicted_label(scores[i].p_sensitive);
    }
    description = "classifier " + checkpoint + " on " + test_path;
  }
  const auto report = build_report(preds, golds, mapping, description);
  const auto text = format_report_text(report);
  write_text(out_file(cfg, name + ".metrics.txt"), text);
  write_text(out_file(cfg, name + ".metrics.jsonl"), format_report_jsonl(report));
  if (!opt.quiet) out << text;
  return 0;
}

void print_score(std::ostream& out, const ScoreResult& s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", s.p_sensitive);
  out << buf;
  if (s.empty) out << " EMPTY";
  out << "\n";
}

int cmd_score(const CommonOptions& opt, const std::string& checkpoint,
              const std::optional<std::string>& text, const std::string& input,
              std::istream& in, std::ostream& out) {
  resolve_config(opt);
  if (checkpoint.empty()) throw ConfigError("score requires --checkpoint");
  require_file(checkpoint, "checkpoint");
  const auto model = load_checkpoint(checkpoint);
  if (text) {
    print_score(out, model.score(*text));
    return 0;
  }
  std::ifstream file;
  std::istream* src = &in;
  if (!input.empty() && input != "-") {
    require_file(input, "input file");
    file.open(input, std::ios::binary);
    src = &file;
  }
  // Lines are scored in blocks so long inputs stream.
  constexpr std::size_t kBlock = 4096;
  std::vector<TokenSeq> block;
  std::string line;
  auto flush = [&] {
    for (const auto& s : model.score_batch(block)) print_score(out, s);
    block.clear();
  };
  while (std::getline(*src, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    block.push_back(tokenize(line));
    if (block.size() == kBlock) flush();
  }
  flush();
  return 0;
}

int cmd_split(const CommonOptions& opt, const std::string& input, const std::string& format,
              std::ostream& out) {
  const auto cfg = resolve_config(opt);
  const auto fmt = parse_corpus_format(format);
  const auto data = read_data(input, fmt, "input file");
  const auto split = split_dataset(data, cfg.split_spec());
  write_corpus(out_file(cfg, "train.jsonl"), CorpusFormat::kJsonl, split.train);
  write_corpus(out_file(cfg, "dev.jsonl"), CorpusFormat::kJsonl, split.dev);
  write_corpus(out_file(cfg, "test.jsonl"), CorpusFormat::kJsonl, split.test);
  if (!opt.quiet) {
    out << "train " << split.train.size() << "\ndev " << split.dev.size() << "\ntest "
        << split.test.size() << "\n";
  }
  return 0;
}

void add_common(CLI::App* app, CommonOptions& opt) {
  app->add_option("--config", opt.config_path, "pipeline configuration file");
  app->add_option("--seed", opt.seed, "global seed (overrides global.seed)");
  app->add_option("--out", opt.out_dir, "output directory (overrides global.out_dir)");
  app->add_option("--threads", opt.threads, "worker threads (0: default)");
  app->add_option("--set", opt.sets, "override a config key: section.key=value");
  app->add_flag("--quiet,-q", opt.quiet, "suppress progress output");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"sensboot: weakly supervised sensitive-content classification"};
  app.require_subcommand(1);
  CommonOptions opt;

  auto* rank = app.add_subcommand("rank", "score and partition forums by blacklist density");
  add_common(rank, opt);

  int stage = 0;
  std::string checkpoint;
  auto* sample = app.add_subcommand("sample", "draw a weakly labeled dataset");
  add_common(sample, opt);
  sample->add_option("--stage", stage, "1 (forum pools) or 2 (classifier + blacklist)")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  sample->add_option("--checkpoint", checkpoint, "stage-2 classifier checkpoint");

  std::string data_path, dev_path, name = "model", format = "jsonl", embeddings;
  auto* train_cmd = app.add_subcommand("train", "train the BiLSTM classifier");
  add_common(train_cmd, opt);
  train_cmd->add_option("--data", data_path, "labeled training data")->required();
  train_cmd->add_option("--dev", dev_path, "dev data (default: split from --data)");
  train_cmd->add_option("--name", name, "output file stem");
  train_cmd->add_option("--format", format, "jsonl or tsv");
  train_cmd->add_option("--embeddings", embeddings, "pretrained embeddings text file");

  std::string test_path, baseline;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a classifier or baseline");
  add_common(eval_cmd, opt);
  eval_cmd->add_option("--checkpoint", checkpoint, "classifier checkpoint");
  eval_cmd->add_option("--test", test_path, "gold-labeled test set")->required();
  eval_cmd->add_option("--baseline", baseline, "'blacklist' to evaluate the blacklist");
  eval_cmd->add_option("--name", name, "report file stem");
  eval_cmd->add_option("--format", format, "jsonl or tsv");

  std::optional<std::string> text;
  std::string input;
  auto* score = app.add_subcommand("score", "print p(sensitive) per input line");
  add_common(score, opt);
  score->add_option("--checkpoint", checkpoint, "classifier checkpoint")->required();
  score->add_option("--text", text, "a single text to score");
  score->add_option("--input", input, "file with one text per line ('-' for stdin)");

  auto* split = app.add_subcommand("split", "split a dataset into train/dev/test");
  add_common(split, opt);
  split->add_option("--input", input, "dataset to split")->required();
  split->add_option("--format", format, "jsonl or tsv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfig);
  }

  try {
    if (rank->parsed()) return cmd_rank(opt, out);
    if (sample->parsed()) return cmd_sample(opt, stage, checkpoint, out);
    if (train_cmd->parsed()) {
      return cmd_train(opt, data_path, dev_path, name, format, embeddings, out);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(opt, checkpoint, test_path, baseline, name, format, out);
    }
    if (score->parsed()) return cmd_score(opt, checkpoint, text, input, std::cin, out);
    if (split->parsed()) return cmd_split(opt, input, format, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kData);
  }
  return static_cast<int>(ExitCode::kConfig);
}

}  // namespace sensboot
