#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sensboot/corpus.hpp"
#include "sensboot/ranking.hpp"
#include "sensboot/selection.hpp"
#include "sensboot/trainer.hpp"

namespace sensboot {

/// Every tunable of the pipeline. Loaded from a sectioned key-value file:
///
///   [global]     seed, out_dir, threads
///   [corpus]     path, format
///   [blacklist]  path
///   [ranking]    low, high
///   [stage1]     n_per_class
///   [stage2]     p_high, p_low, sensitive_quota, model_fraction,
///                nonsensitive_quota, checkpoint
///   [split]      train, dev, test
///   [train]      learning_rate, weight_decay, dropout, batch_size, epochs,
///                max_seq_len, hidden, dim, min_count, max_vocab
///   [embeddings] path
///   [labels]     sensitive, nonsensitive   (comma-separated class names)
///
/// Relative paths are resolved against the directory of the config file.
/// Unknown keys are rejected.
struct PipelineConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int threads = 0;  // 0: OpenMP default

  std::string corpus_path;
  CorpusFormat corpus_format = CorpusFormat::kJsonl;
  std::string blacklist_path;

  double rank_low = kDefaultLowThreshold;
  double rank_high = kDefaultHighThreshold;

  std::size_t stage1_n_per_class = 1000;

  double stage2_p_high = 0.8;
  double stage2_p_low = 0.3;
  std::size_t stage2_sensitive_quota = 1000;
  double stage2_model_fraction = 0.7;
  std::size_t stage2_nonsensitive_quota = 1000;
  std::string stage2_checkpoint;

  SplitSpec split;
  TrainConfig train;
  std::optional<std::string> embeddings_path;
  LabelMapping labels = LabelMapping::identity();

  // Seeds for each stage, expanded from `seed` by fixed labels.
  std::uint64_t stage1_seed() const;
  std::uint64_t split_seed() const;
  Stage2Config stage2() const;
  TrainConfig train_config() const;
  SplitSpec split_spec() const;

  /// Range checks; throws ConfigError.
  void validate() const;
};

/// `overrides` maps "section.key" to a value and wins over the file.
PipelineConfig load_config(const std::string& path,
                           const std::map<std::string, std::string>& overrides = {});
PipelineConfig config_from_entries(const std::map<std::string, std::string>& entries,
                                   const std::string& base_dir);

/// Throws ConfigError naming `what` when the file does not exist.
void require_file(const std::string& path, const std::string& what);

}  // namespace sensboot
