#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sensboot/adam.hpp"
#include "sensboot/bilstm.hpp"
#include "sensboot/classifier.hpp"
#include "sensboot/corpus.hpp"

namespace sensboot {

struct TrainConfig {
  double learning_rate = 0.001;
  double weight_decay = 1e-8;
  double dropout_rate = 0.5;
  std::size_t batch_size = 500;
  std::size_t epochs = 5;
  std::size_t max_seq_len = 100;
  std::size_t hidden = 128;
  std::size_t dim = 300;
  std::size_t min_count = 1;
  std::size_t max_vocab = 50000;
  std::uint64_t seed = 0;

  void validate() const;
  AdamConfig adam() const;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> dev_accuracy;
};

struct TrainResult {
  Params<float> params;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;  // 1-based epoch number
  // True when there was no dev data and the last epoch was kept.
  bool dev_fallback = false;
};

/// Fraction of examples whose argmax prediction matches the label.
double accuracy(const Params<float>& params, const std::vector<LabeledIds>& data);

/// Seeded per-epoch shuffle, mini-batches of batch_size, one Adam step per
/// batch. Keeps the parameters of the epoch with the best dev accuracy
/// (earliest on ties); without dev data the final epoch wins.
TrainResult train(Params<float> initial, const std::vector<LabeledIds>& train_set,
                  const std::vector<LabeledIds>& dev_set, const TrainConfig& cfg,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

/// Tab-separated `epoch train_loss dev_accuracy` lines with a header.
std::string format_train_log(const std::vector<EpochLog>& log);

struct LabeledText {
  TokenSeq tokens;
  BinaryLabel label;
};

/// Tokenizes and collapses gold labels; utterances without tokens are
/// dropped. Throws DataError for a missing or unmapped label.
std::vector<LabeledText> prepare_examples(const std::vector<Utterance>& data,
                                          const LabelMapping& mapping);

std::vector<LabeledIds> encode_examples(const std::vector<LabeledText>& data,
                                        const Vocabulary& vocab);

struct FitResult {
  Classifier model;
  TrainResult training;
  std::size_t pretrained_rows = 0;
};

/// Builds the vocabulary from the training tokens, initializes parameters
/// (and pretrained embeddings when a path is given), then trains.
FitResult fit_classifier(const std::vector<Utterance>& train_data,
                         const std::vector<Utterance>& dev_data,
                         const LabelMapping& mapping, const TrainConfig& cfg,
                         const std::optional<std::string>& embeddings_path,
                         const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace sensboot
