#include "sensboot/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sensboot/error.hpp"
#include "sensboot/seed.hpp"

namespace sensboot {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1)");
  }
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (max_seq_len == 0) throw ConfigError("max sequence length must be >= 1");
  if (hidden == 0 || dim == 0) throw ConfigError("model sizes must be >= 1");
  if (min_count == 0) throw ConfigError("min_count must be >= 1");
}

AdamConfig TrainConfig::adam() const {
  AdamConfig a;
  a.learning_rate = learning_rate;
  a.weight_decay = weight_decay;
  return a;
}

double accuracy(const Params<float>& params, const std::vector<LabeledIds>& data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : correct)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& ex = data[static_cast<std::size_t>(i)];
    const double p = forward(params, ex.ids, Mode::kEval).p_sensitive;
    correct += predicted_label(p) == ex.label ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainResult train(Params<float> initial, const std::vector<LabeledIds>& train_set,
                  const std::vector<LabeledIds>& dev_set, const TrainConfig& cfg,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw DataError("empty training set");

  TrainResult result;
  Params<float> params = std::move(initial);
  AdamState<float> state(params.values.size());
  const AdamConfig adam = cfg.adam();
  Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));
  const std::uint64_t dropout_seed = derive_seed(cfg.seed, "dropout");

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::optional<double> best_accuracy;
  std::vector<LabeledIds> batch;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    seeded_shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(train_set[order[k]]);
      const auto step_seed = splitmix64(dropout_seed ^ (state.step + 1));
      auto lg = loss_and_grads(params, batch, cfg.dropout_rate, step_seed,
                               Mode::kTrain);
      loss_sum += lg.loss * static_cast<double>(batch.size());
      adam_step(params, lg.grads, state, adam);
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(order.size());
    if (!dev_set.empty()) {
      entry.dev_accuracy = accuracy(params, dev_set);
      if (!best_accuracy || *entry.dev_accuracy > *best_accuracy) {
        best_accuracy = entry.dev_accuracy;
        result.best_epoch = epoch;
        result.params = params;
      }
    }
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
  }
  if (dev_set.empty()) {
    result.dev_fallback = true;
    result.best_epoch = cfg.epochs;
    result.params = std::move(params);
  }
  return result;
}

std::string format_train_log(const std::vector<EpochLog>& log) {
  std::string out = "epoch\ttrain_loss\tdev_accuracy\n";
  char buf[128];
  for (const auto& e : log) {
    if (e.dev_accuracy) {
      std::snprintf(buf, sizeof buf, "%zu\t%.9f\t%.6f\n", e.epoch, e.train_loss,
                    *e.dev_accuracy);
    } else {
      std::snprintf(buf, sizeof buf, "%zu\t%.9f\t-\n", e.epoch, e.train_loss);
    }
    out += buf;
  }
  return out;
}

std::vector<LabeledText> prepare_examples(const std::vector<Utterance>& data,
                                          const LabelMapping& mapping) {
  std::vector<LabeledText> out;
  out.reserve(data.size());
  auto tokens = tokenize_all(data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& u = data[i];
    if (!u.gold_label) throw DataError("utterance '" + u.id + "' has no label");
    const BinaryLabel label = mapping.collapse(*u.gold_label);
    if (tokens[i].empty()) continue;
    out.push_back({std::move(tokens[i]), label});
  }
  return out;
}

std::vector<LabeledIds> encode_examples(const std::vector<LabeledText>& data,
                                        const Vocabulary& vocab) {
  std::vector<LabeledIds> out;
  out.reserve(data.size());
  for (const auto& ex : data) out.push_back({vocab.encode(ex.tokens), ex.label});
  return out;
}

FitResult fit_classifier(const std::vector<Utterance>& train_data,
                         const std::vector<Utterance>& dev_data,
                         const LabelMapping& mapping, const TrainConfig& cfg,
                         const std::optional<std::string>& embeddings_path,
                         const std::function<void(const EpochLog&)>& on_epoch) {
  cfg.validate();
  const auto train_text = prepare_examples(train_data, mapping);
  const auto dev_text = prepare_examples(dev_data, mapping);
  if (train_text.empty()) throw DataError("empty training set");

  std::vector<TokenSeq> seqs;
  seqs.reserve(train_text.size());
  for (const auto& ex : train_text) seqs.push_back(ex.tokens);
  Vocabulary vocab = Vocabulary::build(seqs, cfg.min_count, cfg.max_vocab);

  const ModelShape shape{vocab.size(), cfg.dim, cfg.hidden, cfg.max_seq_len};
  Params<float> params = init_params<float>(shape, derive_seed(cfg.seed, "init"));
  const auto emb_seed = derive_seed(cfg.seed, "embeddings");
  const EmbeddingMatrix emb =
      embeddings_path ? load_embeddings(*embeddings_path, vocab, cfg.dim, emb_seed)
                      : random_embeddings(vocab, cfg.dim, emb_seed);
  std::copy(emb.values.begin(), emb.values.end(),
            params.tensor(Tensor::kEmbedding).begin());

  auto result = train(std::move(params), encode_examples(train_text, vocab),
                      encode_examples(dev_text, vocab), cfg, on_epoch);
  Classifier model(std::move(vocab), result.params);
  return FitResult{std::move(model), std::move(result), emb.pretrained_rows()};
}

}  // namespace sensboot
