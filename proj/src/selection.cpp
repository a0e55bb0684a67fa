#include "sensboot/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "sensboot/error.hpp"
#include "sensboot/seed.hpp"

namespace sensboot {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kStage1Forum: return "stage1-forum";
    case Provenance::kStage2Model: return "stage2-model";
    case Provenance::kStage2Blacklist: return "stage2-blacklist";
    case Provenance::kStage2Clean: return "stage2-clean";
  }
  return "stage1-forum";
}

Provenance parse_provenance(std::string_view name) {
  for (auto p : {Provenance::kStage1Forum, Provenance::kStage2Model,
                 Provenance::kStage2Blacklist, Provenance::kStage2Clean}) {
    if (to_string(p) == name) return p;
  }
  throw DataError("unknown provenance '" + std::string(name) + "'");
}

std::map<std::string, std::size_t> WeakLabeledSet::label_counts() const {
  std::map<std::string, std::size_t> counts{{"nonsensitive", 0}, {"sensitive", 0}};
  for (const auto& ex : examples) ++counts[std::string(to_string(ex.label))];
  return counts;
}

std::map<std::string, std::size_t> WeakLabeledSet::provenance_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& ex : examples) ++counts[std::string(to_string(ex.provenance))];
  return counts;
}

bool item_less(const BottomK::Item& a, const BottomK::Item& b) {
  if (a.key != b.key) return a.key < b.key;
  return a.id < b.id;
}

void BottomK::offer(std::uint64_t key, std::string_view id, std::size_t index) {
  ++offered_;
  if (k_ == 0) return;
  Item item{key, std::string(id), index};
  if (heap_.size() < k_) {
    heap_.push_back(std::move(item));
    std::push_heap(heap_.begin(), heap_.end(), item_less);
  } else if (item_less(item, heap_.front())) {
    std::pop_heap(heap_.begin(), heap_.end(), item_less);
    heap_.back() = std::move(item);
    std::push_heap(heap_.begin(), heap_.end(), item_less);
  }
}

void BottomK::merge(const BottomK& other) {
  const std::size_t offered = offered_ + other.offered_;
  for (const auto& item : other.heap_) offer(item.key, item.id, item.index);
  offered_ = offered;
}

std::vector<BottomK::Item> BottomK::sorted() const {
  auto out = heap_;
  std::sort(out.begin(), out.end(), item_less);
  return out;
}

namespace {

WeakExample make_example(const Utterance& u, const TokenSeq& tokens,
                         BinaryLabel label, Provenance provenance) {
  return {u.id, tokens, label, provenance, u.text, u.forum, std::nullopt};
}

struct Stage1Buckets {
  BottomK sensitive;
  BottomK nonsensitive;

  explicit Stage1Buckets(std::size_t k) : sensitive(k), nonsensitive(k) {}

  void offer(const Utterance& u, const TokenSeq& tokens, std::size_t index,
             const ForumPartition& partition, std::uint64_t s_seed,
             std::uint64_t n_seed) {
    if (tokens.empty()) return;
    switch (partition.pool_of(u.forum)) {
      case Pool::kSensitive:
        sensitive.offer(keyed_hash(s_seed, u.id), u.id, index);
        break;
      case Pool::kNonsensitive:
        nonsensitive.offer(keyed_hash(n_seed, u.id), u.id, index);
        break;
      default:
        break;
    }
  }

  void merge(const Stage1Buckets& other) {
    sensitive.merge(other.sensitive);
    nonsensitive.merge(other.nonsensitive);
  }
};

void check_pools(const ForumPartition& partition) {
  if (partition.sensitive_forums.empty() || partition.nonsensitive_forums.empty()) {
    throw DataError("forum partition has an empty pool (sensitive: " +
                    std::to_string(partition.sensitive_forums.size()) +
                    " forums, nonsensitive: " +
                    std::to_string(partition.nonsensitive_forums.size()) +
                    " forums)");
  }
}

template <typename TokenAt>
WeakLabeledSet finish_stage1(const std::vector<Utterance>& corpus,
                             const Stage1Buckets& b, std::size_t n_per_class,
                             std::uint64_t seed, TokenAt&& token_at) {
  if (b.sensitive.offered() < n_per_class || b.nonsensitive.offered() < n_per_class) {
    throw DataError("insufficient supply for stage 1: need " +
                    std::to_string(n_per_class) + " per class, sensitive pool has " +
                    std::to_string(b.sensitive.offered()) +
                    " usable utterances, nonsensitive pool has " +
                    std::to_string(b.nonsensitive.offered()));
  }
  WeakLabeledSet set;
  set.seed = seed;
  for (const auto& item : b.sensitive.sorted()) {
    set.examples.push_back(make_example(corpus[item.index], token_at(item.index),
                                        BinaryLabel::kSensitive,
                                        Provenance::kStage1Forum));
  }
  for (const auto& item : b.nonsensitive.sorted()) {
    set.examples.push_back(make_example(corpus[item.index], token_at(item.index),
                                        BinaryLabel::kNonsensitive,
                                        Provenance::kStage1Forum));
  }
  return set;
}

}  // namespace

WeakLabeledSet sample_stage1(const std::vector<Utterance>& corpus,
                             const std::vector<TokenSeq>& tokens,
                             const ForumPartition& partition,
                             std::size_t n_per_class, std::uint64_t seed) {
  check_pools(partition);
  if (tokens.size() != corpus.size()) {
    throw DataError("token sequences do not match corpus size");
  }
  const auto s_seed = derive_seed(seed, kStage1SensitiveLabel);
  const auto n_seed = derive_seed(seed, kStage1NonsensitiveLabel);
  Stage1Buckets total(n_per_class);
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel
  {
    Stage1Buckets local(n_per_class);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      local.offer(corpus[k], tokens[k], k, partition, s_seed, n_seed);
    }
#pragma omp critical(sensboot_stage1_merge)
    total.merge(local);
  }
  return finish_stage1(corpus, total, n_per_class, seed,
                       [&](std::size_t i) -> const TokenSeq& { return tokens[i]; });
}

WeakLabeledSet sample_stage1(const std::vector<Utterance>& corpus,
                             const ForumPartition& partition,
                             std::size_t n_per_class, std::uint64_t seed) {
  return sample_stage1(corpus, tokenize_all(corpus), partition, n_per_class, seed);
}

WeakLabeledSet sample_stage1_serial(const std::vector<Utterance>& corpus,
                                    const ForumPartition& partition,
                                    std::size_t n_per_class, std::uint64_t seed) {
  check_pools(partition);
  const auto s_seed = derive_seed(seed, kStage1SensitiveLabel);
  const auto n_seed = derive_seed(seed, kStage1NonsensitiveLabel);
  Stage1Buckets buckets(n_per_class);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    buckets.offer(corpus[i], tokenize(corpus[i].text), i, partition, s_seed, n_seed);
  }
  return finish_stage1(corpus, buckets, n_per_class, seed,
                       [&](std::size_t i) { return tokenize(corpus[i].text); });
}

void Stage2Config::validate() const {
  if (!(p_low >= 0.0 && p_low < p_high && p_high <= 1.0)) {
    throw ConfigError("stage 2 thresholds must satisfy 0 <= p_low < p_high <= 1");
  }
  if (!(model_fraction >= 0.0 && model_fraction <= 1.0)) {
    throw ConfigError("stage 2 model_fraction must lie in [0, 1]");
  }
  if (sensitive_quota == 0 || nonsensitive_quota == 0) {
    throw ConfigError("stage 2 quotas must be positive");
  }
}

std::size_t Stage2Config::model_quota() const {
  // 0.7 * 10 evaluates to 7.000000000000001 in binary floating point.
  const double raw = model_fraction * static_cast<double>(sensitive_quota);
  const auto q = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::min(q, sensitive_quota);
}

bool stage2_sensitive_predicate(double p, const TokenSeq& tokens,
                                const Blacklist& bl, const Stage2Config& cfg) {
  return p > cfg.p_high || contains_match(tokens, bl);
}

bool stage2_nonsensitive_predicate(double p, const TokenSeq& tokens,
                                   const Blacklist& bl, const Stage2Config& cfg) {
  return p < cfg.p_low && !contains_match(tokens, bl);
}

WeakLabeledSet sample_stage2(const std::vector<Utterance>& corpus,
                             const std::vector<TokenSeq>& tokens,
                             const std::vector<double>& p_values,
                             const ForumPartition& partition,
                             const Blacklist& bl, const Stage2Config& cfg) {
  cfg.validate();
  check_pools(partition);
  if (tokens.size() != corpus.size() || p_values.size() != corpus.size()) {
    throw DataError("scores or token sequences do not match corpus size");
  }
  const std::size_t model_quota = cfg.model_quota();
  const std::size_t blacklist_quota = cfg.blacklist_quota();
  const auto model_seed = derive_seed(cfg.seed, kStage2ModelLabel);
  const auto blacklist_seed = derive_seed(cfg.seed, kStage2BlacklistLabel);
  const auto clean_seed = derive_seed(cfg.seed, kStage2CleanLabel);

  BottomK model(model_quota);
  // Enough spares to survive removal of everything the model bucket takes.
  BottomK blacklisted(model_quota + blacklist_quota);
  BottomK clean(cfg.nonsensitive_quota);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& u = corpus[i];
    if (tokens[i].empty()) continue;
    const Pool pool = partition.pool_of(u.forum);
    if (pool == Pool::kSensitive) {
      if (p_values[i] > cfg.p_high) model.offer(keyed_hash(model_seed, u.id), u.id, i);
      if (contains_match(tokens[i], bl)) {
        blacklisted.offer(keyed_hash(blacklist_seed, u.id), u.id, i);
      }
    } else if (pool == Pool::kNonsensitive) {
      if (stage2_nonsensitive_predicate(p_values[i], tokens[i], bl, cfg)) {
        clean.offer(keyed_hash(clean_seed, u.id), u.id, i);
      }
    }
  }

  const auto model_items = model.sorted();
  std::unordered_set<std::size_t> taken;
  std::size_t model_with_blacklist = 0;
  for (const auto& item : model_items) {
    taken.insert(item.index);
    if (contains_match(tokens[item.index], bl)) ++model_with_blacklist;
  }
  std::vector<BottomK::Item> blacklist_items;
  for (const auto& item : blacklisted.sorted()) {
    if (blacklist_items.size() == blacklist_quota) break;
    if (!taken.count(item.index)) blacklist_items.push_back(item);
  }
  const std::size_t blacklist_available =
      blacklisted.offered() - std::min(blacklisted.offered(), model_with_blacklist);

  if (model.offered() < model_quota || blacklist_items.size() < blacklist_quota ||
      clean.offered() < cfg.nonsensitive_quota) {
    std::ostringstream msg;
    msg << "stage 2 quota unmet: stage2-model needs " << model_quota << ", "
        << model.offered() << " qualify (p > " << cfg.p_high
        << "); stage2-blacklist needs " << blacklist_quota << ", "
        << blacklist_available
        << " qualify (blacklist match, not taken by model bucket); "
           "stage2-clean needs "
        << cfg.nonsensitive_quota << ", " << clean.offered() << " qualify (p < "
        << cfg.p_low << ", no blacklist match)";
    throw DataError(msg.str());
  }

  WeakLabeledSet set;
  set.seed = cfg.seed;
  auto emit = [&](const std::vector<BottomK::Item>& items, BinaryLabel label,
                  Provenance prov) {
    for (const auto& item : items) {
      auto ex = make_example(corpus[item.index], tokens[item.index], label, prov);
      ex.p_sensitive = p_values[item.index];
      set.examples.push_back(std::move(ex));
    }
  };
  emit(model_items, BinaryLabel::kSensitive, Provenance::kStage2Model);
  emit(blacklist_items, BinaryLabel::kSensitive, Provenance::kStage2Blacklist);
  emit(clean.sorted(), BinaryLabel::kNonsensitive, Provenance::kStage2Clean);
  return set;
}

WeakLabeledSet sample_stage2(const std::vector<Utterance>& corpus,
                             const ForumPartition& partition,
                             const Classifier& scorer, const Blacklist& bl,
                             const Stage2Config& cfg) {
  cfg.validate();
  const auto tokens = tokenize_all(corpus);
  std::vector<std::size_t> candidates;
  std::vector<TokenSeq> candidate_tokens;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Pool pool = partition.pool_of(corpus[i].forum);
    if ((pool == Pool::kSensitive || pool == Pool::kNonsensitive) &&
        !tokens[i].empty()) {
      candidates.push_back(i);
      candidate_tokens.push_back(tokens[i]);
    }
  }
  const auto scores = scorer.score_batch(candidate_tokens);
  std::vector<double> p(corpus.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    p[candidates[k]] = scores[k].p_sensitive;
  }
  return sample_stage2(corpus, tokens, p, partition, bl, cfg);
}

std::vector<std::string> validate_stage2(const WeakLabeledSet& set,
                                         const Blacklist& bl,
                                         const Stage2Config& cfg,
                                         const ForumPartition* partition) {
  std::vector<std::string> violations;
  for (const auto& ex : set.examples) {
    auto fail = [&](const std::string& why) {
      violations.push_back(ex.id + ": " + why);
    };
    if (!ex.p_sensitive && ex.provenance != Provenance::kStage2Blacklist) {
      fail("missing classifier score");
      continue;
    }
    const double p = ex.p_sensitive.value_or(0.0);
    switch (ex.provenance) {
      case Provenance::kStage2Model:
        if (ex.label != BinaryLabel::kSensitive) fail("stage2-model labeled nonsensitive");
        if (!(p > cfg.p_high)) fail("stage2-model score not above p_high");
        break;
      case Provenance::kStage2Blacklist:
        if (ex.label != BinaryLabel::kSensitive) fail("stage2-blacklist labeled nonsensitive");
        if (!contains_match(ex.tokens, bl)) fail("stage2-blacklist without blacklist match");
        break;
      case Provenance::kStage2Clean:
        if (ex.label != BinaryLabel::kNonsensitive) fail("stage2-clean labeled sensitive");
        if (!stage2_nonsensitive_predicate(p, ex.tokens, bl, cfg)) {
          fail("stage2-clean fails the nonsensitive predicate");
        }
        break;
      case Provenance::kStage1Forum:
        fail("stage1 provenance in a stage 2 set");
        break;
    }
    if (ex.label == BinaryLabel::kSensitive &&
        !stage2_sensitive_predicate(p, ex.tokens, bl, cfg)) {
      fail("sensitive example fails the sensitive predicate");
    }
    if (partition) {
      const Pool pool = partition->pool_of(ex.forum);
      const Pool want = ex.label == BinaryLabel::kSensitive ? Pool::kSensitive
                                                            : Pool::kNonsensitive;
      if (pool != want) {
        fail("forum '" + ex.forum + "' is in the " + std::string(to_string(pool)) +
             " pool");
      }
    }
  }
  return violations;
}

std::vector<std::string> validate_stage2(const WeakLabeledSet& set,
                                         const Classifier& scorer,
                                         const Blacklist& bl,
                                         const Stage2Config& cfg,
                                         const ForumPartition* partition) {
  WeakLabeledSet rescored = set;
  std::vector<TokenSeq> batch;
  batch.reserve(rescored.examples.size());
  for (auto& ex : rescored.examples) {
    ex.tokens = tokenize(ex.text);
    batch.push_back(ex.tokens);
  }
  const auto scores = scorer.score_batch(batch);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    rescored.examples[i].p_sensitive = scores[i].p_sensitive;
  }
  return validate_stage2(rescored, bl, cfg, partition);
}

std::string stats_path_for(const std::string& dataset_path) {
  return dataset_path + ".stats.json";
}

void write_weak_set(const std::string& path, const WeakLabeledSet& set) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write dataset: " + path);
  for (const auto& ex : set.examples) {
    nlohmann::json j;
    j["id"] = ex.id;
    j["label"] = to_string(ex.label);
    j["provenance"] = to_string(ex.provenance);
    j["forum"] = ex.forum;
    j["text"] = ex.text;
    out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
  if (!out) throw DataError("write error on dataset: " + path);
}

void write_weak_set_stats(const std::string& path, const WeakLabeledSet& set) {
  nlohmann::json j;
  j["seed"] = set.seed;
  j["total"] = set.examples.size();
  j["labels"] = set.label_counts();
  j["provenance"] = set.provenance_counts();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write stats file: " + path);
  out << j.dump(2) << '\n';
}

WeakLabeledSet read_weak_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset: " + path);
  WeakLabeledSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    auto where = path + ":" + std::to_string(lineno);
    if (j.is_discarded() || !j.is_object()) throw DataError(where + ": invalid json");
    try {
      WeakExample ex;
      ex.id = j.at("id").get<std::string>();
      ex.label = parse_binary_label(j.at("label").get<std::string>());
      ex.provenance = parse_provenance(j.at("provenance").get<std::string>());
      ex.text = j.at("text").get<std::string>();
      if (j.contains("forum")) ex.forum = j["forum"].get<std::string>();
      ex.tokens = tokenize(ex.text);
      set.examples.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  std::ifstream stats(stats_path_for(path));
  if (stats) {
    auto j = nlohmann::json::parse(stats, nullptr, false);
    if (!j.is_discarded() && j.contains("seed")) set.seed = j["seed"].get<std::uint64_t>();
  }
  return set;
}

std::vector<Utterance> to_utterances(const WeakLabeledSet& set) {
  std::vector<Utterance> out;
  out.reserve(set.examples.size());
  for (const auto& ex : set.examples) {
    out.push_back({ex.id, ex.text, ex.forum, std::string(to_string(ex.label))});
  }
  return out;
}

}  // namespace sensboot
