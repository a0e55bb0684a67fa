#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensboot/blacklist.hpp"
#include "sensboot/classifier.hpp"
#include "sensboot/corpus.hpp"
#include "sensboot/ranking.hpp"

namespace sensboot {

enum class Provenance : std::uint8_t {
  kStage1Forum,
  kStage2Model,
  kStage2Blacklist,
  kStage2Clean,
};

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view name);

struct WeakExample {
  std::string id;
  TokenSeq tokens;
  BinaryLabel label = BinaryLabel::kSensitive;
  Provenance provenance = Provenance::kStage1Forum;
  std::string text;
  std::string forum;
  // Classifier score that admitted the example (stage 2 only).
  std::optional<double> p_sensitive;
};

struct WeakLabeledSet {
  std::vector<WeakExample> examples;
  std::uint64_t seed = 0;

  std::map<std::string, std::size_t> label_counts() const;
  std::map<std::string, std::size_t> provenance_counts() const;
};

/// Keeps the k items with the smallest (key, id). Selecting by a keyed hash
/// of the id draws a uniform k-subset that does not depend on arrival
/// order, and two partial samples merge into the sample of their union.
class BottomK {
 public:
  struct Item {
    std::uint64_t key;
    std::string id;
    std::size_t index;
  };

  explicit BottomK(std::size_t k) : k_(k) {}

  void offer(std::uint64_t key, std::string_view id, std::size_t index);
  void merge(const BottomK& other);
  /// Retained items in ascending (key, id) order.
  std::vector<Item> sorted() const;
  std::size_t capacity() const { return k_; }
  std::size_t offered() const { return offered_; }

 private:
  std::size_t k_;
  std::size_t offered_ = 0;
  std::vector<Item> heap_;  // max-heap on (key, id)
};

bool item_less(const BottomK::Item& a, const BottomK::Item& b);

/// Stage 1: n_per_class sensitive examples from the sensitive forums and
/// n_per_class nonsensitive ones from the nonsensitive forums, utterances
/// without tokens excluded. Throws DataError reporting the available counts
/// when either pool is short.
WeakLabeledSet sample_stage1(const std::vector<Utterance>& corpus,
                             const ForumPartition& partition,
                             std::size_t n_per_class, std::uint64_t seed);
WeakLabeledSet sample_stage1(const std::vector<Utterance>& corpus,
                             const std::vector<TokenSeq>& tokens,
                             const ForumPartition& partition,
                             std::size_t n_per_class, std::uint64_t seed);
/// Single-pass serial reference.
WeakLabeledSet sample_stage1_serial(const std::vector<Utterance>& corpus,
                                    const ForumPartition& partition,
                                    std::size_t n_per_class, std::uint64_t seed);

struct Stage2Config {
  double p_high = 0.8;
  double p_low = 0.3;
  std::size_t sensitive_quota = 0;
  double model_fraction = 0.7;
  std::size_t nonsensitive_quota = 0;
  std::uint64_t seed = 0;

  void validate() const;
  /// ceil(model_fraction * sensitive_quota).
  std::size_t model_quota() const;
  std::size_t blacklist_quota() const { return sensitive_quota - model_quota(); }
};

/// p > p_high, or any blacklist token.
bool stage2_sensitive_predicate(double p, const TokenSeq& tokens,
                                const Blacklist& bl, const Stage2Config& cfg);
/// p < p_low and no blacklist token.
bool stage2_nonsensitive_predicate(double p, const TokenSeq& tokens,
                                   const Blacklist& bl, const Stage2Config& cfg);

// Per-bucket keys are derived from the stage seed with these labels.
inline constexpr std::string_view kStage1SensitiveLabel = "stage1-sensitive";
inline constexpr std::string_view kStage1NonsensitiveLabel = "stage1-nonsensitive";
inline constexpr std::string_view kStage2ModelLabel = "stage2-model";
inline constexpr std::string_view kStage2BlacklistLabel = "stage2-blacklist";
inline constexpr std::string_view kStage2CleanLabel = "stage2-clean";

/// Stage 2 with precomputed scores (`p_values[i]` for corpus[i]; only
/// entries of candidates in the sensitive or nonsensitive pools are read).
/// The sensitive side takes model_quota() examples with p > p_high and then
/// blacklist_quota() blacklist-containing examples not already taken; the
/// nonsensitive side takes nonsensitive_quota examples satisfying the
/// nonsensitive predicate. Throws DataError with per-bucket qualifying
/// counts if any quota is unmet.
WeakLabeledSet sample_stage2(const std::vector<Utterance>& corpus,
                             const std::vector<TokenSeq>& tokens,
                             const std::vector<double>& p_values,
                             const ForumPartition& partition,
                             const Blacklist& bl, const Stage2Config& cfg);

/// Scores every candidate with `scorer` (in parallel) and samples.
WeakLabeledSet sample_stage2(const std::vector<Utterance>& corpus,
                             const ForumPartition& partition,
                             const Classifier& scorer, const Blacklist& bl,
                             const Stage2Config& cfg);

/// Post-hoc re-check of every example against the predicate of its
/// provenance. Returns one message per violation.
std::vector<std::string> validate_stage2(const WeakLabeledSet& set,
                                         const Blacklist& bl,
                                         const Stage2Config& cfg,
                                         const ForumPartition* partition = nullptr);

/// Re-scores each example's text with `scorer` before checking.
std::vector<std::string> validate_stage2(const WeakLabeledSet& set,
                                         const Classifier& scorer,
                                         const Blacklist& bl,
                                         const Stage2Config& cfg,
                                         const ForumPartition* partition = nullptr);

/// jsonl with id, label, provenance, forum and text per line.
void write_weak_set(const std::string& path, const WeakLabeledSet& set);
/// Sidecar JSON with the seed and per-label / per-provenance counts.
void write_weak_set_stats(const std::string& path, const WeakLabeledSet& set);
std::string stats_path_for(const std::string& dataset_path);
/// Reads a persisted set back; tokens are recomputed from text.
WeakLabeledSet read_weak_set(const std::string& path);

/// The set as labeled utterances (gold label = binary label name).
std::vector<Utterance> to_utterances(const WeakLabeledSet& set);

}  // namespace sensboot
