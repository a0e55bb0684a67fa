#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sensboot/corpus.hpp"

namespace sensboot {

/// Parameters of the synthetic forum corpus. Forums come in three kinds
/// that differ only in the share of sensitive utterances they carry.
/// Sensitive utterances always contain implicit words of one sub-class
/// (insult, racist, sexual, violent) that never appear on the blacklist;
/// a fraction of them also contain one blacklist word.
struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t forums = 40;
  std::size_t toxic_forums = 8;
  std::size_t mixed_forums = 8;
  std::size_t utterances = 50000;
  double toxic_rate = 0.75;
  double mixed_rate = 0.15;
  double clean_rate = 0.01;
  // Share of sensitive corpus utterances carrying a blacklist word.
  double corpus_blacklist_rate = 0.5;

  std::size_t blacklist_words = 40;
  std::size_t implicit_words_per_class = 30;
  // Topic vocabularies belong to themes; every theme is shared by forums of
  // each kind, so topic words carry no label signal.
  std::size_t themes = 8;
  std::size_t topic_words_per_theme = 20;
  std::size_t neutral_words = 300;
  std::size_t min_length = 8;
  std::size_t max_length = 14;

  // Test set: gold sub-class labels plus "neutral".
  std::size_t test_sensitive = 1000;
  std::size_t test_nonsensitive = 1000;
  // Exactly round(test_overlap * test_sensitive) sensitive test items
  // contain a blacklist word.
  double test_overlap = 0.25;
  // Nonsensitive test items that nevertheless contain a blacklist word.
  std::size_t test_false_positives = 3;

  std::size_t embedding_dim = 16;
  // Share of the vocabulary that receives a pretrained vector.
  double embedding_coverage = 0.8;
};

inline constexpr const char* kSynthSensitiveClasses[] = {"insult", "racist", "sexual",
                                                         "violent"};
inline constexpr const char* kSynthNonsensitiveClass = "neutral";

struct SynthData {
  std::vector<Utterance> corpus;   // forum-tagged, unlabeled
  std::vector<Utterance> testset;  // gold-labeled
  std::vector<std::string> blacklist;
  std::vector<std::pair<std::string, std::vector<float>>> embeddings;
  std::size_t test_overlap_count = 0;
  std::size_t test_sensitive_count = 0;
  std::size_t test_false_positive_count = 0;
  std::vector<std::string> toxic_forums;
  std::vector<std::string> mixed_forums;
  std::vector<std::string> clean_forums;

  /// test_overlap_count / test_sensitive_count.
  double overlap_fraction() const;
};

SynthData generate_synthetic(const SynthSpec& spec);

/// Writes corpus.jsonl, testset.jsonl, blacklist.txt and embeddings.txt
/// into `dir` (created if missing).
void write_synthetic(const std::string& dir, const SynthData& data);

}  // namespace sensboot
