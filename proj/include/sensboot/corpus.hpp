#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sensboot {

struct Utterance {
  std::string id;
  std::string text;
  std::string forum;
  std::optional<std::string> gold_label;
};

using TokenSeq = std::vector<std::string>;

enum class CorpusFormat { kJsonl, kTsv };

CorpusFormat parse_corpus_format(std::string_view tag);
std::string_view to_string(CorpusFormat format);

struct ReadStats {
  std::size_t lines = 0;
  std::size_t records = 0;
  std::size_t skipped = 0;
  // Skip reason -> count.
  std::map<std::string, std::size_t> skip_reasons;
  // First few skipped lines, 1-based.
  std::vector<std::size_t> first_skipped_lines;
};

/// Streams well-formed records of a line-delimited corpus to `sink`, in file
/// order. Malformed lines (bad JSON, missing `id`/`text`, empty or duplicate
/// id, wrong TSV arity) are tallied in the returned stats and not yielded,
/// so `records + skipped == lines`. Throws DataError if the file cannot be
/// opened.
ReadStats read_corpus(const std::string& path, CorpusFormat format,
                      const std::function<void(Utterance&&)>& sink);

struct Corpus {
  std::vector<Utterance> utterances;
  ReadStats stats;
};

Corpus read_corpus(const std::string& path, CorpusFormat format);

/// Parses a single record. Returns std::nullopt with `reason` set when the
/// record is malformed.
std::optional<Utterance> parse_record(std::string_view line,
                                      CorpusFormat format,
                                      std::string* reason = nullptr);

std::string format_record(const Utterance& u, CorpusFormat format);

void write_corpus(const std::string& path, CorpusFormat format,
                  const std::vector<Utterance>& utterances);

/// Lowercases, splits on Unicode whitespace, and strips leading and trailing
/// punctuation from each token. Internal characters are kept, so "you're"
/// survives intact and "a,,b." becomes "a,,b". Invalid UTF-8 bytes are
/// replaced by U+FFFD.
TokenSeq tokenize(std::string_view text);

/// Tokenizes every utterance. The OpenMP path and the serial reference
/// produce identical output.
std::vector<TokenSeq> tokenize_all(const std::vector<Utterance>& utterances);
std::vector<TokenSeq> tokenize_all_serial(
    const std::vector<Utterance>& utterances);

enum class BinaryLabel : std::uint8_t { kSensitive = 0, kNonsensitive = 1 };

std::string_view to_string(BinaryLabel label);
BinaryLabel parse_binary_label(std::string_view name);

/// Decision rule for a sensitive-class probability: sensitive iff p > 0.5.
inline BinaryLabel predicted_label(double p_sensitive) {
  return p_sensitive > 0.5 ? BinaryLabel::kSensitive : BinaryLabel::kNonsensitive;
}

class LabelMapping {
 public:
  LabelMapping() = default;
  /// Throws ConfigError if the two sets overlap.
  LabelMapping(std::set<std::string> sensitive,
               std::set<std::string> nonsensitive);

  /// Mapping whose classes are the binary label names themselves.
  static LabelMapping identity();
  /// Toxic comments: six toxic classes vs non-toxic.
  static LabelMapping toxic_comments();
  /// Twitter hate/offensive vs neither.
  static LabelMapping twitter();

  /// Throws DataError naming the class when it is in neither set.
  BinaryLabel collapse(std::string_view gold_label) const;
  bool contains(std::string_view gold_label) const;

  const std::set<std::string, std::less<>>& sensitive_classes() const {
    return sensitive_;
  }
  const std::set<std::string, std::less<>>& nonsensitive_classes() const {
    return nonsensitive_;
  }

 private:
  std::set<std::string, std::less<>> sensitive_;
  std::set<std::string, std::less<>> nonsensitive_;
};

inline BinaryLabel collapse_label(std::string_view gold_label,
                                  const LabelMapping& mapping) {
  return mapping.collapse(gold_label);
}

struct SplitSpec {
  double train_frac = 0.8;
  double dev_frac = 0.1;
  double test_frac = 0.1;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless every fraction is in [0,1] and they sum to 1.
  void validate() const;
};

struct SplitResult {
  std::vector<Utterance> train;
  std::vector<Utterance> dev;
  std::vector<Utterance> test;
};

/// Partition sizes come from largest-remainder rounding of N * frac (ties
/// favour train, then dev). Membership depends only on the ids and the seed:
/// items are ranked by a keyed hash of their id, so reordering the input
/// leaves every partition unchanged. Each partition keeps input order.
SplitResult split_dataset(const std::vector<Utterance>& utterances,
                          const SplitSpec& spec);

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec);

}  // namespace sensboot
