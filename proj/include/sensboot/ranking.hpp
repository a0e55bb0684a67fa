#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sensboot/blacklist.hpp"
#include "sensboot/corpus.hpp"

namespace sensboot {

struct ForumScore {
  std::string forum;
  std::uint64_t blacklist_hits = 0;
  std::uint64_t total_tokens = 0;

  /// hits / total, or 0 for a forum without tokens.
  double density() const {
    return total_tokens == 0 ? 0.0
                             : static_cast<double>(blacklist_hits) /
                                   static_cast<double>(total_tokens);
  }
};

/// Exact rational comparison: density descending, then forum ascending.
bool ranks_before(const ForumScore& a, const ForumScore& b);
void sort_scores(std::vector<ForumScore>& scores);

/// Per-forum hit/token counters. Merging is addition, so shards can be
/// accumulated independently and combined in any order.
class ForumTally {
 public:
  void add(std::string_view forum, const TokenSeq& tokens, const Blacklist& bl);
  void add(std::string_view forum, std::uint64_t hits, std::uint64_t tokens);
  void merge(const ForumTally& other);
  std::vector<ForumScore> scores() const;

 private:
  struct Counts {
    std::uint64_t hits = 0;
    std::uint64_t tokens = 0;
  };
  std::unordered_map<std::string, Counts> counts_;
};

/// One score per distinct non-empty forum name, sorted by ranks_before.
/// Utterances without a forum are ignored.
std::vector<ForumScore> score_forums(const std::vector<Utterance>& corpus,
                                     const Blacklist& bl);
std::vector<ForumScore> score_forums(const std::vector<Utterance>& corpus,
                                     const std::vector<TokenSeq>& tokens,
                                     const Blacklist& bl);
/// Single-threaded reference.
std::vector<ForumScore> score_forums_serial(const std::vector<Utterance>& corpus,
                                            const Blacklist& bl);

enum class Pool { kSensitive, kNonsensitive, kExcluded, kUnscored };

std::string_view to_string(Pool pool);

struct ForumPartition {
  std::set<std::string, std::less<>> sensitive_forums;
  std::set<std::string, std::less<>> nonsensitive_forums;
  std::set<std::string, std::less<>> excluded_forums;
  double low_threshold = 0.002;
  double high_threshold = 0.01;

  Pool pool_of(std::string_view forum) const;
};

inline constexpr double kDefaultLowThreshold = 0.002;
inline constexpr double kDefaultHighThreshold = 0.01;

/// nonsensitive: density < low; sensitive: density > high; everything in
/// the closed band [low, high] is excluded. Throws ConfigError unless
/// 0 <= low < high <= 1.
ForumPartition partition_forums(const std::vector<ForumScore>& scores,
                                double low = kDefaultLowThreshold,
                                double high = kDefaultHighThreshold);

/// `forum<TAB>hits<TAB>tokens<TAB>density` lines in ranked order.
void write_forum_report(const std::string& path,
                        const std::vector<ForumScore>& scores);
std::string format_forum_report(const std::vector<ForumScore>& scores);
/// Densities are recomputed from the integer columns.
std::vector<ForumScore> read_forum_report(const std::string& path);

std::string format_partition_summary(const ForumPartition& partition);

}  // namespace sensboot
