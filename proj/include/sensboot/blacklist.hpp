#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sensboot/corpus.hpp"

namespace sensboot {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

/// Immutable set of normalized single-token entries.
class Blacklist {
 public:
  /// Entries are normalized with tokenize(); each must yield exactly one
  /// token. Throws ConfigError on an empty result or a multi-token entry.
  explicit Blacklist(const std::vector<std::string>& entries,
                     std::string source = "<memory>");

  bool contains(std::string_view token) const {
    return entries_.find(token) != entries_.end();
  }
  std::size_t size() const { return entries_.size(); }
  const std::string& source_path() const { return source_; }
  /// Entries in lexicographic order.
  std::vector<std::string> sorted_entries() const;

 private:
  std::unordered_set<std::string, StringHash, std::equal_to<>> entries_;
  std::string source_;
};

/// One entry per line; blank lines and lines whose first non-blank
/// character is `#` are ignored. Errors name the offending line.
Blacklist load_blacklist(const std::string& path);

/// Number of token positions whose token is an entry (occurrences).
std::size_t count_matches(const TokenSeq& tokens, const Blacklist& bl);
bool contains_match(const TokenSeq& tokens, const Blacklist& bl);

}  // namespace sensboot
