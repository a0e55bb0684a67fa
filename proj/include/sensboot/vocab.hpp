#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sensboot/blacklist.hpp"
#include "sensboot/corpus.hpp"

namespace sensboot {

class Vocabulary {
 public:
  static constexpr std::uint32_t kPad = 0;
  static constexpr std::uint32_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  /// PAD/UNK only.
  Vocabulary();

  /// Keeps tokens seen at least `min_count` times, ranked by frequency
  /// (descending) then token (ascending), capped at `max_size` entries on
  /// top of the two reserved ones.
  static Vocabulary build(const std::vector<TokenSeq>& sequences,
                          std::size_t min_count, std::size_t max_size);

  /// `tokens` in index order, starting with the reserved entries.
  static Vocabulary from_tokens(std::vector<std::string> tokens,
                                std::size_t min_count = 1,
                                std::size_t max_size = 0);

  std::size_t size() const { return tokens_.size(); }
  std::optional<std::uint32_t> find(std::string_view token) const;
  std::uint32_t index_of(std::string_view token) const {
    return find(token).value_or(kUnk);
  }
  const std::string& token(std::uint32_t index) const { return tokens_.at(index); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::vector<std::uint32_t> encode(const TokenSeq& tokens) const;

  std::size_t min_count() const { return min_count_; }
  std::size_t max_size() const { return max_size_; }

  /// FNV-1a over the index-ordered token list.
  std::uint64_t hash() const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_;
  }

 private:
  Vocabulary(std::vector<std::string> tokens, std::size_t min_count,
             std::size_t max_size);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>>
      index_;
  std::size_t min_count_ = 1;
  std::size_t max_size_ = 0;
};

std::string hash_to_hex(std::uint64_t h);

enum class RowSource : std::uint8_t { kPretrained, kRandomInit, kPadding };

struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> values;  // rows x dim, row-major
  std::vector<RowSource> source;

  std::size_t pretrained_rows() const;
};

inline constexpr double kEmbeddingInitRange = 0.05;

/// Reads a word-vector text file (`word v1 ... vD` per line). Vocabulary words
/// found in the file get their vectors; every other row except PAD is drawn
/// uniformly from [-0.05, 0.05]; PAD is zero. Throws DataError citing the
/// line on any dimension mismatch.
EmbeddingMatrix load_embeddings(const std::string& path, const Vocabulary& vocab,
                                std::size_t dim, std::uint64_t seed);

/// No pretrained vectors: every row random except PAD.
EmbeddingMatrix random_embeddings(const Vocabulary& vocab, std::size_t dim,
                                  std::uint64_t seed);

}  // namespace sensboot
