#include "sensboot/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sensboot/error.hpp"
#include "sensboot/seed.hpp"

namespace sensboot {

namespace {
constexpr std::string_view kVocabMagic = "sensboot-vocab";
}

Vocabulary::Vocabulary()
    : Vocabulary({std::string(kPadToken), std::string(kUnkToken)}, 1, 0) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::size_t min_count,
                       std::size_t max_size)
    : tokens_(std::move(tokens)), min_count_(min_count), max_size_(max_size) {
  if (tokens_.size() < 2 || tokens_[kPad] != kPadToken ||
      tokens_[kUnk] != kUnkToken) {
    throw DataError("vocabulary must start with <pad> and <unk>");
  }
  for (std::uint32_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw DataError("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens,
                                   std::size_t min_count,
                                   std::size_t max_size) {
  return Vocabulary(std::move(tokens), min_count, max_size);
}

Vocabulary Vocabulary::build(const std::vector<TokenSeq>& sequences,
                             std::size_t min_count, std::size_t max_size) {
  std::unordered_map<std::string_view, std::size_t> freq;
  for (const auto& seq : sequences) {
    for (const auto& t : seq) ++freq[t];
  }
  std::vector<std::pair<std::string_view, std::size_t>> ranked;
  ranked.reserve(freq.size());
  for (const auto& [tok, n] : freq) {
    if (n >= min_count && tok != kPadToken && tok != kUnkToken) {
      ranked.emplace_back(tok, n);
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > max_size) ranked.resize(max_size);

  std::vector<std::string> tokens{std::string(kPadToken),
                                  std::string(kUnkToken)};
  tokens.reserve(ranked.size() + 2);
  for (const auto& [tok, n] : ranked) tokens.emplace_back(tok);
  return from_tokens(std::move(tokens), min_count, max_size);
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> Vocabulary::encode(const TokenSeq& tokens) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(index_of(t));
  return ids;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = fnv1a64("");
  for (const auto& t : tokens_) {
    h = fnv1a64(t, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

std::string hash_to_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write vocabulary: " + path);
  out << kVocabMagic << ' ' << tokens_.size() << ' ' << min_count_ << ' '
      << max_size_ << '\n';
  for (const auto& t : tokens_) out << t << '\n';
  if (!out) throw DataError("write error on vocabulary: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open vocabulary: " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic;
  std::size_t size = 0, min_count = 0, max_size = 0;
  if (!(hs >> magic >> size >> min_count >> max_size) || magic != kVocabMagic) {
    throw DataError("bad vocabulary header in " + path);
  }
  std::vector<std::string> tokens;
  tokens.reserve(size);
  std::string line;
  while (tokens.size() < size && std::getline(in, line)) {
    tokens.push_back(line);
  }
  if (tokens.size() != size) {
    throw DataError("truncated vocabulary file " + path);
  }
  return from_tokens(std::move(tokens), min_count, max_size);
}

std::size_t EmbeddingMatrix::pretrained_rows() const {
  return static_cast<std::size_t>(
      std::count(source.begin(), source.end(), RowSource::kPretrained));
}

EmbeddingMatrix random_embeddings(const Vocabulary& vocab, std::size_t dim,
                                  std::uint64_t seed) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  EmbeddingMatrix m;
  m.rows = vocab.size();
  m.dim = dim;
  m.values.assign(m.rows * dim, 0.0f);
  m.source.assign(m.rows, RowSource::kRandomInit);
  m.source[Vocabulary::kPad] = RowSource::kPadding;
  Rng rng(seed);
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (r == Vocabulary::kPad) continue;
    for (std::size_t c = 0; c < dim; ++c) {
      m.values[r * dim + c] = static_cast<float>(
          uniform(rng, -kEmbeddingInitRange, kEmbeddingInitRange));
    }
  }
  return m;
}

EmbeddingMatrix load_embeddings(const std::string& path, const Vocabulary& vocab,
                                std::size_t dim, std::uint64_t seed) {
  EmbeddingMatrix m = random_embeddings(vocab, dim, seed);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open embedding file: " + path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<float> row(dim);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view rest(line);
    const auto sp = rest.find(' ');
    const std::string_view word = rest.substr(0, sp);
    rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
    std::size_t count = 0;
    while (!rest.empty()) {
      const auto next = rest.find(' ');
      const std::string_view field = rest.substr(0, next);
      rest = next == std::string_view::npos ? std::string_view{}
                                            : rest.substr(next + 1);
      if (field.empty()) continue;
      float v = 0.0f;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": bad number '" + std::string(field) + "'");
      }
      if (count < dim) row[count] = v;
      ++count;
    }
    if (count != dim) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(dim) + " values, found " +
                      std::to_string(count));
    }
    const auto id = vocab.find(word);
    if (!id || *id == Vocabulary::kPad || *id == Vocabulary::kUnk) continue;
    std::copy(row.begin(), row.end(), m.values.begin() + *id * dim);
    m.source[*id] = RowSource::kPretrained;
  }
  return m;
}

}  // namespace sensboot
