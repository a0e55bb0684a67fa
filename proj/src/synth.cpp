#include "sensboot/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sensboot/error.hpp"
#include "sensboot/seed.hpp"

namespace sensboot {

namespace {

enum class ForumKind { kToxic, kMixed, kClean };

std::string numbered(const char* prefix, std::size_t i, int width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

std::vector<std::string> word_group(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(numbered(prefix, i, 2));
  return out;
}

const std::string& pick(const std::vector<std::string>& words, Rng& rng) {
  return words[uniform_index(rng, words.size())];
}

struct Lexicon {
  std::vector<std::string> blacklist;
  std::vector<std::vector<std::string>> implicit;  // per sensitive sub-class
  std::vector<std::vector<std::string>> topics;    // per theme
  std::vector<std::string> neutral;
};

Lexicon make_lexicon(const SynthSpec& spec) {
  Lexicon lex;
  lex.blacklist = word_group("blk", spec.blacklist_words);
  for (const char* cls : kSynthSensitiveClasses) {
    lex.implicit.push_back(word_group(cls, spec.implicit_words_per_class));
  }
  for (std::size_t t = 0; t < spec.themes; ++t) {
    lex.topics.push_back(word_group((numbered("topic", t, 1) + "x").c_str(),
                                    spec.topic_words_per_theme));
  }
  lex.neutral.reserve(spec.neutral_words);
  for (std::size_t i = 0; i < spec.neutral_words; ++i) {
    lex.neutral.push_back(numbered("w", i, 3));
  }
  return lex;
}

// Tokens of one utterance. `sensitive_class` < 0 means nonsensitive.
std::string compose(const SynthSpec& spec, const Lexicon& lex, std::size_t theme,
                    int sensitive_class, bool with_blacklist, Rng& rng) {
  const std::size_t length =
      spec.min_length + uniform_index(rng, spec.max_length - spec.min_length + 1);
  std::vector<std::string> words;
  words.reserve(length);
  if (sensitive_class >= 0) {
    const auto& pool = lex.implicit[static_cast<std::size_t>(sensitive_class)];
    const std::size_t n_implicit = 2 + uniform_index(rng, 2);
    for (std::size_t i = 0; i < n_implicit; ++i) words.push_back(pick(pool, rng));
  }
  if (with_blacklist) words.push_back(pick(lex.blacklist, rng));
  const std::size_t n_topic = 2 + uniform_index(rng, 3);
  for (std::size_t i = 0; i < n_topic && words.size() < length; ++i) {
    words.push_back(pick(lex.topics[theme], rng));
  }
  while (words.size() < length) words.push_back(pick(lex.neutral, rng));
  seeded_shuffle(words.begin(), words.end(), rng);
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) text += ' ';
    text += words[i];
  }
  // Sentence-final punctuation exercises the tokenizer's edge stripping.
  text += uniform_index(rng, 4) == 0 ? "!" : ".";
  return text;
}

std::vector<float> embedding_for(std::size_t group, std::size_t dim, Rng& rng) {
  // Group centroids are fixed axis-aligned directions plus shared noise.
  std::vector<float> v(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    double x = uniform(rng, -0.1, 0.1);
    if (k == group % dim) x += 0.5;
    v[k] = static_cast<float>(x);
  }
  return v;
}

}  // namespace

double SynthData::overlap_fraction() const {
  return test_sensitive_count == 0
             ? 0.0
             : static_cast<double>(test_overlap_count) /
                   static_cast<double>(test_sensitive_count);
}

SynthData generate_synthetic(const SynthSpec& spec) {
  if (spec.forums == 0 || spec.toxic_forums + spec.mixed_forums > spec.forums) {
    throw ConfigError("synthetic spec: forum kinds exceed forum count");
  }
  if (spec.themes == 0) throw ConfigError("synthetic spec: themes must be positive");
  if (spec.min_length < 6 || spec.max_length < spec.min_length) {
    throw ConfigError("synthetic spec: utterance length range must start at 6 or more");
  }
  if (!(spec.test_overlap >= 0.0 && spec.test_overlap <= 1.0)) {
    throw ConfigError("synthetic spec: test_overlap must be in [0,1]");
  }
  const Lexicon lex = make_lexicon(spec);
  const std::size_t n_classes = lex.implicit.size();
  SynthData data;
  data.blacklist = lex.blacklist;

  // Forum kinds are assigned to shuffled forum indices.
  std::vector<ForumKind> kind(spec.forums, ForumKind::kClean);
  {
    std::vector<std::size_t> order(spec.forums);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(spec.seed, "synth-forums"));
    seeded_shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < spec.toxic_forums; ++i) kind[order[i]] = ForumKind::kToxic;
    for (std::size_t i = 0; i < spec.mixed_forums; ++i) {
      kind[order[spec.toxic_forums + i]] = ForumKind::kMixed;
    }
  }
  // The i-th forum of each kind gets theme i mod themes.
  std::vector<std::size_t> theme(spec.forums);
  {
    std::size_t seen[3] = {0, 0, 0};
    for (std::size_t f = 0; f < spec.forums; ++f) {
      theme[f] = seen[static_cast<int>(kind[f])]++ % spec.themes;
    }
  }
  std::vector<std::string> forum_names;
  for (std::size_t f = 0; f < spec.forums; ++f) {
    forum_names.push_back(numbered("forum", f, 2));
    auto& bucket = kind[f] == ForumKind::kToxic   ? data.toxic_forums
                   : kind[f] == ForumKind::kMixed ? data.mixed_forums
                                                  : data.clean_forums;
    bucket.push_back(forum_names.back());
  }

  {
    Rng rng(derive_seed(spec.seed, "synth-corpus"));
    data.corpus.reserve(spec.utterances);
    for (std::size_t i = 0; i < spec.utterances; ++i) {
      const std::size_t forum = uniform_index(rng, spec.forums);
      const double rate = kind[forum] == ForumKind::kToxic   ? spec.toxic_rate
                          : kind[forum] == ForumKind::kMixed ? spec.mixed_rate
                                                             : spec.clean_rate;
      const bool sensitive = uniform01(rng) < rate;
      const int cls = sensitive ? static_cast<int>(uniform_index(rng, n_classes)) : -1;
      const bool with_bl = sensitive && uniform01(rng) < spec.corpus_blacklist_rate;
      Utterance u;
      u.id = numbered("c", i, 6);
      u.forum = forum_names[forum];
      u.text = compose(spec, lex, theme[forum], cls, with_bl, rng);
      data.corpus.push_back(std::move(u));
    }
  }

  {
    Rng rng(derive_seed(spec.seed, "synth-testset"));
    const std::size_t n_s = spec.test_sensitive;
    const auto n_overlap =
        static_cast<std::size_t>(std::llround(spec.test_overlap * static_cast<double>(n_s)));
    const std::size_t n_fp = std::min(spec.test_false_positives, spec.test_nonsensitive);
    // The first n_overlap sensitive and first n_fp nonsensitive slots get a
    // blacklist word; the final order is shuffled.
    std::vector<Utterance> items;
    for (std::size_t i = 0; i < n_s; ++i) {
      const std::size_t cls = i % n_classes;
      Utterance u;
      const std::size_t forum = uniform_index(rng, spec.forums);
      u.forum = forum_names[forum];
      u.text = compose(spec, lex, theme[forum], static_cast<int>(cls), i < n_overlap, rng);
      u.gold_label = kSynthSensitiveClasses[cls];
      items.push_back(std::move(u));
    }
    for (std::size_t i = 0; i < spec.test_nonsensitive; ++i) {
      Utterance u;
      const std::size_t forum = uniform_index(rng, spec.forums);
      u.forum = forum_names[forum];
      u.text = compose(spec, lex, theme[forum], -1, i < n_fp, rng);
      u.gold_label = kSynthNonsensitiveClass;
      items.push_back(std::move(u));
    }
    seeded_shuffle(items.begin(), items.end(), rng);
    for (std::size_t i = 0; i < items.size(); ++i) items[i].id = numbered("t", i, 5);
    data.testset = std::move(items);
    data.test_overlap_count = n_overlap;
    data.test_sensitive_count = n_s;
    data.test_false_positive_count = n_fp;
  }

  {
    Rng rng(derive_seed(spec.seed, "synth-embeddings"));
    auto add_group = [&](const std::vector<std::string>& words, std::size_t group) {
      for (const auto& w : words) {
        if (uniform01(rng) >= spec.embedding_coverage) continue;
        data.embeddings.emplace_back(w, embedding_for(group, spec.embedding_dim, rng));
      }
    };
    // Group 0: explicit and implicit sensitive words share a direction.
    add_group(lex.blacklist, 0);
    for (const auto& words : lex.implicit) add_group(words, 0);
    add_group(lex.neutral, 1);
    for (std::size_t f = 0; f < lex.topics.size(); ++f) add_group(lex.topics[f], 2 + f);
  }
  return data;
}

void write_synthetic(const std::string& dir, const SynthData& data) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir + ": " + ec.message());
  const fs::path base(dir);
  write_corpus((base / "corpus.jsonl").string(), CorpusFormat::kJsonl, data.corpus);
  write_corpus((base / "testset.jsonl").string(), CorpusFormat::kJsonl, data.testset);
  {
    std::ofstream f(base / "blacklist.txt", std::ios::binary);
    f << "# synthetic placeholder blacklist\n";
    for (const auto& w : data.blacklist) f << w << "\n";
    if (!f) throw DataError("cannot write blacklist under " + dir);
  }
  {
    std::ofstream f(base / "embeddings.txt", std::ios::binary);
    char buf[32];
    for (const auto& [word, vec] : data.embeddings) {
      f << word;
      for (float x : vec) {
        std::snprintf(buf, sizeof buf, " %.6f", static_cast<double>(x));
        f << buf;
      }
      f << "\n";
    }
    if (!f) throw DataError("cannot write embeddings under " + dir);
  }
}

}  // namespace sensboot
