#include "sensboot/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "sensboot/error.hpp"
#include "sensboot/seed.hpp"
#include "unicode.hpp"

namespace sensboot {

namespace {

constexpr std::size_t kMaxReportedSkips = 8;

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::optional<Utterance> parse_jsonl(std::string_view line,
                                     std::string* reason) {
  auto fail = [&](const char* why) -> std::optional<Utterance> {
    if (reason) *reason = why;
    return std::nullopt;
  };
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return fail("invalid json");

  Utterance u;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string()) return fail("missing id");
  u.id = id->get<std::string>();
  if (u.id.empty()) return fail("empty id");

  auto text = j.find("text");
  if (text == j.end() || !text->is_string()) return fail("missing text");
  u.text = text->get<std::string>();

  if (auto forum = j.find("forum"); forum != j.end() && !forum->is_null()) {
    if (!forum->is_string()) return fail("bad forum");
    u.forum = forum->get<std::string>();
  }
  if (auto label = j.find("label"); label != j.end() && !label->is_null()) {
    if (!label->is_string()) return fail("bad label");
    u.gold_label = label->get<std::string>();
  }
  return u;
}

std::optional<Utterance> parse_tsv(std::string_view line, std::string* reason) {
  std::array<std::string_view, 3> head;
  for (auto& field : head) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      if (reason) *reason = "missing text";
      return std::nullopt;
    }
    field = line.substr(0, tab);
    line.remove_prefix(tab + 1);
  }
  if (head[0].empty()) {
    if (reason) *reason = "empty id";
    return std::nullopt;
  }
  Utterance u;
  u.id = std::string(head[0]);
  u.forum = std::string(head[1]);
  if (head[2] != "-") u.gold_label = std::string(head[2]);
  u.text = std::string(line);
  return u;
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view tag) {
  if (tag == "jsonl") return CorpusFormat::kJsonl;
  if (tag == "tsv") return CorpusFormat::kTsv;
  throw ConfigError("unknown corpus format '" + std::string(tag) +
                    "' (expected jsonl or tsv)");
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::kJsonl ? "jsonl" : "tsv";
}

std::optional<Utterance> parse_record(std::string_view line,
                                      CorpusFormat format,
                                      std::string* reason) {
  line = strip_cr(line);
  if (line.empty()) {
    if (reason) *reason = "blank line";
    return std::nullopt;
  }
  return format == CorpusFormat::kJsonl ? parse_jsonl(line, reason)
                                        : parse_tsv(line, reason);
}

ReadStats read_corpus(const std::string& path, CorpusFormat format,
                      const std::function<void(Utterance&&)>& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);

  ReadStats stats;
  std::unordered_set<std::string> seen;
  std::string line;
  std::string reason;
  while (std::getline(in, line)) {
    ++stats.lines;
    auto u = parse_record(line, format, &reason);
    if (u && !seen.insert(u->id).second) {
      u.reset();
      reason = "duplicate id";
    }
    if (!u) {
      ++stats.skipped;
      ++stats.skip_reasons[reason];
      if (stats.first_skipped_lines.size() < kMaxReportedSkips) {
        stats.first_skipped_lines.push_back(stats.lines);
      }
      continue;
    }
    ++stats.records;
    sink(std::move(*u));
  }
  if (in.bad()) throw DataError("read error on corpus file: " + path);
  return stats;
}

Corpus read_corpus(const std::string& path, CorpusFormat format) {
  Corpus corpus;
  corpus.stats = read_corpus(path, format, [&](Utterance&& u) {
    corpus.utterances.push_back(std::move(u));
  });
  return corpus;
}

std::string format_record(const Utterance& u, CorpusFormat format) {
  if (format == CorpusFormat::kJsonl) {
    nlohmann::json j;
    j["id"] = u.id;
    j["text"] = u.text;
    j["forum"] = u.forum;
    if (u.gold_label) j["label"] = *u.gold_label;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  }
  auto bad = [](std::string_view s, bool allow_tab) {
    return s.find('\n') != std::string_view::npos ||
           s.find('\r') != std::string_view::npos ||
           (!allow_tab && s.find('\t') != std::string_view::npos);
  };
  if (u.id.empty() || bad(u.id, false) || bad(u.forum, false) ||
      (u.gold_label && (bad(*u.gold_label, false) || u.gold_label->empty() ||
                        *u.gold_label == "-")) ||
      bad(u.text, true)) {
    throw DataError("record '" + u.id + "' cannot be represented as tsv");
  }
  std::string out = u.id;
  out += '\t';
  out += u.forum;
  out += '\t';
  out += u.gold_label ? *u.gold_label : "-";
  out += '\t';
  out += u.text;
  return out;
}

void write_corpus(const std::string& path, CorpusFormat format,
                  const std::vector<Utterance>& utterances) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const auto& u : utterances) {
    out << format_record(u, format) << '\n';
  }
  if (!out) throw DataError("write error on corpus file: " + path);
}

TokenSeq tokenize(std::string_view text) {
  const std::u32string cps = unicode::decode_utf8(text);
  TokenSeq tokens;
  std::size_t i = 0;
  const std::size_t n = cps.size();
  while (i < n) {
    while (i < n && unicode::is_whitespace(cps[i])) ++i;
    std::size_t begin = i;
    while (i < n && !unicode::is_whitespace(cps[i])) ++i;
    std::size_t end = i;
    while (begin < end && unicode::is_punctuation(cps[begin])) ++begin;
    while (end > begin && unicode::is_punctuation(cps[end - 1])) --end;
    if (begin == end) continue;
    std::string token;
    token.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) {
      unicode::append_utf8(token, unicode::to_lower(cps[k]));
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::vector<TokenSeq> tokenize_all_serial(
    const std::vector<Utterance>& utterances) {
  std::vector<TokenSeq> out;
  out.reserve(utterances.size());
  for (const auto& u : utterances) out.push_back(tokenize(u.text));
  return out;
}

std::vector<TokenSeq> tokenize_all(const std::vector<Utterance>& utterances) {
  std::vector<TokenSeq> out(utterances.size());
  const auto n = static_cast<std::ptrdiff_t>(utterances.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        tokenize(utterances[static_cast<std::size_t>(i)].text);
  }
  return out;
}

std::string_view to_string(BinaryLabel label) {
  return label == BinaryLabel::kSensitive ? "sensitive" : "nonsensitive";
}

BinaryLabel parse_binary_label(std::string_view name) {
  if (name == "sensitive") return BinaryLabel::kSensitive;
  if (name == "nonsensitive") return BinaryLabel::kNonsensitive;
  throw DataError("unknown binary label '" + std::string(name) + "'");
}

LabelMapping::LabelMapping(std::set<std::string> sensitive,
                           std::set<std::string> nonsensitive)
    : sensitive_(sensitive.begin(), sensitive.end()),
      nonsensitive_(nonsensitive.begin(), nonsensitive.end()) {
  for (const auto& c : sensitive_) {
    if (nonsensitive_.count(c)) {
      throw ConfigError("label class '" + c +
                        "' is mapped to both sensitive and nonsensitive");
    }
  }
}

LabelMapping LabelMapping::identity() {
  return LabelMapping({"sensitive"}, {"nonsensitive"});
}

LabelMapping LabelMapping::toxic_comments() {
  return LabelMapping({"toxic", "severe_toxic", "obscene", "threat", "insult",
                       "identity_hate"},
                      {"non_toxic"});
}

LabelMapping LabelMapping::twitter() {
  return LabelMapping({"Hate", "Offensive"}, {"Neither"});
}

bool LabelMapping::contains(std::string_view gold_label) const {
  return sensitive_.count(gold_label) || nonsensitive_.count(gold_label);
}

BinaryLabel LabelMapping::collapse(std::string_view gold_label) const {
  if (sensitive_.count(gold_label)) return BinaryLabel::kSensitive;
  if (nonsensitive_.count(gold_label)) return BinaryLabel::kNonsensitive;
  throw DataError("unknown label class '" + std::string(gold_label) + "'");
}

void SplitSpec::validate() const {
  for (double f : {train_frac, dev_frac, test_frac}) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw ConfigError("split fractions must lie in [0,1]");
    }
  }
  if (std::abs(train_frac + dev_frac + test_frac - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  const std::array<double, 3> fracs{spec.train_frac, spec.dev_frac,
                                    spec.test_frac};
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double raw = static_cast<double>(n) * fracs[k];
    // Products like 100 * 0.29 land a hair below the integer they denote.
    const double floored = std::floor(raw + 1e-9);
    sizes[k] = static_cast<std::size_t>(floored);
    remainders[k] = std::max(0.0, raw - floored);
    assigned += sizes[k];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
    ++sizes[order[k]];
    ++assigned;
  }
  return sizes;
}

SplitResult split_dataset(const std::vector<Utterance>& utterances,
                          const SplitSpec& spec) {
  const auto sizes = split_sizes(utterances.size(), spec);

  struct Keyed {
    std::uint64_t key;
    std::size_t index;
  };
  std::vector<Keyed> keyed(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    keyed[i] = {keyed_hash(spec.seed, utterances[i].id), i};
  }
  std::sort(keyed.begin(), keyed.end(), [&](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key < b.key;
    return utterances[a.index].id < utterances[b.index].id;
  });

  std::vector<std::uint8_t> part(utterances.size());
  for (std::size_t r = 0; r < keyed.size(); ++r) {
    part[keyed[r].index] = r < sizes[0] ? 0 : (r < sizes[0] + sizes[1] ? 1 : 2);
  }
  SplitResult result;
  result.train.reserve(sizes[0]);
  result.dev.reserve(sizes[1]);
  result.test.reserve(sizes[2]);
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    auto& dst = part[i] == 0 ? result.train
                             : (part[i] == 1 ? result.dev : result.test);
    dst.push_back(utterances[i]);
  }
  return result;
}

}  // namespace sensboot
