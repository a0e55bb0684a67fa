#include "sensboot/ranking.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "sensboot/error.hpp"

namespace sensboot {

bool ranks_before(const ForumScore& a, const ForumScore& b) {
  // a.h / a.t > b.h / b.t  <=>  a.h * b.t > b.h * a.t, with empty forums at 0/1.
  const unsigned __int128 at = a.total_tokens == 0 ? 1 : a.total_tokens;
  const unsigned __int128 bt = b.total_tokens == 0 ? 1 : b.total_tokens;
  const unsigned __int128 ah = a.total_tokens == 0 ? 0 : a.blacklist_hits;
  const unsigned __int128 bh = b.total_tokens == 0 ? 0 : b.blacklist_hits;
  const unsigned __int128 lhs = ah * bt;
  const unsigned __int128 rhs = bh * at;
  if (lhs != rhs) return lhs > rhs;
  return a.forum < b.forum;
}

void sort_scores(std::vector<ForumScore>& scores) {
  std::sort(scores.begin(), scores.end(), ranks_before);
}

void ForumTally::add(std::string_view forum, const TokenSeq& tokens,
                     const Blacklist& bl) {
  add(forum, count_matches(tokens, bl), tokens.size());
}

void ForumTally::add(std::string_view forum, std::uint64_t hits,
                     std::uint64_t tokens) {
  if (forum.empty()) return;
  auto it = counts_.find(std::string(forum));
  if (it == counts_.end()) it = counts_.emplace(std::string(forum), Counts{}).first;
  it->second.hits += hits;
  it->second.tokens += tokens;
}

void ForumTally::merge(const ForumTally& other) {
  for (const auto& [forum, c] : other.counts_) {
    auto& mine = counts_[forum];
    mine.hits += c.hits;
    mine.tokens += c.tokens;
  }
}

std::vector<ForumScore> ForumTally::scores() const {
  std::vector<ForumScore> out;
  out.reserve(counts_.size());
  for (const auto& [forum, c] : counts_) {
    out.push_back({forum, c.hits, c.tokens});
  }
  sort_scores(out);
  return out;
}

std::vector<ForumScore> score_forums_serial(const std::vector<Utterance>& corpus,
                                            const Blacklist& bl) {
  ForumTally tally;
  for (const auto& u : corpus) tally.add(u.forum, tokenize(u.text), bl);
  return tally.scores();
}

std::vector<ForumScore> score_forums(const std::vector<Utterance>& corpus,
                                     const Blacklist& bl) {
  ForumTally total;
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel
  {
    ForumTally local;
#pragma omp for schedule(dynamic, 512) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& u = corpus[static_cast<std::size_t>(i)];
      if (!u.forum.empty()) local.add(u.forum, tokenize(u.text), bl);
    }
#pragma omp critical(sensboot_forum_merge)
    total.merge(local);
  }
  return total.scores();
}

std::vector<ForumScore> score_forums(const std::vector<Utterance>& corpus,
                                     const std::vector<TokenSeq>& tokens,
                                     const Blacklist& bl) {
  if (tokens.size() != corpus.size()) {
    throw DataError("token sequences do not match corpus size");
  }
  ForumTally total;
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel
  {
    ForumTally local;
#pragma omp for schedule(dynamic, 512) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      local.add(corpus[k].forum, tokens[k], bl);
    }
#pragma omp critical(sensboot_forum_merge)
    total.merge(local);
  }
  return total.scores();
}

std::string_view to_string(Pool pool) {
  switch (pool) {
    case Pool::kSensitive: return "sensitive";
    case Pool::kNonsensitive: return "nonsensitive";
    case Pool::kExcluded: return "excluded";
    case Pool::kUnscored: return "unscored";
  }
  return "unscored";
}

Pool ForumPartition::pool_of(std::string_view forum) const {
  if (sensitive_forums.count(forum)) return Pool::kSensitive;
  if (nonsensitive_forums.count(forum)) return Pool::kNonsensitive;
  if (excluded_forums.count(forum)) return Pool::kExcluded;
  return Pool::kUnscored;
}

ForumPartition partition_forums(const std::vector<ForumScore>& scores,
                                double low, double high) {
  if (!(low >= 0.0 && low < high && high <= 1.0)) {
    throw ConfigError("ranking thresholds must satisfy 0 <= low < high <= 1");
  }
  ForumPartition p;
  p.low_threshold = low;
  p.high_threshold = high;
  for (const auto& s : scores) {
    const double d = s.density();
    if (d < low) {
      p.nonsensitive_forums.insert(s.forum);
    } else if (d > high) {
      p.sensitive_forums.insert(s.forum);
    } else {
      p.excluded_forums.insert(s.forum);
    }
  }
  return p;
}

std::string format_forum_report(const std::vector<ForumScore>& scores) {
  std::string out;
  char buf[64];
  for (const auto& s : scores) {
    if (s.forum.find_first_of("\t\r\n") != std::string::npos) {
      throw DataError("forum name contains a tab or newline: " + s.forum);
    }
    std::snprintf(buf, sizeof buf, "%.10f", s.density());
    out += s.forum;
    out += '\t';
    out += std::to_string(s.blacklist_hits);
    out += '\t';
    out += std::to_string(s.total_tokens);
    out += '\t';
    out += buf;
    out += '\n';
  }
  return out;
}

void write_forum_report(const std::string& path,
                        const std::vector<ForumScore>& scores) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write forum report: " + path);
  out << format_forum_report(scores);
  if (!out) throw DataError("write error on forum report: " + path);
}

std::vector<ForumScore> read_forum_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open forum report: " + path);
  std::vector<ForumScore> scores;
  std::string line;
  std::size_t lineno = 0;
  auto parse_u64 = [&](std::string_view field) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": bad integer field '" + std::string(field) + "'");
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != 4) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected 4 tab-separated fields");
    }
    ForumScore s{std::string(fields[0]), parse_u64(fields[1]),
                 parse_u64(fields[2])};
    if (s.blacklist_hits > s.total_tokens) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": blacklist hits exceed total tokens");
    }
    scores.push_back(std::move(s));
  }
  sort_scores(scores);
  return scores;
}

std::string format_partition_summary(const ForumPartition& p) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", p.low_threshold);
  out << "low_threshold\t" << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.6g", p.high_threshold);
  out << "high_threshold\t" << buf << '\n';
  out << "sensitive_forums\t" << p.sensitive_forums.size() << '\n';
  out << "nonsensitive_forums\t" << p.nonsensitive_forums.size() << '\n';
  out << "excluded_forums\t" << p.excluded_forums.size() << '\n';
  auto list = [&](const char* name, const auto& set) {
    for (const auto& f : set) out << name << '\t' << f << '\n';
  };
  list("sensitive", p.sensitive_forums);
  list("nonsensitive", p.nonsensitive_forums);
  list("excluded", p.excluded_forums);
  return out.str();
}

}  // namespace sensboot
