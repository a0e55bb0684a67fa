#include "sensboot/blacklist.hpp"

#include <algorithm>
#include <fstream>

#include "sensboot/error.hpp"

namespace sensboot {

namespace {

std::string normalize_entry(const std::string& raw, const std::string& where) {
  TokenSeq tokens = tokenize(raw);
  if (tokens.size() > 1) {
    throw ConfigError("blacklist entry at " + where +
                      " has more than one token: '" + raw + "'");
  }
  if (tokens.empty()) {
    throw ConfigError("blacklist entry at " + where +
                      " is empty after normalization: '" + raw + "'");
  }
  return std::move(tokens.front());
}

}  // namespace

Blacklist::Blacklist(const std::vector<std::string>& entries,
                     std::string source)
    : source_(std::move(source)) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries_.insert(normalize_entry(entries[i], "entry " + std::to_string(i + 1)));
  }
  if (entries_.empty()) throw ConfigError("blacklist is empty: " + source_);
}

std::vector<std::string> Blacklist::sorted_entries() const {
  std::vector<std::string> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end());
  return out;
}

Blacklist load_blacklist(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open blacklist: " + path);
  std::vector<std::string> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string::npos || line[first] == '#') continue;
    // Validate here so errors carry the file line number.
    normalize_entry(line, path + ":" + std::to_string(lineno));
    entries.push_back(line);
  }
  if (entries.empty()) throw ConfigError("blacklist is empty: " + path);
  return Blacklist(entries, path);
}

std::size_t count_matches(const TokenSeq& tokens, const Blacklist& bl) {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(),
                    [&](const std::string& t) { return bl.contains(t); }));
}

bool contains_match(const TokenSeq& tokens, const Blacklist& bl) {
  return std::any_of(tokens.begin(), tokens.end(),
                     [&](const std::string& t) { return bl.contains(t); });
}

}  // namespace sensboot
