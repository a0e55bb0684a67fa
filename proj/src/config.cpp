#include "sensboot/config.hpp"

#include <charconv>
#include <filesystem>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sensboot/error.hpp"
#include "sensboot/seed.hpp"

namespace sensboot {

namespace fs = std::filesystem;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "global.seed", "global.out_dir", "global.threads",
      "corpus.path", "corpus.format",
      "blacklist.path",
      "ranking.low", "ranking.high",
      "stage1.n_per_class",
      "stage2.p_high", "stage2.p_low", "stage2.sensitive_quota",
      "stage2.model_fraction", "stage2.nonsensitive_quota", "stage2.checkpoint",
      "split.train", "split.dev", "split.test",
      "train.learning_rate", "train.weight_decay", "train.dropout",
      "train.batch_size", "train.epochs", "train.max_seq_len", "train.hidden",
      "train.dim", "train.min_count", "train.max_vocab",
      "embeddings.path",
      "labels.sensitive", "labels.nonsensitive"};
  return keys;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

std::set<std::string> parse_list(const std::string& text) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    auto item = trim(text.substr(start, comma == std::string::npos ? std::string::npos
                                                                   : comma - start));
    if (!item.empty()) out.insert(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path.lexically_normal().string();
  return (fs::path(base_dir) / path).lexically_normal().string();
}

bool is_path_key(const std::string& key) {
  return key.ends_with(".path") || key == "global.out_dir" || key == "stage2.checkpoint";
}

}  // namespace

std::uint64_t PipelineConfig::stage1_seed() const { return derive_seed(seed, "stage1"); }
std::uint64_t PipelineConfig::split_seed() const { return derive_seed(seed, "split"); }

Stage2Config PipelineConfig::stage2() const {
  Stage2Config c;
  c.p_high = stage2_p_high;
  c.p_low = stage2_p_low;
  c.sensitive_quota = stage2_sensitive_quota;
  c.model_fraction = stage2_model_fraction;
  c.nonsensitive_quota = stage2_nonsensitive_quota;
  c.seed = derive_seed(seed, "stage2");
  return c;
}

TrainConfig PipelineConfig::train_config() const {
  TrainConfig c = train;
  c.seed = derive_seed(seed, "train");
  return c;
}

SplitSpec PipelineConfig::split_spec() const {
  SplitSpec s = split;
  s.seed = split_seed();
  return s;
}

void PipelineConfig::validate() const {
  if (!(rank_low >= 0.0 && rank_low < rank_high && rank_high <= 1.0)) {
    throw ConfigError("ranking thresholds must satisfy 0 <= low < high <= 1");
  }
  if (stage1_n_per_class == 0) throw ConfigError("stage1.n_per_class must be positive");
  stage2().validate();
  split.validate();
  train.validate();
  if (threads < 0) throw ConfigError("global.threads must be >= 0");
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " is not configured");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw ConfigError(what + " not found: " + path);
  }
}

PipelineConfig config_from_entries(const std::map<std::string, std::string>& entries,
                                   const std::string& base_dir) {
  PipelineConfig c;
  for (const auto& [key, raw] : entries) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    const std::string v = trim(raw);
    if (key == "global.seed") c.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "global.out_dir") c.out_dir = resolve(base_dir, v);
    else if (key == "global.threads") c.threads = parse_number<int>(key, v);
    else if (key == "corpus.path") c.corpus_path = resolve(base_dir, v);
    else if (key == "corpus.format") c.corpus_format = parse_corpus_format(v);
    else if (key == "blacklist.path") c.blacklist_path = resolve(base_dir, v);
    else if (key == "ranking.low") c.rank_low = parse_number<double>(key, v);
    else if (key == "ranking.high") c.rank_high = parse_number<double>(key, v);
    else if (key == "stage1.n_per_class") c.stage1_n_per_class = parse_number<std::size_t>(key, v);
    else if (key == "stage2.p_high") c.stage2_p_high = parse_number<double>(key, v);
    else if (key == "stage2.p_low") c.stage2_p_low = parse_number<double>(key, v);
    else if (key == "stage2.sensitive_quota") c.stage2_sensitive_quota = parse_number<std::size_t>(key, v);
    else if (key == "stage2.model_fraction") c.stage2_model_fraction = parse_number<double>(key, v);
    else if (key == "stage2.nonsensitive_quota") c.stage2_nonsensitive_quota = parse_number<std::size_t>(key, v);
    else if (key == "stage2.checkpoint") c.stage2_checkpoint = resolve(base_dir, v);
    else if (key == "split.train") c.split.train_frac = parse_number<double>(key, v);
    else if (key == "split.dev") c.split.dev_frac = parse_number<double>(key, v);
    else if (key == "split.test") c.split.test_frac = parse_number<double>(key, v);
    else if (key == "train.learning_rate") c.train.learning_rate = parse_number<double>(key, v);
    else if (key == "train.weight_decay") c.train.weight_decay = parse_number<double>(key, v);
    else if (key == "train.dropout") c.train.dropout_rate = parse_number<double>(key, v);
    else if (key == "train.batch_size") c.train.batch_size = parse_number<std::size_t>(key, v);
    else if (key == "train.epochs") c.train.epochs = parse_number<std::size_t>(key, v);
    else if (key == "train.max_seq_len") c.train.max_seq_len = parse_number<std::size_t>(key, v);
    else if (key == "train.hidden") c.train.hidden = parse_number<std::size_t>(key, v);
    else if (key == "train.dim") c.train.dim = parse_number<std::size_t>(key, v);
    else if (key == "train.min_count") c.train.min_count = parse_number<std::size_t>(key, v);
    else if (key == "train.max_vocab") c.train.max_vocab = parse_number<std::size_t>(key, v);
    else if (key == "embeddings.path") {
      c.embeddings_path = v.empty() ? std::nullopt
                                    : std::optional<std::string>(resolve(base_dir, v));
    }
  }
  auto s = entries.find("labels.sensitive");
  auto n = entries.find("labels.nonsensitive");
  if (s != entries.end() || n != entries.end()) {
    c.labels = LabelMapping(s != entries.end() ? parse_list(s->second)
                                               : std::set<std::string>{"sensitive"},
                            n != entries.end() ? parse_list(n->second)
                                               : std::set<std::string>{"nonsensitive"});
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::string& path,
                           const std::map<std::string, std::string>& overrides) {
  require_file(path, "config file");
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  std::map<std::string, std::string> entries;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config key '" + section + "' must be inside a [section]");
    }
    for (const auto& [key, value] : body) {
      entries[section + "." + key] = value.get_value<std::string>();
    }
  }
  // File paths are relative to the config file; override paths to the cwd.
  const std::string base_dir = fs::path(path).parent_path().string();
  for (auto& [key, value] : entries) {
    if (is_path_key(key)) value = resolve(base_dir, trim(value));
  }
  for (const auto& [key, value] : overrides) entries[key] = value;
  auto c = config_from_entries(entries, "");
  return c;
}

}  // namespace sensboot
