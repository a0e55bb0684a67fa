#include "sensboot/classifier.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sensboot/error.hpp"

namespace sensboot {

namespace {

constexpr std::string_view kMagic = "sensboot-checkpoint";

void put_le32(std::string& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

float get_le32(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

[[noreturn]] void corrupt(const std::string& path, const std::string& why) {
  throw NumericError("corrupt checkpoint " + path + ": " + why);
}

}  // namespace

Classifier::Classifier(Vocabulary vocab, Params<float> params)
    : vocab_(std::move(vocab)), params_(std::move(params)) {
  if (params_.shape().vocab != vocab_.size()) {
    throw ConfigError("model vocabulary size " +
                      std::to_string(params_.shape().vocab) +
                      " does not match vocabulary of size " +
                      std::to_string(vocab_.size()));
  }
}

ScoreResult Classifier::score_tokens(const TokenSeq& tokens) const {
  if (tokens.empty()) return {0.0, true};
  const auto ids = vocab_.encode(tokens);
  return {forward(params_, ids, Mode::kEval).p_sensitive, false};
}

ScoreResult Classifier::score(std::string_view text) const {
  return score_tokens(tokenize(text));
}

std::vector<ScoreResult> Classifier::score_batch_serial(
    const std::vector<TokenSeq>& batch) const {
  std::vector<ScoreResult> out;
  out.reserve(batch.size());
  for (const auto& t : batch) out.push_back(score_tokens(t));
  return out;
}

std::vector<ScoreResult> Classifier::score_batch(
    const std::vector<TokenSeq>& batch) const {
  std::vector<ScoreResult> out(batch.size());
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = score_tokens(batch[k]);
  }
  return out;
}

std::string vocab_path_for(const std::string& checkpoint_path) {
  return checkpoint_path + ".vocab";
}

void save_checkpoint(const std::string& path, const Classifier& model) {
  const auto& p = model.params();
  const auto& shape = p.shape();
  std::ostringstream manifest;
  manifest << kMagic << ' ' << kCheckpointVersion << '\n'
           << "dim " << shape.dim << '\n'
           << "hidden " << shape.hidden << '\n'
           << "max_seq_len " << shape.max_seq_len << '\n'
           << "vocab_size " << shape.vocab << '\n'
           << "vocab_hash " << hash_to_hex(model.vocab().hash()) << '\n'
           << "tensors " << kNumTensors << '\n';
  for (const auto& spec : p.layout.specs()) {
    manifest << "tensor " << spec.name << ' ' << spec.rows << ' ' << spec.cols
             << '\n';
  }
  manifest << "end\n";

  std::string payload;
  payload.reserve(p.values.size() * 4);
  for (float v : p.values) put_le32(payload, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << manifest.str();
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw DataError("write error on checkpoint: " + path);
  model.vocab().save(vocab_path_for(path));
}

Classifier load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());

  const auto end_marker = bytes.find("\nend\n");
  if (end_marker == std::string::npos) corrupt(path, "manifest not terminated");
  std::istringstream manifest(bytes.substr(0, end_marker + 1));
  const std::size_t payload_offset = end_marker + 5;

  std::string key;
  int version = 0;
  if (!(manifest >> key >> version) || key != kMagic) corrupt(path, "bad magic");
  if (version != kCheckpointVersion) {
    corrupt(path, "unsupported version " + std::to_string(version));
  }
  ModelShape shape;
  std::string vocab_hash;
  std::size_t n_tensors = 0;
  auto expect = [&](const char* name, auto& value) {
    if (!(manifest >> key >> value) || key != name) {
      corrupt(path, std::string("expected field '") + name + "'");
    }
  };
  expect("dim", shape.dim);
  expect("hidden", shape.hidden);
  expect("max_seq_len", shape.max_seq_len);
  expect("vocab_size", shape.vocab);
  expect("vocab_hash", vocab_hash);
  expect("tensors", n_tensors);
  if (n_tensors != kNumTensors) corrupt(path, "unexpected tensor count");

  Params<float> params;
  try {
    params = Params<float>(shape);
  } catch (const Error&) {
    corrupt(path, "invalid model shape");
  }
  for (const auto& spec : params.layout.specs()) {
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    if (!(manifest >> tag >> name >> rows >> cols) || tag != "tensor" ||
        name != spec.name || rows != spec.rows || cols != spec.cols) {
      corrupt(path, "tensor entry mismatch for " + spec.name);
    }
  }
  const std::size_t expected_bytes = params.values.size() * 4;
  if (bytes.size() - payload_offset != expected_bytes) {
    corrupt(path, "payload has " + std::to_string(bytes.size() - payload_offset) +
                      " bytes, expected " + std::to_string(expected_bytes));
  }
  const auto* data =
      reinterpret_cast<const unsigned char*>(bytes.data() + payload_offset);
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    params.values[i] = get_le32(data + 4 * i);
  }
  if (!params.all_finite()) corrupt(path, "non-finite parameter values");

  Vocabulary vocab = Vocabulary::load(vocab_path_for(path));
  if (hash_to_hex(vocab.hash()) != vocab_hash) {
    throw ConfigError("vocabulary " + vocab_path_for(path) +
                      " does not match checkpoint (hash " +
                      hash_to_hex(vocab.hash()) + " != " + vocab_hash + ")");
  }
  return Classifier(std::move(vocab), std::move(params));
}

}  // namespace sensboot
