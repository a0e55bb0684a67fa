#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sensboot/bilstm.hpp"
#include "sensboot/corpus.hpp"
#include "sensboot/vocab.hpp"

namespace sensboot {

struct ScoreResult {
  double p_sensitive = 0.0;
  // Set when the text has no tokens; p_sensitive is then 0.
  bool empty = false;
};

/// A trained model together with the vocabulary it was trained on.
class Classifier {
 public:
  Classifier(Vocabulary vocab, Params<float> params);

  const Vocabulary& vocab() const { return vocab_; }
  const Params<float>& params() const { return params_; }
  const ModelShape& shape() const { return params_.shape(); }

  /// Tokens are mapped through the vocabulary (UNK for unknown words) and
  /// run through the eval-mode forward pass.
  ScoreResult score_tokens(const TokenSeq& tokens) const;
  ScoreResult score(std::string_view text) const;

  std::vector<ScoreResult> score_batch(const std::vector<TokenSeq>& batch) const;
  std::vector<ScoreResult> score_batch_serial(
      const std::vector<TokenSeq>& batch) const;

 private:
  Vocabulary vocab_;
  Params<float> params_;
};

/// Writes `path` (text manifest followed by little-endian float32 tensors in
/// manifest order) and the vocabulary next to it at vocab_path_for(path).
void save_checkpoint(const std::string& path, const Classifier& model);

/// Throws NumericError for a corrupt or truncated checkpoint and ConfigError
/// when the vocabulary does not hash to the value recorded in the manifest.
Classifier load_checkpoint(const std::string& path);

std::string vocab_path_for(const std::string& checkpoint_path);

inline constexpr int kCheckpointVersion = 1;

}  // namespace sensboot
