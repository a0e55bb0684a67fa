#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sensboot/corpus.hpp"

namespace sensboot {

struct ModelShape {
  std::size_t vocab = 2;
  std::size_t dim = 300;
  std::size_t hidden = 128;
  std::size_t max_seq_len = 100;

  bool operator==(const ModelShape&) const = default;
};

enum class Direction : std::uint8_t { kForward = 0, kBackward = 1 };

// Tensor slots, in storage and checkpoint order. Gate rows of the recurrent
// tensors are stacked as [input, forget, cell, output], H rows each.
enum class Tensor : std::uint8_t {
  kEmbedding = 0,
  kFwdInput,
  kFwdRecurrent,
  kFwdBias,
  kBwdInput,
  kBwdRecurrent,
  kBwdBias,
  kOutWeight,
  kOutBias,
};
inline constexpr std::size_t kNumTensors = 9;

struct TensorSpec {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return rows * cols; }
};

/// Flat parameter layout. Every tensor lives at a fixed offset inside one
/// contiguous buffer, embedding first.
class ParamLayout {
 public:
  ParamLayout() : ParamLayout(ModelShape{}) {}
  explicit ParamLayout(const ModelShape& shape);

  const ModelShape& shape() const { return shape_; }
  const TensorSpec& spec(Tensor t) const {
    return specs_[static_cast<std::size_t>(t)];
  }
  const std::array<TensorSpec, kNumTensors>& specs() const { return specs_; }
  std::size_t total() const { return total_; }
  /// Tensor containing the flat index.
  Tensor tensor_of(std::size_t flat_index) const;

 private:
  ModelShape shape_;
  std::array<TensorSpec, kNumTensors> specs_;
  std::size_t total_ = 0;
};

Tensor input_tensor(Direction d);
Tensor recurrent_tensor(Direction d);
Tensor bias_tensor(Direction d);

template <typename T>
struct Params {
  ParamLayout layout;
  std::vector<T> values;

  Params() = default;
  explicit Params(const ModelShape& shape)
      : layout(shape), values(layout.total(), T(0)) {}

  const ModelShape& shape() const { return layout.shape(); }
  std::span<T> tensor(Tensor t) {
    const auto& s = layout.spec(t);
    return {values.data() + s.offset, s.size()};
  }
  std::span<const T> tensor(Tensor t) const {
    const auto& s = layout.spec(t);
    return {values.data() + s.offset, s.size()};
  }
  std::span<const T> embedding_row(std::uint32_t id) const {
    const auto d = shape().dim;
    return {values.data() + static_cast<std::size_t>(id) * d, d};
  }
  bool all_finite() const;

  template <typename U>
  Params<U> cast() const {
    Params<U> out;
    out.layout = layout;
    out.values.assign(values.begin(), values.end());
    return out;
  }
};

/// Recurrent and output weights uniform in +-1/sqrt(fan); embeddings
/// uniform in +-0.05 with a zero PAD row. Biases start at zero.
template <typename T>
Params<T> init_params(const ModelShape& shape, std::uint64_t seed);

/// Every parameter uniform in +-range, for gradient checking. The training
/// init leaves some gradients near 1e-12, below what double backprop resolves.
Params<double> random_params(const ModelShape& shape, std::uint64_t seed,
                             double range = 0.5);

enum class Mode { kTrain, kEval };

struct DropoutSpec {
  double rate = 0.0;
  std::uint64_t seed = 0;
};

/// Inverted-dropout mask over the 2H classifier input: each coordinate is
/// kept with probability 1 - rate and then scaled by 1 / (1 - rate).
std::vector<double> dropout_mask(std::size_t width, const DropoutSpec& spec);

template <typename T>
struct ForwardResult {
  double p_sensitive = 0.0;
  double p_nonsensitive = 0.0;
  std::array<double, 2> logits{};
  /// [h_f; h_b] before dropout.
  std::vector<T> state;
  /// Classifier input after dropout (equals `state` in eval mode).
  std::vector<T> dropped_state;
};

/// Runs both directions over the first max_seq_len ids. In train mode the
/// mask comes from `dropout`; eval mode ignores it and is a pure function of
/// (params, ids). Throws DataError for empty ids or an id outside the
/// vocabulary.
template <typename T>
ForwardResult<T> forward(const Params<T>& params,
                         std::span<const std::uint32_t> ids, Mode mode,
                         const DropoutSpec& dropout = {});

struct LabeledIds {
  std::vector<std::uint32_t> ids;
  BinaryLabel label = BinaryLabel::kSensitive;
};

template <typename T>
struct LossAndGrads {
  double loss = 0.0;  // mean cross-entropy
  Params<T> grads;
};

/// Mean cross-entropy over the batch and its gradient with respect to every
/// parameter. Example i of the batch draws its dropout mask from
/// derive(seed, i); pass Mode::kEval to disable dropout. The batch is cut
/// into fixed-size chunks that are processed in parallel and reduced in
/// chunk order, so the result does not depend on the thread count. Throws
/// NumericError on a non-finite loss.
template <typename T>
LossAndGrads<T> loss_and_grads(const Params<T>& params,
                               const std::vector<LabeledIds>& batch,
                               double dropout_rate, std::uint64_t seed,
                               Mode mode = Mode::kTrain);

/// Serial reference: per-example gradients summed in batch order.
template <typename T>
LossAndGrads<T> loss_and_grads_serial(const Params<T>& params,
                                      const std::vector<LabeledIds>& batch,
                                      double dropout_rate, std::uint64_t seed,
                                      Mode mode = Mode::kTrain);

/// Eval-mode loss of a single example.
template <typename T>
double example_loss(const Params<T>& params, const LabeledIds& example);

std::uint64_t example_dropout_seed(std::uint64_t batch_seed, std::size_t index);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  std::array<double, kNumTensors> max_error_per_tensor{};
  std::array<std::size_t, kNumTensors> checked_per_tensor{};
};

/// |a - b| / max(|a|, |b|, 1e-12).
double relative_error(double a, double b);

/// Flat parameter indices spread over every tensor. Embedding samples are
/// drawn from rows the example actually uses.
std::vector<std::size_t> sample_param_indices(const ParamLayout& layout,
                                              std::span<const std::uint32_t> ids,
                                              std::size_t count,
                                              std::uint64_t seed);

/// Compares the analytic eval-mode gradient with central differences
/// (L(θ+ε) − L(θ−ε)) / 2ε at each index. `tamper`, when set, edits the
/// analytic gradient before comparison.
GradCheckResult gradient_check(
    const Params<double>& params, const LabeledIds& example, double epsilon,
    std::span<const std::size_t> indices,
    const std::function<void(Params<double>&)>& tamper = {});

}  // namespace sensboot
