#include "sensboot/bilstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sensboot/error.hpp"
#include "sensboot/seed.hpp"

namespace sensboot {

namespace {

constexpr std::size_t kGradChunk = 16;

template <typename T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  T acc = T(0);
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
struct DirectionCache {
  std::size_t steps = 0;
  std::vector<T> gates;      // steps x 4H, post-activation
  std::vector<T> cell;       // steps x H
  std::vector<T> cell_tanh;  // steps x H
  std::vector<T> hidden;     // steps x H
};

template <typename T>
struct ExampleCache {
  std::array<DirectionCache<T>, 2> dirs;
  ForwardResult<T> out;
  std::vector<double> mask;
  std::vector<std::uint32_t> ids;  // truncated
};

std::size_t position(Direction d, std::size_t step, std::size_t len) {
  return d == Direction::kForward ? step : len - 1 - step;
}

template <typename T>
void run_direction(const Params<T>& p, Direction d,
                   std::span<const std::uint32_t> ids, DirectionCache<T>& cache,
                   std::vector<T>& z) {
  const auto& shape = p.shape();
  const std::size_t H = shape.hidden;
  const std::size_t D = shape.dim;
  const std::size_t L = ids.size();
  const T* w_in = p.tensor(input_tensor(d)).data();
  const T* w_rec = p.tensor(recurrent_tensor(d)).data();
  const T* bias = p.tensor(bias_tensor(d)).data();

  cache.steps = L;
  cache.gates.assign(L * 4 * H, T(0));
  cache.cell.assign(L * H, T(0));
  cache.cell_tanh.assign(L * H, T(0));
  cache.hidden.assign(L * H, T(0));
  z.assign(4 * H, T(0));

  for (std::size_t k = 0; k < L; ++k) {
    const T* x = p.embedding_row(ids[position(d, k, L)]).data();
    const T* h_prev = k > 0 ? &cache.hidden[(k - 1) * H] : nullptr;
    const T* c_prev = k > 0 ? &cache.cell[(k - 1) * H] : nullptr;
    for (std::size_t r = 0; r < 4 * H; ++r) {
      T acc = bias[r] + dot(w_in + r * D, x, D);
      if (h_prev) acc += dot(w_rec + r * H, h_prev, H);
      z[r] = acc;
    }
    T* gates = &cache.gates[k * 4 * H];
    T* c = &cache.cell[k * H];
    T* tc = &cache.cell_tanh[k * H];
    T* h = &cache.hidden[k * H];
    for (std::size_t j = 0; j < H; ++j) {
      const T ig = sigmoid(z[j]);
      const T fg = sigmoid(z[H + j]);
      const T gg = std::tanh(z[2 * H + j]);
      const T og = sigmoid(z[3 * H + j]);
      gates[j] = ig;
      gates[H + j] = fg;
      gates[2 * H + j] = gg;
      gates[3 * H + j] = og;
      c[j] = ig * gg + (c_prev ? fg * c_prev[j] : T(0));
      tc[j] = std::tanh(c[j]);
      h[j] = og * tc[j];
    }
  }
}

template <typename T>
void check_ids(const Params<T>& p, std::span<const std::uint32_t> ids) {
  if (ids.empty()) throw DataError("forward called with an empty sequence");
  for (auto id : ids) {
    if (id >= p.shape().vocab) {
      throw DataError("token id " + std::to_string(id) +
                      " outside vocabulary of size " +
                      std::to_string(p.shape().vocab));
    }
  }
}

template <typename T>
void forward_cached(const Params<T>& p, std::span<const std::uint32_t> ids_in,
                    Mode mode, const DropoutSpec& dropout, ExampleCache<T>& ex,
                    std::vector<T>& z) {
  check_ids(p, ids_in);
  const auto& shape = p.shape();
  const std::size_t H = shape.hidden;
  const std::size_t L = std::min(ids_in.size(), shape.max_seq_len);
  ex.ids.assign(ids_in.begin(), ids_in.begin() + static_cast<std::ptrdiff_t>(L));

  for (Direction d : {Direction::kForward, Direction::kBackward}) {
    run_direction(p, d, ex.ids, ex.dirs[static_cast<std::size_t>(d)], z);
  }
  auto& out = ex.out;
  out.state.assign(2 * H, T(0));
  const auto& fwd = ex.dirs[0].hidden;
  const auto& bwd = ex.dirs[1].hidden;
  std::copy_n(fwd.begin() + static_cast<std::ptrdiff_t>((L - 1) * H), H,
              out.state.begin());
  std::copy_n(bwd.begin() + static_cast<std::ptrdiff_t>((L - 1) * H), H,
              out.state.begin() + static_cast<std::ptrdiff_t>(H));

  out.dropped_state = out.state;
  if (mode == Mode::kTrain && dropout.rate > 0.0) {
    ex.mask = dropout_mask(2 * H, dropout);
    for (std::size_t j = 0; j < 2 * H; ++j) {
      out.dropped_state[j] = static_cast<T>(out.state[j] * ex.mask[j]);
    }
  } else {
    ex.mask.assign(2 * H, 1.0);
  }

  const T* w = p.tensor(Tensor::kOutWeight).data();
  const T* b = p.tensor(Tensor::kOutBias).data();
  for (std::size_t k = 0; k < 2; ++k) {
    double acc = static_cast<double>(b[k]);
    for (std::size_t j = 0; j < 2 * H; ++j) {
      acc += static_cast<double>(w[k * 2 * H + j]) *
             static_cast<double>(out.dropped_state[j]);
    }
    out.logits[k] = acc;
  }
  // Two-way softmax; each component is computed directly so that they sum
  // to one to double precision.
  const double diff = out.logits[1] - out.logits[0];
  out.p_sensitive = 1.0 / (1.0 + std::exp(diff));
  out.p_nonsensitive = 1.0 / (1.0 + std::exp(-diff));
}

// Cross-entropy of the gold class, log-sum-exp form.
double cross_entropy(const std::array<double, 2>& logits, BinaryLabel gold) {
  const double m = std::max(logits[0], logits[1]);
  const double lse =
      m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  return lse - logits[static_cast<std::size_t>(gold)];
}

// Gradient accumulator: dense storage for every tensor after the embedding,
// sparse rows for the embedding.
template <typename T>
class GradBuffer {
 public:
  explicit GradBuffer(const ParamLayout& layout)
      : layout_(&layout),
        tail_offset_(layout.spec(Tensor::kEmbedding).size()),
        tail_(layout.total() - tail_offset_, T(0)) {}

  T* tensor(Tensor t) {
    return tail_.data() + (layout_->spec(t).offset - tail_offset_);
  }

  T* embedding_row(std::uint32_t id) {
    auto [it, inserted] = rows_.try_emplace(id);
    if (inserted) it->second.assign(layout_->shape().dim, T(0));
    return it->second.data();
  }

  void add_into(Params<T>& dense) const {
    T* tail = dense.values.data() + tail_offset_;
    for (std::size_t i = 0; i < tail_.size(); ++i) tail[i] += tail_[i];
    const std::size_t D = layout_->shape().dim;
    for (const auto& [id, row] : rows_) {
      T* dst = dense.values.data() + static_cast<std::size_t>(id) * D;
      for (std::size_t c = 0; c < D; ++c) dst[c] += row[c];
    }
  }

 private:
  const ParamLayout* layout_;
  std::size_t tail_offset_;
  std::vector<T> tail_;
  std::map<std::uint32_t, std::vector<T>> rows_;
};

template <typename T>
struct BackwardScratch {
  std::vector<T> dh, dc, dz, dx, dh_prev;
};

template <typename T>
void backward_direction(const Params<T>& p, Direction d,
                        const ExampleCache<T>& ex, const T* dh_final,
                        GradBuffer<T>& g, BackwardScratch<T>& s) {
  const std::size_t H = p.shape().hidden;
  const std::size_t D = p.shape().dim;
  const auto& cache = ex.dirs[static_cast<std::size_t>(d)];
  const std::size_t L = cache.steps;
  const T* w_in = p.tensor(input_tensor(d)).data();
  const T* w_rec = p.tensor(recurrent_tensor(d)).data();
  T* g_in = g.tensor(input_tensor(d));
  T* g_rec = g.tensor(recurrent_tensor(d));
  T* g_bias = g.tensor(bias_tensor(d));

  s.dh.assign(dh_final, dh_final + H);
  s.dc.assign(H, T(0));
  s.dz.assign(4 * H, T(0));
  s.dx.assign(D, T(0));
  s.dh_prev.assign(H, T(0));

  for (std::size_t k = L; k-- > 0;) {
    const T* gates = &cache.gates[k * 4 * H];
    const T* tc = &cache.cell_tanh[k * H];
    const T* c_prev = k > 0 ? &cache.cell[(k - 1) * H] : nullptr;
    const T* h_prev = k > 0 ? &cache.hidden[(k - 1) * H] : nullptr;
    for (std::size_t j = 0; j < H; ++j) {
      const T ig = gates[j];
      const T fg = gates[H + j];
      const T gg = gates[2 * H + j];
      const T og = gates[3 * H + j];
      const T d_o = s.dh[j] * tc[j];
      const T dcj = s.dc[j] + s.dh[j] * og * (T(1) - tc[j] * tc[j]);
      const T d_i = dcj * gg;
      const T d_g = dcj * ig;
      const T d_f = c_prev ? dcj * c_prev[j] : T(0);
      s.dc[j] = dcj * fg;
      s.dz[j] = d_i * ig * (T(1) - ig);
      s.dz[H + j] = d_f * fg * (T(1) - fg);
      s.dz[2 * H + j] = d_g * (T(1) - gg * gg);
      s.dz[3 * H + j] = d_o * og * (T(1) - og);
    }
    const std::uint32_t id = ex.ids[position(d, k, L)];
    const T* x = p.embedding_row(id).data();
    std::fill(s.dx.begin(), s.dx.end(), T(0));
    std::fill(s.dh_prev.begin(), s.dh_prev.end(), T(0));
    for (std::size_t r = 0; r < 4 * H; ++r) {
      const T dzr = s.dz[r];
      g_bias[r] += dzr;
      axpy(dzr, x, g_in + r * D, D);
      axpy(dzr, w_in + r * D, s.dx.data(), D);
      if (h_prev) {
        axpy(dzr, h_prev, g_rec + r * H, H);
        axpy(dzr, w_rec + r * H, s.dh_prev.data(), H);
      }
    }
    T* row = g.embedding_row(id);
    for (std::size_t c = 0; c < D; ++c) row[c] += s.dx[c];
    std::swap(s.dh, s.dh_prev);
  }
}

// Forward + backward for one example; gradients are scaled by `scale` and
// added into `g`. Returns the unscaled loss.
template <typename T>
double accumulate_example(const Params<T>& p, const LabeledIds& example,
                          Mode mode, const DropoutSpec& dropout, double scale,
                          GradBuffer<T>& g, ExampleCache<T>& ex,
                          BackwardScratch<T>& s, std::vector<T>& z) {
  forward_cached(p, example.ids, mode, dropout, ex, z);
  const double loss = cross_entropy(ex.out.logits, example.label);
  const std::size_t H = p.shape().hidden;

  const std::array<double, 2> probs{ex.out.p_sensitive, ex.out.p_nonsensitive};
  std::array<double, 2> dl{};
  for (std::size_t k = 0; k < 2; ++k) {
    const double y = static_cast<std::size_t>(example.label) == k ? 1.0 : 0.0;
    dl[k] = (probs[k] - y) * scale;
  }
  const T* w = p.tensor(Tensor::kOutWeight).data();
  T* gw = g.tensor(Tensor::kOutWeight);
  T* gb = g.tensor(Tensor::kOutBias);
  std::vector<T> ds(2 * H);
  for (std::size_t k = 0; k < 2; ++k) {
    gb[k] += static_cast<T>(dl[k]);
    for (std::size_t j = 0; j < 2 * H; ++j) {
      gw[k * 2 * H + j] += static_cast<T>(dl[k]) * ex.out.dropped_state[j];
    }
  }
  for (std::size_t j = 0; j < 2 * H; ++j) {
    const double back = static_cast<double>(w[j]) * dl[0] +
                        static_cast<double>(w[2 * H + j]) * dl[1];
    ds[j] = static_cast<T>(back * ex.mask[j]);
  }
  backward_direction(p, Direction::kForward, ex, ds.data(), g, s);
  backward_direction(p, Direction::kBackward, ex, ds.data() + H, g, s);
  return loss;
}

void check_batch(std::size_t size, double dropout_rate) {
  if (size == 0) throw DataError("loss_and_grads called with an empty batch");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1)");
  }
}

double finish_loss(const std::vector<double>& losses) {
  double sum = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!std::isfinite(losses[i])) {
      throw NumericError("non-finite loss at batch example " +
                         std::to_string(i));
    }
    sum += losses[i];
  }
  return sum / static_cast<double>(losses.size());
}

}  // namespace

ParamLayout::ParamLayout(const ModelShape& shape) : shape_(shape) {
  if (shape.vocab < 2 || shape.dim == 0 || shape.hidden == 0 ||
      shape.max_seq_len == 0) {
    throw ConfigError("invalid model shape");
  }
  const std::size_t H = shape.hidden;
  const std::size_t D = shape.dim;
  const std::array<std::pair<const char*, std::pair<std::size_t, std::size_t>>,
                   kNumTensors>
      dims{{{"embedding", {shape.vocab, D}},
            {"fwd.w_input", {4 * H, D}},
            {"fwd.w_recurrent", {4 * H, H}},
            {"fwd.bias", {4 * H, 1}},
            {"bwd.w_input", {4 * H, D}},
            {"bwd.w_recurrent", {4 * H, H}},
            {"bwd.bias", {4 * H, 1}},
            {"out.weight", {2, 2 * H}},
            {"out.bias", {2, 1}}}};
  std::size_t offset = 0;
  for (std::size_t i = 0; i < kNumTensors; ++i) {
    specs_[i] = {dims[i].first, dims[i].second.first, dims[i].second.second,
                 offset};
    offset += specs_[i].size();
  }
  total_ = offset;
}

Tensor ParamLayout::tensor_of(std::size_t flat_index) const {
  for (std::size_t i = kNumTensors; i-- > 0;) {
    if (flat_index >= specs_[i].offset) return static_cast<Tensor>(i);
  }
  return Tensor::kEmbedding;
}

Tensor input_tensor(Direction d) {
  return d == Direction::kForward ? Tensor::kFwdInput : Tensor::kBwdInput;
}
Tensor recurrent_tensor(Direction d) {
  return d == Direction::kForward ? Tensor::kFwdRecurrent
                                  : Tensor::kBwdRecurrent;
}
Tensor bias_tensor(Direction d) {
  return d == Direction::kForward ? Tensor::kFwdBias : Tensor::kBwdBias;
}

template <typename T>
bool Params<T>::all_finite() const {
  return std::all_of(values.begin(), values.end(),
                     [](T v) { return std::isfinite(v); });
}

template <typename T>
Params<T> init_params(const ModelShape& shape, std::uint64_t seed) {
  Params<T> p(shape);
  Rng rng(seed);
  auto fill = [&](Tensor t, double range) {
    for (auto& v : p.tensor(t)) v = static_cast<T>(uniform(rng, -range, range));
  };
  fill(Tensor::kEmbedding, 0.05);
  for (auto& v : p.tensor(Tensor::kEmbedding).first(shape.dim)) v = T(0);
  const double rec = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  for (Direction d : {Direction::kForward, Direction::kBackward}) {
    fill(input_tensor(d), rec);
    fill(recurrent_tensor(d), rec);
  }
  fill(Tensor::kOutWeight, 1.0 / std::sqrt(2.0 * static_cast<double>(shape.hidden)));
  return p;
}

Params<double> random_params(const ModelShape& shape, std::uint64_t seed,
                             double range) {
  Params<double> p(shape);
  Rng rng(seed);
  for (auto& v : p.values) v = uniform(rng, -range, range);
  return p;
}

std::vector<double> dropout_mask(std::size_t width, const DropoutSpec& spec) {
  std::vector<double> mask(width, 1.0);
  if (spec.rate <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - spec.rate);
  Rng rng(spec.seed);
  for (auto& m : mask) m = uniform01(rng) < spec.rate ? 0.0 : keep_scale;
  return mask;
}

std::uint64_t example_dropout_seed(std::uint64_t batch_seed, std::size_t index) {
  return splitmix64(batch_seed ^ splitmix64(static_cast<std::uint64_t>(index) +
                                            0x5bd1e995ULL));
}

template <typename T>
ForwardResult<T> forward(const Params<T>& params,
                         std::span<const std::uint32_t> ids, Mode mode,
                         const DropoutSpec& dropout) {
  ExampleCache<T> ex;
  std::vector<T> z;
  forward_cached(params, ids, mode, dropout, ex, z);
  return std::move(ex.out);
}

template <typename T>
LossAndGrads<T> loss_and_grads_serial(const Params<T>& params,
                                      const std::vector<LabeledIds>& batch,
                                      double dropout_rate, std::uint64_t seed,
                                      Mode mode) {
  check_batch(batch.size(), dropout_rate);
  LossAndGrads<T> result;
  result.grads = Params<T>(params.shape());
  GradBuffer<T> g(params.layout);
  ExampleCache<T> ex;
  BackwardScratch<T> s;
  std::vector<T> z;
  std::vector<double> losses(batch.size());
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const DropoutSpec dropout{dropout_rate, example_dropout_seed(seed, i)};
    losses[i] =
        accumulate_example(params, batch[i], mode, dropout, scale, g, ex, s, z);
  }
  result.loss = finish_loss(losses);
  g.add_into(result.grads);
  return result;
}

template <typename T>
LossAndGrads<T> loss_and_grads(const Params<T>& params,
                               const std::vector<LabeledIds>& batch,
                               double dropout_rate, std::uint64_t seed,
                               Mode mode) {
  check_batch(batch.size(), dropout_rate);
  const std::size_t n_chunks = (batch.size() + kGradChunk - 1) / kGradChunk;
  std::vector<GradBuffer<T>> chunk_grads(n_chunks, GradBuffer<T>(params.layout));
  std::vector<double> losses(batch.size());
  const double scale = 1.0 / static_cast<double>(batch.size());
  std::exception_ptr error;

#pragma omp parallel
  {
    ExampleCache<T> ex;
    BackwardScratch<T> s;
    std::vector<T> z;
#pragma omp for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
      try {
        const auto chunk = static_cast<std::size_t>(c);
        const std::size_t end = std::min(batch.size(), (chunk + 1) * kGradChunk);
        for (std::size_t i = chunk * kGradChunk; i < end; ++i) {
          const DropoutSpec dropout{dropout_rate, example_dropout_seed(seed, i)};
          losses[i] = accumulate_example(params, batch[i], mode, dropout, scale,
                                         chunk_grads[chunk], ex, s, z);
        }
      } catch (...) {
#pragma omp critical(sensboot_grad_error)
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);

  LossAndGrads<T> result;
  result.loss = finish_loss(losses);
  result.grads = Params<T>(params.shape());
  for (const auto& g : chunk_grads) g.add_into(result.grads);
  return result;
}

template <typename T>
double example_loss(const Params<T>& params, const LabeledIds& example) {
  ExampleCache<T> ex;
  std::vector<T> z;
  forward_cached(params, example.ids, Mode::kEval, {}, ex, z);
  return cross_entropy(ex.out.logits, example.label);
}

namespace {

// Eval-mode loss with every step in long double. Central differences at
// epsilon 1e-5 cancel about ten digits of the loss, so the probe side needs
// a wider mantissa than the analytic side it is compared against.
long double extended_loss(const Params<long double>& p, const LabeledIds& example) {
  ExampleCache<long double> ex;
  std::vector<long double> z;
  forward_cached(p, example.ids, Mode::kEval, {}, ex, z);
  const std::size_t H = p.shape().hidden;
  const long double* w = p.tensor(Tensor::kOutWeight).data();
  const long double* b = p.tensor(Tensor::kOutBias).data();
  std::array<long double, 2> logits{};
  for (std::size_t k = 0; k < 2; ++k) {
    logits[k] = b[k] + dot(w + k * 2 * H, ex.out.state.data(), 2 * H);
  }
  const long double m = std::max(logits[0], logits[1]);
  const long double lse =
      m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  return lse - logits[static_cast<std::size_t>(example.label)];
}

}  // namespace

double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-12});
  return std::abs(a - b) / denom;
}

std::vector<std::size_t> sample_param_indices(const ParamLayout& layout,
                                              std::span<const std::uint32_t> ids,
                                              std::size_t count,
                                              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> out;
  const std::size_t per_tensor = std::max<std::size_t>(1, count / kNumTensors);
  const std::size_t D = layout.shape().dim;
  for (std::size_t t = 0; t < kNumTensors; ++t) {
    const auto& spec = layout.specs()[t];
    const std::size_t n =
        t + 1 == kNumTensors ? std::max(per_tensor, count - out.size()) : per_tensor;
    for (std::size_t k = 0; k < n; ++k) {
      if (static_cast<Tensor>(t) == Tensor::kEmbedding && !ids.empty()) {
        const auto row = ids[uniform_index(rng, ids.size())];
        out.push_back(static_cast<std::size_t>(row) * D + uniform_index(rng, D));
      } else {
        out.push_back(spec.offset + uniform_index(rng, spec.size()));
      }
    }
  }
  return out;
}

GradCheckResult gradient_check(
    const Params<double>& params, const LabeledIds& example, double epsilon,
    std::span<const std::size_t> indices,
    const std::function<void(Params<double>&)>& tamper) {
  auto analytic = loss_and_grads_serial(params, {example}, 0.0, 0, Mode::kEval);
  if (tamper) tamper(analytic.grads);

  GradCheckResult result;
  auto probe = params.cast<long double>();
  const long double eps = epsilon;
  for (std::size_t idx : indices) {
    const long double saved = probe.values.at(idx);
    probe.values[idx] = saved + eps;
    const long double plus = extended_loss(probe, example);
    probe.values[idx] = saved - eps;
    const long double minus = extended_loss(probe, example);
    probe.values[idx] = saved;
    const auto numeric = static_cast<double>((plus - minus) / (2 * eps));
    const double err = relative_error(analytic.grads.values[idx], numeric);
    const auto t = static_cast<std::size_t>(params.layout.tensor_of(idx));
    result.max_error_per_tensor[t] = std::max(result.max_error_per_tensor[t], err);
    ++result.checked_per_tensor[t];
    ++result.checked;
    if (result.checked == 1 || err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_index = idx;
    }
  }
  return result;
}

template struct Params<float>;
template struct Params<double>;
template Params<float> init_params<float>(const ModelShape&, std::uint64_t);
template Params<double> init_params<double>(const ModelShape&, std::uint64_t);
template ForwardResult<float> forward<float>(const Params<float>&,
                                             std::span<const std::uint32_t>,
                                             Mode, const DropoutSpec&);
template ForwardResult<double> forward<double>(const Params<double>&,
                                               std::span<const std::uint32_t>,
                                               Mode, const DropoutSpec&);
template LossAndGrads<float> loss_and_grads<float>(
    const Params<float>&, const std::vector<LabeledIds>&, double,
    std::uint64_t, Mode);
template LossAndGrads<double> loss_and_grads<double>(
    const Params<double>&, const std::vector<LabeledIds>&, double,
    std::uint64_t, Mode);
template LossAndGrads<float> loss_and_grads_serial<float>(
    const Params<float>&, const std::vector<LabeledIds>&, double,
    std::uint64_t, Mode);
template LossAndGrads<double> loss_and_grads_serial<double>(
    const Params<double>&, const std::vector<LabeledIds>&, double,
    std::uint64_t, Mode);
template double example_loss<float>(const Params<float>&, const LabeledIds&);
template double example_loss<double>(const Params<double>&, const LabeledIds&);

}  // namespace sensboot
