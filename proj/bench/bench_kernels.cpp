// Serial reference against the OpenMP version of each hot kernel.

#include <benchmark/benchmark.h>

#include "sensboot/adam.hpp"
#include "sensboot/bilstm.hpp"
#include "sensboot/blacklist.hpp"
#include "sensboot/classifier.hpp"
#include "sensboot/ranking.hpp"
#include "sensboot/seed.hpp"
#include "sensboot/selection.hpp"
#include "sensboot/synth.hpp"
#include "sensboot/vocab.hpp"

using namespace sensboot;

namespace {

const SynthData& data() {
  static const SynthData d = [] {
    SynthSpec spec;
    spec.seed = 1;
    return generate_synthetic(spec);
  }();
  return d;
}

const std::vector<TokenSeq>& tokens() {
  static const auto t = tokenize_all(data().corpus);
  return t;
}

const ForumPartition& partition() {
  static const auto p =
      partition_forums(score_forums(data().corpus, Blacklist(data().blacklist)));
  return p;
}

// Model and batch at the full-scale hidden and embedding sizes.
struct ModelFixture {
  Vocabulary vocab = Vocabulary::build(tokens(), 1, 50000);
  Params<float> params = init_params<float>(ModelShape{vocab.size(), 300, 128, 100}, 1);
  std::vector<LabeledIds> batch;
  std::vector<TokenSeq> texts;

  ModelFixture() {
    for (std::size_t i = 0; i < 64; ++i) {
      const auto& t = tokens()[i];
      batch.push_back({vocab.encode(t), i % 2 ? BinaryLabel::kSensitive : BinaryLabel::kNonsensitive});
    }
    texts.assign(tokens().begin(), tokens().begin() + 512);
  }
};

const ModelFixture& model() {
  static const ModelFixture m;
  return m;
}

void BM_TokenizeSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(tokenize_all_serial(data().corpus));
}
void BM_TokenizeParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(tokenize_all(data().corpus));
}

void BM_ScoreForumsSerial(benchmark::State& state) {
  const Blacklist bl(data().blacklist);
  for (auto _ : state) benchmark::DoNotOptimize(score_forums_serial(data().corpus, bl));
}
void BM_ScoreForumsParallel(benchmark::State& state) {
  const Blacklist bl(data().blacklist);
  for (auto _ : state) benchmark::DoNotOptimize(score_forums(data().corpus, bl));
}

void BM_Stage1Serial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_stage1_serial(data().corpus, partition(), 3000, 7));
  }
}
void BM_Stage1Parallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_stage1(data().corpus, tokens(), partition(), 3000, 7));
  }
}

void BM_LossAndGradsSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_grads_serial(model().params, model().batch, 0.5, 3));
  }
}
void BM_LossAndGradsParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_grads(model().params, model().batch, 0.5, 3));
  }
}

void BM_AdamSerial(benchmark::State& state) {
  auto params = model().params;
  Params<float> grads = params;
  AdamState<float> adam(params.values.size());
  for (auto _ : state) adam_step_serial(params, grads, adam, AdamConfig{});
}
void BM_AdamParallel(benchmark::State& state) {
  auto params = model().params;
  Params<float> grads = params;
  AdamState<float> adam(params.values.size());
  for (auto _ : state) adam_step(params, grads, adam, AdamConfig{});
}

void BM_ScoreBatchSerial(benchmark::State& state) {
  const Classifier c(model().vocab, model().params);
  for (auto _ : state) benchmark::DoNotOptimize(c.score_batch_serial(model().texts));
}
void BM_ScoreBatchParallel(benchmark::State& state) {
  const Classifier c(model().vocab, model().params);
  for (auto _ : state) benchmark::DoNotOptimize(c.score_batch(model().texts));
}

}  // namespace

BENCHMARK(BM_TokenizeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TokenizeParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreForumsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreForumsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stage1Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stage1Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LossAndGradsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LossAndGradsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdamSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdamParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreBatchParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
