// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensboot/bilstm.hpp"
#include "sensboot/blacklist.hpp"
#include "sensboot/classifier.hpp"
#include "sensboot/cli.hpp"
#include "sensboot/corpus.hpp"
#include "sensboot/eval.hpp"
#include "sensboot/ranking.hpp"
#include "sensboot/seed.hpp"
#include "sensboot/selection.hpp"
#include "sensboot/synth.hpp"
#include "sensboot/vocab.hpp"
#include "test_util.hpp"

using namespace sensboot;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr std::size_t kGradModels = 24;
constexpr std::size_t kGradIndicesPerModel = 200;
constexpr double kGradEpsilon = 1e-5;
constexpr double kGradTolerance = 1e-4;
constexpr double kGradBudgetSeconds = 30.0;
constexpr double kRankingBudgetSeconds = 10.0;
constexpr double kMaxOverlapFraction = 0.35;
constexpr double kMinBlacklistPrecision = 0.95;
constexpr double kMinStage1RecallGain = 0.2;
constexpr double kMaxTwoStageRecallDrop = 0.02;
constexpr double kMinTwoStageF1Gain = 0.2;
constexpr double kEndToEndBudgetSeconds = 600.0;
constexpr double kMetricTolerance = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sensboot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// 1. Analytic gradients against extended-precision central differences,
// plus a +10% mutation that the check must flag.
Outcome gradient_correctness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240601);
  double worst = 0.0, weakest_mutation = INFINITY;
  std::size_t checked = 0;
  for (std::size_t m = 0; m < kGradModels; ++m) {
    const ModelShape shape{16, 1 + uniform_index(rng, 8), 1 + uniform_index(rng, 8), 10};
    const auto params = random_params(shape, rng());
    std::vector<std::uint32_t> ids(1 + uniform_index(rng, 5));
    for (auto& id : ids) id = static_cast<std::uint32_t>(uniform_index(rng, shape.vocab));
    const LabeledIds ex{ids, m % 2 ? BinaryLabel::kSensitive : BinaryLabel::kNonsensitive};
    const auto idx = sample_param_indices(params.layout, ex.ids, kGradIndicesPerModel, rng());
    const auto r = gradient_check(params, ex, kGradEpsilon, idx);
    worst = std::max(worst, r.max_relative_error);
    checked += r.checked;
    for (std::size_t t = 0; t < kNumTensors; ++t) {
      o.require(r.checked_per_tensor[t] > 0, "model " + std::to_string(m) + " skipped a tensor");
    }

    const auto& out = params.layout.spec(Tensor::kOutWeight);
    const std::size_t target = out.offset + uniform_index(rng, out.size());
    const std::vector<std::size_t> one{target};
    const auto mutated = gradient_check(params, ex, kGradEpsilon, one,
                                        [&](Params<double>& g) { g.values[target] *= 1.1; });
    weakest_mutation = std::min(weakest_mutation, mutated.max_relative_error);
    o.require(mutated.max_relative_error >= kGradTolerance,
              "mutation on model " + std::to_string(m) + " passed the check");
  }
  const double secs = seconds_since(t0);
  o.require(worst < kGradTolerance, "max relative error " + fmt("%.3g", worst));
  o.require(secs < kGradBudgetSeconds, "runtime " + fmt("%.1f", secs) + " s");
  if (o.pass) {
    o.detail = std::to_string(kGradModels) + " models, " + std::to_string(checked) +
               " parameters, max rel err " + fmt("%.2e", worst) + ", weakest mutation " +
               fmt("%.3f", weakest_mutation) + ", " + fmt("%.2f", secs) + " s";
  }
  return o;
}

// 2. score_forums and partition_forums against a direct recount.
Outcome ranking_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  SynthSpec spec;
  spec.utterances = 9600;
  spec.forums = 46;
  spec.seed = 11;
  const auto data = generate_synthetic(spec);
  auto corpus = data.corpus;
  // Four boundary forums bring the total to 10000 utterances over 50 forums;
  // 2 and 10 hits per 1000 tokens sit exactly on the band edges.
  for (int hits : {1, 2, 10, 11}) {
    for (int i = 0; i < 100; ++i) {
      std::string text;
      for (int k = 0; k < 10; ++k) text += (i * 10 + k < hits ? "blk00 " : "w000 ");
      corpus.push_back({"edge" + std::to_string(hits) + "-" + std::to_string(i), text,
                        "edge" + std::to_string(hits), {}});
    }
  }
  const std::set<std::string> words(data.blacklist.begin(), data.blacklist.end());
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> recount;
  for (const auto& u : corpus) {
    auto& [hits, total] = recount[u.forum];
    std::istringstream in(u.text);
    for (std::string w; in >> w;) {
      while (!w.empty() && (w.back() == '.' || w.back() == '!')) w.pop_back();
      if (w.empty()) continue;
      ++total;
      hits += words.count(w);
    }
  }
  const auto scores = score_forums(corpus, Blacklist(data.blacklist));
  o.require(scores.size() == recount.size(), "forum count differs");
  for (const auto& s : scores) {
    const auto it = recount.find(s.forum);
    o.require(it != recount.end() && it->second.first == s.blacklist_hits &&
                  it->second.second == s.total_tokens,
              "counts differ for " + s.forum);
  }
  const auto partition = partition_forums(scores, 0.002, 0.01);
  std::size_t pools[3] = {0, 0, 0};
  for (const auto& [forum, ht] : recount) {
    const double density = static_cast<double>(ht.first) / static_cast<double>(ht.second);
    const Pool expected = density < 0.002  ? Pool::kNonsensitive
                          : density > 0.01 ? Pool::kSensitive
                                           : Pool::kExcluded;
    ++pools[static_cast<int>(expected)];
    o.require(partition.pool_of(forum) == expected, "pool differs for " + forum);
  }
  o.require(partition.pool_of("edge1") == Pool::kNonsensitive &&
                partition.pool_of("edge2") == Pool::kExcluded &&
                partition.pool_of("edge10") == Pool::kExcluded &&
                partition.pool_of("edge11") == Pool::kSensitive,
            "band edges misplaced");
  const double secs = seconds_since(t0);
  o.require(secs < kRankingBudgetSeconds, "runtime " + fmt("%.1f", secs) + " s");
  if (o.pass) {
    o.detail = std::to_string(corpus.size()) + " utterances, " + std::to_string(recount.size()) +
               " forums exact; pools " + std::to_string(pools[0]) + "/" + std::to_string(pools[1]) +
               "/" + std::to_string(pools[2]) + " (sensitive/nonsensitive/excluded), " +
               fmt("%.2f", secs) + " s";
  }
  return o;
}

// Corpus split over two pools with p values fixed per utterance.
struct Stage2Fixture {
  std::vector<Utterance> corpus;
  std::vector<TokenSeq> tokens;
  std::vector<double> p;
  ForumPartition partition;
  Blacklist bl{std::vector<std::string>{"slur"}};
};

Stage2Fixture stage2_fixture(std::uint64_t seed, std::size_t n) {
  Stage2Fixture f;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const bool hot = i % 2 == 0;
    const bool hit = uniform01(rng) < 0.2;
    f.corpus.push_back({"u" + std::to_string(i), hit ? "you slur there" : "plain words here",
                        hot ? "hot" : "calm", {}});
    const double grid[] = {0.0, 0.29, 0.3, 0.31, 0.79, 0.8, 0.81, 1.0};
    f.p.push_back(uniform01(rng) < 0.5 ? grid[uniform_index(rng, 8)] : uniform01(rng));
  }
  f.tokens = tokenize_all(f.corpus);
  f.partition.sensitive_forums = {"hot"};
  f.partition.nonsensitive_forums = {"calm"};
  return f;
}

// 3. Stage-2 predicates over the boundary grid, and a clean validator
// report on sampled sets.
Outcome stage2_predicates() {
  Outcome o;
  const Blacklist bl({"slur"});
  const Stage2Config cfg{0.8, 0.3, 10, 0.7, 10, 0};
  const TokenSeq hit{"you", "slur"}, clean{"you", "there"};
  // Rows: p, sensitive (hit), sensitive (no hit), nonsensitive (hit), nonsensitive (no hit).
  struct Row {
    double p;
    bool s_hit, s_clean, ns_hit, ns_clean;
  };
  const Row table[] = {
      {0.00, true, false, false, true},  {0.29, true, false, false, true},
      {0.30, true, false, false, false}, {0.31, true, false, false, false},
      {0.79, true, false, false, false}, {0.80, true, false, false, false},
      {0.81, true, true, false, false},  {1.00, true, true, false, false},
  };
  for (const auto& r : table) {
    const std::string at = " at p=" + fmt("%.2f", r.p);
    o.require(stage2_sensitive_predicate(r.p, hit, bl, cfg) == r.s_hit, "sensitive/hit" + at);
    o.require(stage2_sensitive_predicate(r.p, clean, bl, cfg) == r.s_clean, "sensitive/clean" + at);
    o.require(stage2_nonsensitive_predicate(r.p, hit, bl, cfg) == r.ns_hit, "nonsensitive/hit" + at);
    o.require(stage2_nonsensitive_predicate(r.p, clean, bl, cfg) == r.ns_clean,
              "nonsensitive/clean" + at);
  }
  std::size_t sampled = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto f = stage2_fixture(seed, 2000);
    Stage2Config c{0.8, 0.3, 40 + seed, 0.5 + 0.02 * static_cast<double>(seed), 60, seed};
    const auto set = sample_stage2(f.corpus, f.tokens, f.p, f.partition, f.bl, c);
    sampled += set.examples.size();
    const auto violations = validate_stage2(set, f.bl, c, &f.partition);
    o.require(violations.empty(), "validator flagged seed " + std::to_string(seed));
  }
  // The validator must notice a planted violation.
  {
    const auto f = stage2_fixture(99, 2000);
    const Stage2Config c{0.8, 0.3, 20, 0.7, 20, 99};
    auto set = sample_stage2(f.corpus, f.tokens, f.p, f.partition, f.bl, c);
    for (auto& e : set.examples) {
      if (e.provenance == Provenance::kStage2Clean) {
        e.text = "you slur there";
        e.tokens = tokenize(e.text);
        break;
      }
    }
    o.require(!validate_stage2(set, f.bl, c, &f.partition).empty(), "planted violation missed");
  }
  if (o.pass) {
    o.detail = "16 truth-table cells match; 0 violations over 20 sampled sets (" +
               std::to_string(sampled) + " examples); planted violation caught";
  }
  return o;
}

// 4. Quota 10 with model_fraction 0.7 gives a 7/3 split.
Outcome quota_fidelity() {
  Outcome o;
  const auto f = stage2_fixture(4, 400);
  const Stage2Config cfg{0.8, 0.3, 10, 0.7, 10, 4};
  const auto set = sample_stage2(f.corpus, f.tokens, f.p, f.partition, f.bl, cfg);
  auto counts = set.provenance_counts();
  o.require(counts["stage2-model"] == 7, "model bucket " + std::to_string(counts["stage2-model"]));
  o.require(counts["stage2-blacklist"] == 3,
            "blacklist bucket " + std::to_string(counts["stage2-blacklist"]));
  o.require(counts["stage2-clean"] == 10, "clean bucket " + std::to_string(counts["stage2-clean"]));
  if (o.pass) o.detail = "stage2-model 7, stage2-blacklist 3, stage2-clean 10";
  return o;
}

// Full pipeline through the command line in `dir` over the synthetic data.
struct PipelineRun {
  bool ok = true;
  std::string failure;
  std::map<std::string, std::map<std::string, double>> metrics;  // model -> name -> value
};

void write_pipeline_config(const std::string& path, const std::string& data_dir) {
  testutil::write_file(path, "[global]\nseed = 7\nout_dir = out\n"
                             "[corpus]\npath = " + data_dir + "/corpus.jsonl\n"
                             "[blacklist]\npath = " + data_dir + "/blacklist.txt\n"
                             "[stage1]\nn_per_class = 3000\n"
                             "[stage2]\nsensitive_quota = 3000\nmodel_fraction = 0.7\n"
                             "nonsensitive_quota = 3000\ncheckpoint = out/stage1.ckpt\n"
                             "[train]\nlearning_rate = 0.01\nbatch_size = 50\nepochs = 4\n"
                             "hidden = 16\ndim = 16\ndropout = 0.5\n"
                             "[embeddings]\npath = " + data_dir + "/embeddings.txt\n"
                             "[labels]\nsensitive = insult,racist,sexual,violent\n"
                             "nonsensitive = neutral\n");
}

PipelineRun run_pipeline(const std::string& dir, const std::string& data_dir) {
  PipelineRun run;
  fs::create_directories(dir);
  const std::string conf = dir + "/run.conf";
  write_pipeline_config(conf, data_dir);
  const std::string test = data_dir + "/testset.jsonl";
  const std::vector<std::vector<std::string>> steps = {
      {"rank"},
      {"sample", "--stage", "1"},
      {"train", "--data", dir + "/out/stage1.jsonl", "--name", "stage1"},
      {"sample", "--stage", "2"},
      {"train", "--data", dir + "/out/stage2.jsonl", "--name", "twostage"},
      {"eval", "--baseline", "blacklist", "--test", test, "--name", "blacklist"},
      {"eval", "--checkpoint", dir + "/out/stage1.ckpt", "--test", test, "--name", "stage1"},
      {"eval", "--checkpoint", dir + "/out/twostage.ckpt", "--test", test, "--name", "twostage"},
  };
  for (auto step : steps) {
    const std::string name = step.front();
    step.insert(step.end(), {"--config", conf, "--quiet"});
    const auto r = cli(step);
    if (r.code != 0) {
      run.ok = false;
      run.failure = name + " exited " + std::to_string(r.code) + ": " + r.err;
      return run;
    }
  }
  for (const std::string model : {"blacklist", "stage1", "twostage"}) {
    std::istringstream in(testutil::read_file(dir + "/out/" + model + ".metrics.jsonl"));
    for (std::string line; std::getline(in, line);) {
      const auto j = nlohmann::json::parse(line);
      run.metrics[model][j.at("name").get<std::string>()] = j.at("value").get<double>();
    }
  }
  return run;
}

struct EndToEnd {
  testutil::TempDir dir{"acceptance"};
  std::string data_dir = dir.file("data");
  SynthData data;
  PipelineRun first;
  double seconds = 0.0;
};

// 5. Blacklist < Stage 1 <= Two-Stage on the planted-overlap corpus.
Outcome end_to_end(EndToEnd& e2e) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  SynthSpec spec;
  spec.seed = 7;
  e2e.data = generate_synthetic(spec);
  write_synthetic(e2e.data_dir, e2e.data);
  e2e.first = run_pipeline(e2e.dir.file("a"), e2e.data_dir);
  e2e.seconds = seconds_since(t0);
  if (!e2e.first.ok) {
    o.require(false, e2e.first.failure);
    return o;
  }
  auto& m = e2e.first.metrics;
  const double overlap = e2e.data.overlap_fraction();
  const double bl_r = m["blacklist"]["recall_s"], bl_p = m["blacklist"]["precision_s"];
  const double s1_r = m["stage1"]["recall_s"], ts_r = m["twostage"]["recall_s"];
  const double bl_f = m["blacklist"]["f1_s"], ts_f = m["twostage"]["f1_s"];
  o.require(overlap <= kMaxOverlapFraction, "overlap fraction " + fmt("%.4f", overlap));
  o.require(std::abs(bl_r - overlap) <= kMetricTolerance,
            "blacklist recall " + fmt("%.4f", bl_r) + " vs overlap " + fmt("%.4f", overlap));
  o.require(bl_p >= kMinBlacklistPrecision, "blacklist precision " + fmt("%.4f", bl_p));
  o.require(s1_r >= bl_r + kMinStage1RecallGain, "stage-1 recall " + fmt("%.4f", s1_r));
  o.require(ts_r >= s1_r - kMaxTwoStageRecallDrop, "two-stage recall " + fmt("%.4f", ts_r));
  o.require(ts_f >= bl_f + kMinTwoStageF1Gain, "two-stage F1 " + fmt("%.4f", ts_f));
  o.require(e2e.seconds < kEndToEndBudgetSeconds, "runtime " + fmt("%.1f", e2e.seconds) + " s");
  o.detail += (o.pass ? "" : " | ");
  o.detail += std::to_string(e2e.data.corpus.size()) + " utterances; blacklist R " +
              fmt("%.4f", bl_r) + " (overlap " + fmt("%.4f", overlap) + ") P " + fmt("%.4f", bl_p) +
              " F1 " + fmt("%.4f", bl_f) + "; stage-1 R " + fmt("%.4f", s1_r) + " F1 " +
              fmt("%.4f", m["stage1"]["f1_s"]) + "; two-stage R " + fmt("%.4f", ts_r) + " F1 " +
              fmt("%.4f", ts_f) + "; " + fmt("%.1f", e2e.seconds) + " s";
  return o;
}

// 6. Metrics on fixed confusion fixtures and a weighted-recall recount.
Outcome metric_correctness() {
  Outcome o;
  auto near = [&](double got, double want, const std::string& what) {
    o.require(std::abs(got - want) <= kMetricTolerance,
              what + " " + fmt("%.12f", got) + " != " + fmt("%.12f", want));
  };
  // tp 246, fp 6, tn 994, fn 754.
  const auto a = metrics(ConfusionMatrix{246, 6, 994, 754});
  near(a.precision_s.value, 0.976190476190476, "precision_s");
  near(a.recall_s.value, 0.246, "recall_s");
  near(a.f1_s.value, 0.392971246006390, "f1_s");
  near(a.precision_ns.value, 0.568649885583524, "precision_ns");
  near(a.recall_ns.value, 0.994, "recall_ns");
  near(a.f1_ns.value, 0.723435225618632, "f1_ns");
  near(a.macro_f1.value, 0.558203235812511, "macro_f1");
  near(a.accuracy.value, 0.62, "accuracy");
  // tp 3, fp 2, tn 3, fn 2.
  const auto b = metrics(ConfusionMatrix{3, 2, 3, 2});
  near(b.precision_s.value, 0.6, "precision_s(b)");
  near(b.f1_s.value, 0.6, "f1_s(b)");
  near(b.accuracy.value, 0.6, "accuracy(b)");
  // No predicted sensitive: precision is degenerate and reported as 0.
  const auto c = metrics(ConfusionMatrix{0, 0, 5, 5});
  o.require(c.precision_s.degenerate && c.precision_s.value == 0.0, "degenerate precision");

  // Four classes, three sensitive; weighted recall equals per-example accuracy
  // of the collapsed prediction.
  const LabelMapping mapping({"insult", "racist", "sexual"}, {"neutral"});
  const std::vector<std::string> names{"insult", "racist", "sexual", "neutral"};
  Rng rng(6);
  std::vector<std::string> golds;
  std::vector<BinaryLabel> preds;
  for (int i = 0; i < 997; ++i) {
    golds.push_back(names[uniform_index(rng, 4)]);
    preds.push_back(uniform01(rng) < 0.6 ? BinaryLabel::kSensitive : BinaryLabel::kNonsensitive);
  }
  std::size_t right = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool sensitive = golds[i] != "neutral";
    right += (preds[i] == BinaryLabel::kSensitive) == sensitive;
  }
  const double war = weighted_average_recall(per_class_recall(preds, golds, mapping));
  near(war, static_cast<double>(right) / static_cast<double>(golds.size()), "weighted recall");
  if (o.pass) o.detail = "11 fixture values within 1e-9; weighted recall " + fmt("%.9f", war) + " matches recount";
  return o;
}

// 7. A second pipeline run with the same config reproduces every output byte.
Outcome determinism(EndToEnd& e2e) {
  Outcome o;
  if (!e2e.first.ok) {
    o.require(false, "first run failed");
    return o;
  }
  // Same config file, same place: move the first outputs aside and rerun.
  fs::rename(e2e.dir.file("a/out"), e2e.dir.file("a/first"));
  const auto second = run_pipeline(e2e.dir.file("a"), e2e.data_dir);
  if (!second.ok) {
    o.require(false, second.failure);
    return o;
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(e2e.dir.file("a/first"))) {
    const auto name = entry.path().filename().string();
    const auto other = e2e.dir.file("a/out/" + name);
    o.require(fs::exists(other) &&
                  testutil::read_file(entry.path().string()) == testutil::read_file(other),
              name + " differs");
    ++files;
  }
  for (const std::string must :
       {"forum_scores.tsv", "stage1.jsonl", "stage2.jsonl", "stage1.log.tsv", "twostage.log.tsv",
        "stage1.metrics.jsonl", "twostage.metrics.txt", "blacklist.metrics.jsonl"}) {
    o.require(fs::exists(e2e.dir.file("a/out/" + must)), must + " missing");
  }
  if (o.pass) o.detail = std::to_string(files) + " output files byte-identical across two runs";
  return o;
}

// 8. Checkpoint save/load/score and rejection of damaged inputs.
Outcome checkpoint_round_trip() {
  Outcome o;
  testutil::TempDir dir("acceptance-ckpt");
  Rng rng(8);
  std::vector<TokenSeq> seqs;
  for (int i = 0; i < 100; ++i) {
    TokenSeq s(1 + uniform_index(rng, 12));
    for (auto& t : s) t = "w" + std::to_string(uniform_index(rng, 60));
    seqs.push_back(s);
  }
  const auto vocab = Vocabulary::build(seqs, 1, 1000);
  auto params = init_params<float>(ModelShape{vocab.size(), 6, 5, 20}, 8);
  for (auto& v : params.values) v += static_cast<float>(uniform(rng, -0.3, 0.3));
  const Classifier model(vocab, params);
  const auto path = dir.file("m.ckpt");
  save_checkpoint(path, model);
  const auto loaded = load_checkpoint(path);
  o.require(loaded.params().values == model.params().values, "parameters differ after load");
  std::size_t exact = 0;
  for (auto s : seqs) {
    s.push_back("unseen");
    exact += loaded.score_tokens(s).p_sensitive == model.score_tokens(s).p_sensitive;
  }
  o.require(exact == seqs.size(), std::to_string(seqs.size() - exact) + " scores differ");

  auto bytes = testutil::read_file(path);
  const auto at = bytes.find("hidden 5");
  o.require(at != std::string::npos, "manifest lacks hidden size");
  if (at != std::string::npos) {
    bytes.replace(at, 8, "hidden 7");
    testutil::write_file(dir.file("bad.ckpt"), bytes);
    fs::copy_file(vocab_path_for(path), vocab_path_for(dir.file("bad.ckpt")));
    const auto r = cli({"score", "--checkpoint", dir.file("bad.ckpt"), "--text", "w1"});
    o.require(r.code == 4, "corrupted manifest exit " + std::to_string(r.code));
  }
  Vocabulary::build({{"other", "words"}}, 1, 1000).save(vocab_path_for(path));
  const auto r = cli({"score", "--checkpoint", path, "--text", "w1"});
  o.require(r.code == 2, "vocab mismatch exit " + std::to_string(r.code));
  if (o.pass) o.detail = "100/100 scores bit-exact; corrupted manifest exit 4; vocab mismatch exit 2";
  return o;
}

// 9. 24,783 ids at 0.9/0/0.1.
Outcome split_ratios() {
  Outcome o;
  std::vector<Utterance> items;
  for (int i = 0; i < 24783; ++i) items.push_back({"id" + std::to_string(i), "x", "", {}});
  const auto r = split_dataset(items, SplitSpec{0.9, 0.0, 0.1, 9});
  o.require(r.train.size() == 22305 && r.dev.empty() && r.test.size() == 2478,
            "sizes " + std::to_string(r.train.size()) + "/" + std::to_string(r.dev.size()) + "/" +
                std::to_string(r.test.size()));
  std::set<std::string> seen;
  for (const auto* part : {&r.train, &r.test}) {
    for (const auto& u : *part) seen.insert(u.id);
  }
  o.require(seen.size() == items.size(), "partitions overlap or drop ids");
  if (o.pass) o.detail = "(22305, 0, 2478), disjoint and covering";
  return o;
}

}  // namespace

int main() {
  EndToEnd e2e;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 gradient correctness", gradient_correctness},
      {"2 ranking oracle", ranking_oracle},
      {"3 stage-2 predicate exactness", stage2_predicates},
      {"4 quota fidelity", quota_fidelity},
      {"5 end-to-end pattern", [&] { return end_to_end(e2e); }},
      {"6 metric correctness", metric_correctness},
      {"7 determinism", [&] { return determinism(e2e); }},
      {"8 checkpoint round-trip", checkpoint_round_trip},
      {"9 split ratios", split_ratios},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    failed += !o.pass;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
