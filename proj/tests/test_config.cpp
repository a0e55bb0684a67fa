#include <doctest.h>

#include "sensboot/config.hpp"
#include "sensboot/error.hpp"
#include "sensboot/seed.hpp"
#include "test_util.hpp"

using namespace sensboot;

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const PipelineConfig c = config_from_entries({}, "");
  CHECK(c.rank_low == 0.002);
  CHECK(c.rank_high == 0.01);
  CHECK(c.stage2_p_high == 0.8);
  CHECK(c.stage2_p_low == 0.3);
  CHECK(c.stage2_model_fraction == 0.7);
  CHECK(c.train.learning_rate == 0.001);
  CHECK(c.train.batch_size == 500);
}

TEST_CASE("loading, path resolution and overrides") {
  testutil::TempDir dir("config");
  testutil::write_file(dir.file("p.conf"),
                       "# comment\n"
                       "[global]\nseed = 5\nout_dir = results\n"
                       "; another comment\n"
                       "[corpus]\npath = data/c.jsonl\nformat = tsv\n"
                       "[ranking]\nlow = 0.001\nhigh = 0.02\n"
                       "[train]\nhidden = 8\nepochs = 2\n"
                       "[labels]\nsensitive = a, b\nnonsensitive = c\n");
  const auto c = load_config(dir.file("p.conf"));
  CHECK(c.seed == 5);
  CHECK(c.out_dir == (dir.path() / "results").string());
  CHECK(c.corpus_path == (dir.path() / "data/c.jsonl").string());
  CHECK(c.corpus_format == CorpusFormat::kTsv);
  CHECK(c.rank_low == 0.001);
  CHECK(c.train.hidden == 8);
  CHECK(c.labels.collapse("b") == BinaryLabel::kSensitive);
  CHECK(c.labels.collapse("c") == BinaryLabel::kNonsensitive);

  const auto o = load_config(dir.file("p.conf"), {{"global.seed", "9"}, {"train.hidden", "4"},
                                                  {"global.out_dir", "elsewhere"}});
  CHECK(o.seed == 9);
  CHECK(o.train.hidden == 4);
  CHECK(o.out_dir == "elsewhere");
}

TEST_CASE("stage seeds come from the global seed") {
  const auto a = config_from_entries({{"global.seed", "1"}}, "");
  const auto b = config_from_entries({{"global.seed", "2"}}, "");
  CHECK(a.stage1_seed() == derive_seed(1, "stage1"));
  CHECK(a.stage1_seed() != b.stage1_seed());
  CHECK(a.stage2().seed != a.stage1_seed());
  CHECK(a.train_config().seed != a.split_spec().seed);
}

TEST_CASE("config errors") {
  testutil::TempDir dir("config-bad");
  CHECK_THROWS_AS(config_from_entries({{"global.nope", "1"}}, ""), ConfigError);
  CHECK_THROWS_AS(config_from_entries({{"global.seed", "x1"}}, ""), ConfigError);
  CHECK_THROWS_AS(config_from_entries({{"ranking.low", "0.5"}, {"ranking.high", "0.1"}}, ""),
                  ConfigError);
  CHECK_THROWS_AS(config_from_entries({{"stage2.p_high", "0.2"}}, ""), ConfigError);
  CHECK_THROWS_AS(config_from_entries({{"split.train", "0.5"}}, ""), ConfigError);
  CHECK_THROWS_AS(config_from_entries({{"train.dropout", "1.5"}}, ""), ConfigError);
  CHECK_THROWS_AS(config_from_entries({{"corpus.format", "xml"}}, ""), ConfigError);
  CHECK_THROWS_AS(load_config(dir.file("missing.conf")), ConfigError);
  testutil::write_file(dir.file("bad.conf"), "[global\nseed = 1\n");
  CHECK_THROWS_AS(load_config(dir.file("bad.conf")), ConfigError);
  testutil::write_file(dir.file("top.conf"), "seed = 1\n");
  CHECK_THROWS_AS(load_config(dir.file("top.conf")), ConfigError);
  CHECK_THROWS_AS(require_file(dir.file("none"), "thing"), ConfigError);
}

}  // TEST_SUITE
