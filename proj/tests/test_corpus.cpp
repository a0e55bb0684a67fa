#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "sensboot/corpus.hpp"
#include "sensboot/error.hpp"
#include "sensboot/seed.hpp"
#include "test_util.hpp"

using namespace sensboot;

TEST_SUITE("corpus") {

TEST_CASE("tokenize goldens") {
  CHECK(tokenize("You're STUPID!") == TokenSeq{"you're", "stupid"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  a,,b.  c ") == TokenSeq{"a,,b", "c"});
  CHECK(tokenize("...!!!").empty());
  CHECK(tokenize("\"quoted\" (parens)") == TokenSeq{"quoted", "parens"});
  CHECK(tokenize("tab\tsep\nnew") == TokenSeq{"tab", "sep", "new"});
}

TEST_CASE("tokenize handles unicode whitespace, case and punctuation") {
  // U+00A0 no-break space and U+3000 ideographic space separate tokens.
  CHECK(tokenize("a\xC2\xA0" "b\xE3\x80\x80" "c") == TokenSeq{"a", "b", "c"});
  // Greek and Cyrillic capitals lowercase; Latin-1 as well.
  CHECK(tokenize("\xCE\x91\xCE\x92 \xD0\x90\xD0\x91 \xC3\x89T\xC3\x89") ==
        TokenSeq{"\xCE\xB1\xCE\xB2", "\xD0\xB0\xD0\xB1", "\xC3\xA9t\xC3\xA9"});
  // Curly quotes and guillemets are stripped at token edges.
  CHECK(tokenize("\xE2\x80\x9Chello\xE2\x80\x9D \xC2\xABhi\xC2\xBB") ==
        TokenSeq{"hello", "hi"});
  // Invalid UTF-8 becomes U+FFFD rather than failing.
  CHECK(tokenize("ab\xFF") == TokenSeq{"ab\xEF\xBF\xBD"});
}

TEST_CASE("tokenize is idempotent on its joined output") {
  Rng rng(11);
  const std::string alphabet[] = {"a", "B", "z", "'", ",", ".", "!", " ", "  ", "\t",
                                  "\xC3\x89", "\xE2\x80\x9C", "-", "x", "?", "0"};
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const auto len = uniform_index(rng, 30);
    for (std::uint64_t i = 0; i < len; ++i) text += alphabet[uniform_index(rng, 16)];
    const auto once = tokenize(text);
    std::string joined;
    for (std::size_t i = 0; i < once.size(); ++i) {
      if (i) joined += ' ';
      joined += once[i];
    }
    const auto twice = tokenize(joined);
    REQUIRE(twice == once);
    for (const auto& t : once) {
      CHECK(!t.empty());
      CHECK(t.find(' ') == std::string::npos);
    }
  }
}

TEST_CASE("tokenize_all matches the serial reference") {
  std::vector<Utterance> corpus;
  for (int i = 0; i < 500; ++i) {
    corpus.push_back({std::to_string(i), "Word" + std::to_string(i % 7) + ", Other!", "f", {}});
  }
  CHECK(tokenize_all(corpus) == tokenize_all_serial(corpus));
}

TEST_CASE("read_corpus fixtures") {
  testutil::TempDir dir("corpus");
  SUBCASE("single record") {
    testutil::write_file(dir.file("one.jsonl"),
                         R"({"id":"a","text":"hi","forum":"f"})" "\n");
    auto c = read_corpus(dir.file("one.jsonl"), CorpusFormat::kJsonl);
    REQUIRE(c.utterances.size() == 1);
    CHECK(c.utterances[0].id == "a");
    CHECK(c.utterances[0].text == "hi");
    CHECK(c.utterances[0].forum == "f");
    CHECK(!c.utterances[0].gold_label);
  }
  SUBCASE("empty file") {
    testutil::write_file(dir.file("empty.jsonl"), "");
    auto c = read_corpus(dir.file("empty.jsonl"), CorpusFormat::kJsonl);
    CHECK(c.utterances.empty());
    CHECK(c.stats.skipped == 0);
    CHECK(c.stats.lines == 0);
  }
  SUBCASE("three lines, one missing text") {
    testutil::write_file(dir.file("three.jsonl"),
                         R"({"id":"a","text":"x"})" "\n"
                         R"({"id":"b"})" "\n"
                         R"({"id":"c","text":"y","label":"sensitive"})" "\n");
    auto c = read_corpus(dir.file("three.jsonl"), CorpusFormat::kJsonl);
    CHECK(c.utterances.size() == 2);
    CHECK(c.stats.skipped == 1);
    CHECK(c.stats.lines == 3);
    CHECK(c.stats.skip_reasons.at("missing text") == 1);
    CHECK(c.utterances[1].gold_label == std::optional<std::string>("sensitive"));
  }
  SUBCASE("malformed lines are tallied") {
    testutil::write_file(dir.file("bad.jsonl"),
                         "not json\n"
                         "\n"
                         R"({"id":"","text":"x"})" "\n"
                         R"({"id":"d","text":"x"})" "\n"
                         R"({"id":"d","text":"again"})" "\n");
    auto c = read_corpus(dir.file("bad.jsonl"), CorpusFormat::kJsonl);
    CHECK(c.utterances.size() == 1);
    CHECK(c.stats.records + c.stats.skipped == c.stats.lines);
    CHECK(c.stats.skipped == 4);
  }
  SUBCASE("tsv keeps tabs in the text column") {
    testutil::write_file(dir.file("c.tsv"),
                         "a\tforum\t-\thello\tworld\n"
                         "b\tforum\ttoxic\tbye\n"
                         "broken line\n");
    auto c = read_corpus(dir.file("c.tsv"), CorpusFormat::kTsv);
    REQUIRE(c.utterances.size() == 2);
    CHECK(c.utterances[0].text == "hello\tworld");
    CHECK(!c.utterances[0].gold_label);
    CHECK(c.utterances[1].gold_label == std::optional<std::string>("toxic"));
    CHECK(c.stats.skipped == 1);
  }
  SUBCASE("unreadable path") {
    CHECK_THROWS_AS(read_corpus(dir.file("missing.jsonl"), CorpusFormat::kJsonl), DataError);
  }
}

TEST_CASE("record count plus skips equals line count") {
  testutil::TempDir dir("corpus-count");
  Rng rng(5);
  const std::string lines[] = {R"({"id":"ID","text":"t"})", R"({"text":"t"})", "garbage",
                               "", R"({"id":"ID","text":"t","forum":"f","label":"x"})"};
  for (int trial = 0; trial < 50; ++trial) {
    std::string content;
    const auto n = uniform_index(rng, 40);
    for (std::uint64_t i = 0; i < n; ++i) {
      auto l = lines[uniform_index(rng, 5)];
      if (auto p = l.find("ID"); p != std::string::npos) {
        l.replace(p, 2, std::to_string(uniform_index(rng, 30)));
      }
      content += l + "\n";
    }
    testutil::write_file(dir.file("r.jsonl"), content);
    auto c = read_corpus(dir.file("r.jsonl"), CorpusFormat::kJsonl);
    CHECK(c.stats.lines == n);
    CHECK(c.stats.records + c.stats.skipped == c.stats.lines);
    CHECK(c.utterances.size() == c.stats.records);
  }
}

TEST_CASE("jsonl and tsv round-trip") {
  testutil::TempDir dir("roundtrip");
  Rng rng(3);
  const std::string pieces[] = {"a", "Z", " ", "\xC3\xA9", "\"", "\\", "x", "!", "\t", "{"};
  for (auto format : {CorpusFormat::kJsonl, CorpusFormat::kTsv}) {
    std::vector<Utterance> data;
    for (int i = 0; i < 200; ++i) {
      Utterance u;
      u.id = "id" + std::to_string(i);
      const auto len = uniform_index(rng, 12);
      for (std::uint64_t k = 0; k < len; ++k) {
        const auto& p = pieces[uniform_index(rng, 10)];
        // TSV text may hold tabs; ids and forums never do.
        u.text += p;
      }
      u.forum = uniform_index(rng, 2) ? "forum" + std::to_string(i % 5) : "";
      if (uniform_index(rng, 2)) u.gold_label = "cls" + std::to_string(i % 3);
      data.push_back(u);
    }
    const auto path = dir.file(std::string("rt.") + std::string(to_string(format)));
    write_corpus(path, format, data);
    auto back = read_corpus(path, format);
    REQUIRE(back.utterances.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      CHECK(back.utterances[i].id == data[i].id);
      CHECK(back.utterances[i].text == data[i].text);
      CHECK(back.utterances[i].forum == data[i].forum);
      CHECK(back.utterances[i].gold_label == data[i].gold_label);
    }
  }
}

TEST_CASE("collapse_label presets") {
  CHECK(LabelMapping::toxic_comments().collapse("threat") == BinaryLabel::kSensitive);
  CHECK(LabelMapping::toxic_comments().collapse("identity_hate") == BinaryLabel::kSensitive);
  CHECK(LabelMapping::twitter().collapse("Neither") == BinaryLabel::kNonsensitive);
  CHECK(LabelMapping::twitter().collapse("Offensive") == BinaryLabel::kSensitive);
  try {
    LabelMapping::twitter().collapse("banana");
    FAIL("expected an unknown-class error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("banana") != std::string::npos);
  }
  CHECK_THROWS_AS(LabelMapping({"a", "b"}, {"b"}), ConfigError);
}

TEST_CASE("split sizes") {
  std::vector<Utterance> ten;
  for (int i = 0; i < 10; ++i) ten.push_back({"u" + std::to_string(i), "t", "", {}});
  auto s = split_dataset(ten, {0.8, 0.1, 0.1, 7});
  CHECK(s.train.size() == 8);
  CHECK(s.dev.size() == 1);
  CHECK(s.test.size() == 1);
  CHECK(split_sizes(24783, {0.9, 0.0, 0.1, 0}) == std::array<std::size_t, 3>{22305, 0, 2478});
  CHECK(split_sizes(0, {0.8, 0.1, 0.1, 0}) == std::array<std::size_t, 3>{0, 0, 0});
  CHECK_THROWS_AS(SplitSpec({0.5, 0.2, 0.2, 0}).validate(), ConfigError);
  CHECK_THROWS_AS(SplitSpec({1.2, -0.1, -0.1, 0}).validate(), ConfigError);
}

TEST_CASE("split is disjoint, exhaustive and order independent") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = uniform_index(rng, 300);
    std::vector<Utterance> data;
    for (std::uint64_t i = 0; i < n; ++i) data.push_back({"x" + std::to_string(i * 7919), "t", "", {}});
    const SplitSpec spec{0.7, 0.2, 0.1, rng()};
    auto a = split_dataset(data, spec);
    std::multiset<std::string> all;
    for (auto* part : {&a.train, &a.dev, &a.test}) {
      for (const auto& u : *part) all.insert(u.id);
    }
    CHECK(all.size() == n);
    CHECK(std::set<std::string>(all.begin(), all.end()).size() == n);
    const auto sizes = split_sizes(n, spec);
    CHECK(a.train.size() == sizes[0]);
    CHECK(a.dev.size() == sizes[1]);
    CHECK(a.test.size() == sizes[2]);
    // Each size is within one of floor(N * frac).
    const double fr[] = {0.7, 0.2, 0.1};
    for (int k = 0; k < 3; ++k) {
      const double exact = static_cast<double>(n) * fr[k];
      CHECK(static_cast<double>(sizes[k]) >= std::floor(exact + 1e-9) - 1e-9);
      CHECK(static_cast<double>(sizes[k]) <= std::floor(exact + 1e-9) + 1.0 + 1e-9);
    }

    auto shuffled = data;
    seeded_shuffle(shuffled.begin(), shuffled.end(), rng);
    auto b = split_dataset(shuffled, spec);
    auto ids = [](const std::vector<Utterance>& v) {
      std::set<std::string> s;
      for (const auto& u : v) s.insert(u.id);
      return s;
    };
    CHECK(ids(a.train) == ids(b.train));
    CHECK(ids(a.dev) == ids(b.dev));
    CHECK(ids(a.test) == ids(b.test));
  }
}

}  // TEST_SUITE
