#include <doctest.h>

#include "sensboot/blacklist.hpp"
#include "sensboot/ranking.hpp"
#include "sensboot/synth.hpp"

using namespace sensboot;

TEST_SUITE("synth") {

TEST_CASE("generator is deterministic and plants the test overlap exactly") {
  SynthSpec spec;
  spec.utterances = 3000;
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  REQUIRE(a.corpus.size() == 3000);
  CHECK(a.corpus[17].text == b.corpus[17].text);
  CHECK(a.testset.size() == spec.test_sensitive + spec.test_nonsensitive);

  const Blacklist bl(a.blacklist);
  std::size_t sensitive_hits = 0, nonsensitive_hits = 0, sensitive = 0;
  for (const auto& u : a.testset) {
    const bool hit = contains_match(tokenize(u.text), bl);
    if (*u.gold_label == kSynthNonsensitiveClass) {
      nonsensitive_hits += hit;
    } else {
      ++sensitive;
      sensitive_hits += hit;
    }
  }
  CHECK(sensitive == a.test_sensitive_count);
  CHECK(sensitive_hits == a.test_overlap_count);
  CHECK(nonsensitive_hits == a.test_false_positive_count);
  CHECK(a.overlap_fraction() == 0.25);
}

TEST_CASE("forum kinds land in the expected pools at default thresholds") {
  SynthSpec spec;
  spec.utterances = 20000;
  const auto data = generate_synthetic(spec);
  const auto p = partition_forums(score_forums(data.corpus, Blacklist(data.blacklist)));
  for (const auto& f : data.toxic_forums) CHECK(p.pool_of(f) == Pool::kSensitive);
  for (const auto& f : data.clean_forums) CHECK(p.pool_of(f) == Pool::kNonsensitive);
  SynthSpec bad = spec;
  bad.toxic_forums = 50;
  CHECK_THROWS(generate_synthetic(bad));
}

}  // TEST_SUITE
