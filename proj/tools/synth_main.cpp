// Writes the synthetic forum corpus, gold test set, placeholder blacklist
// and embedding file used by the demo and the acceptance suite.
#include <iostream>

#include <CLI11.hpp>

#include "sensboot/error.hpp"
#include "sensboot/synth.hpp"

int main(int argc, char** argv) {
  sensboot::SynthSpec spec;
  std::string out_dir = "synthetic";
  CLI::App app{"generate a synthetic forum corpus"};
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", spec.seed, "generator seed");
  app.add_option("--utterances", spec.utterances, "corpus size");
  app.add_option("--forums", spec.forums, "number of forums");
  app.add_option("--toxic-forums", spec.toxic_forums, "forums with a high sensitive share");
  app.add_option("--mixed-forums", spec.mixed_forums, "forums with a moderate share");
  app.add_option("--test-sensitive", spec.test_sensitive, "sensitive test items");
  app.add_option("--test-nonsensitive", spec.test_nonsensitive, "nonsensitive test items");
  app.add_option("--test-overlap", spec.test_overlap,
                 "share of sensitive test items containing a blacklist word");
  app.add_option("--dim", spec.embedding_dim, "embedding dimension");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto data = sensboot::generate_synthetic(spec);
    sensboot::write_synthetic(out_dir, data);
    std::cout << "corpus " << data.corpus.size() << "\ntestset " << data.testset.size()
              << "\noverlap " << data.test_overlap_count << "/" << data.test_sensitive_count
              << "\n";
  } catch (const sensboot::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  }
  return 0;
}
