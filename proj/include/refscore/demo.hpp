#ifndef REFSCORE_DEMO_HPP
#define REFSCORE_DEMO_HPP

#include <cstdint>
#include <string>

#include "refscore/corpus.hpp"

namespace refscore {

// Templated synthetic corpus: every document draws its sentences from one of
// n_topics disjoint word inventories and its reference summary reuses words
// of the document. Small enough to train on in seconds, separable enough
// that cross-paired negatives are learnable.
struct DemoConfig {
  int n_docs = 200;
  int n_topics = 40;
  int words_per_topic = 10;
  int doc_sentences = 4;
  int words_per_sentence = 8;
  int summary_sentences = 2;
  int words_per_summary_sentence = 12;
  std::string domain = "demo";
  // filler style interleaves common function words, giving a second "domain"
  // with the same topic inventories but a different surface texture
  bool filler_style = false;
  std::uint64_t seed = 1;
};

Corpus make_demo_corpus(const DemoConfig& config);

}  // namespace refscore

#endif  // REFSCORE_DEMO_HPP
