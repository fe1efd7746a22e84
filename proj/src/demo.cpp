#include "refscore/demo.hpp"

#include <vector>

#include "refscore/errors.hpp"
#include "refscore/rng.hpp"

namespace refscore {

namespace {

// pronounceable-ish synthetic words, unique per (topic, index)
std::string demo_word(int topic, int index) {
  static const char* onsets[] = {"ba", "ce", "di", "fo", "gu", "ka", "le", "mi", "no", "pu",
                                 "ra", "se", "ti", "vo", "wu", "za"};
  static const char* codas[] = {"lin", "mor", "nat", "per", "rak", "sol", "tum", "ven",
                                "wex", "yor", "zin", "dal", "fen", "gos", "hul", "jat"};
  return std::string(onsets[topic % 16]) + codas[index % 16] + std::to_string(topic) + "x" +
         std::to_string(index);
}

const std::vector<std::string>& fillers() {
  static const std::vector<std::string> words = {"the", "of", "and", "with", "near"};
  return words;
}

}  // namespace

Corpus make_demo_corpus(const DemoConfig& config) {
  if (config.n_docs < 3 || config.n_topics < 2)
    throw ConfigurationError("demo corpus needs >= 3 docs and >= 2 topics");
  Corpus corpus;
  Rng rng(config.seed);
  for (int i = 0; i < config.n_docs; ++i) {
    const int topic = i % config.n_topics;
    std::vector<std::string> doc_words;
    std::string text;
    for (int s = 0; s < config.doc_sentences; ++s) {
      std::string sentence;
      for (int w = 0; w < config.words_per_sentence; ++w) {
        std::string word =
            demo_word(topic, static_cast<int>(rng.next_below(
                                 static_cast<std::uint64_t>(config.words_per_topic))));
        doc_words.push_back(word);
        if (!sentence.empty()) sentence += ' ';
        sentence += word;
        if (config.filler_style && w + 1 < config.words_per_sentence) {
          sentence += ' ';
          sentence += fillers()[rng.next_below(fillers().size())];
        }
      }
      sentence += '.';
      if (!text.empty()) text += ' ';
      text += sentence;
    }
    DocumentRecord doc;
    doc.doc_id = config.domain + "-" + std::to_string(i);
    doc.text = text;
    doc.domain = config.domain;
    corpus.add_document(std::move(doc));

    // summary reuses words of this document
    std::string summary;
    for (int s = 0; s < config.summary_sentences; ++s) {
      std::string sentence;
      for (int w = 0; w < config.words_per_summary_sentence; ++w) {
        if (!sentence.empty()) sentence += ' ';
        sentence += doc_words[rng.next_below(doc_words.size())];
      }
      sentence += '.';
      if (!summary.empty()) summary += ' ';
      summary += sentence;
    }
    SummaryRecord sum;
    sum.summary_id = "s-" + config.domain + "-" + std::to_string(i);
    sum.doc_id = config.domain + "-" + std::to_string(i);
    sum.text = summary;
    sum.origin = SummaryOrigin::reference;
    corpus.add_summary(std::move(sum));
  }
  return corpus;
}

}  // namespace refscore
