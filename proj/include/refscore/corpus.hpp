#ifndef REFSCORE_CORPUS_HPP
#define REFSCORE_CORPUS_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "refscore/textproc.hpp"

namespace refscore {

struct DocumentRecord {
  std::string doc_id;
  std::string text;
  std::vector<std::string> sentences;  // fixed segmentation, computed at ingestion
  std::string domain;
};

enum class SummaryOrigin { reference, system };

struct SummaryRecord {
  std::string summary_id;
  std::string doc_id;
  std::string text;
  std::vector<std::string> sentences;
  SummaryOrigin origin = SummaryOrigin::reference;
};

struct DocumentSet {
  std::string set_id;
  std::vector<std::string> doc_ids;
};

struct HumanScoreRecord {
  std::string set_id;
  std::string summarizer_id;
  double modified_pyramid = 0.0;
  double linguistic_quality = 0.0;
  double overall = 0.0;
};

class Corpus {
 public:
  void add_document(DocumentRecord doc);
  void add_summary(SummaryRecord summary);

  const DocumentRecord& document(const std::string& doc_id) const;
  bool has_document(const std::string& doc_id) const { return docs_.count(doc_id) > 0; }
  const std::vector<std::string>& doc_ids() const { return doc_order_; }
  std::size_t num_documents() const { return doc_order_.size(); }
  std::size_t num_summaries() const { return summaries_.size(); }

  const std::vector<SummaryRecord>& summaries() const { return summaries_; }
  // First reference summary of a document, or nullptr.
  const SummaryRecord* reference_summary(const std::string& doc_id) const;

  std::size_t count_origin(SummaryOrigin origin) const;

 private:
  std::map<std::string, DocumentRecord> docs_;
  std::vector<std::string> doc_order_;  // insertion order
  std::vector<SummaryRecord> summaries_;
  std::map<std::string, std::size_t> first_reference_;  // doc_id -> index into summaries_
};

struct SplitAssignment {
  std::set<std::string> train;
  std::set<std::string> validation;
  std::set<std::string> test;
};

struct HumanEvalData {
  std::vector<DocumentSet> sets;
  std::vector<HumanScoreRecord> scores;
};

Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

// Document-keyed split: all summaries of a document follow it. Deterministic
// for a fixed seed; set sizes within one of fraction * N.
SplitAssignment make_splits(const Corpus& corpus, double f_train, double f_val, double f_test,
                            std::uint64_t seed);

HumanEvalData load_human_scores(const std::string& path);

// Counts tokens of documents and reference summaries whose doc_id is in
// `doc_ids` (pass the training split to keep test tokens out of mutations).
Vocabulary build_vocabulary(const Corpus& corpus, const std::set<std::string>& doc_ids);
Vocabulary build_vocabulary(const Corpus& corpus);

}  // namespace refscore

#endif  // REFSCORE_CORPUS_HPP
