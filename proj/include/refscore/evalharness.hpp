#ifndef REFSCORE_EVALHARNESS_HPP
#define REFSCORE_EVALHARNESS_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "refscore/corpus.hpp"
#include "refscore/metrics.hpp"
#include "refscore/model.hpp"
#include "refscore/sampler.hpp"

namespace refscore {

// Anything that maps (document, summary text) to a score; TrainedScorer and
// test mocks both fit.
using ScoreFn = std::function<double(const DocumentRecord&, const std::string&)>;

ScoreFn as_score_fn(const TrainedScorer& scorer);

enum class EvalTask { classification, regression };

struct EvalReport {
  EvalTask task = EvalTask::classification;
  double metric = 0.0;  // accuracy % or PCC x 100
  std::string dataset_id;
  std::string model_id;
  std::size_t sample_count = 0;
};

struct CrossDomainCell {
  std::string source;
  std::string target;
  std::size_t target_size = 0;
  double accuracy = 0.0;  // percent
  bool in_domain = false;
  double delta_vs_in_domain = 0.0;
};

struct AlignmentCell {
  std::optional<double> pearson;   // empty = undefined (zero variance)
  std::optional<double> spearman;
};

struct AlignmentRow {
  std::string name;  // "model" or a ROUGE variant/suffix label
  AlignmentCell modified_pyramid;
  AlignmentCell linguistic_quality;
  AlignmentCell overall;
};

struct AlignmentReport {
  std::vector<AlignmentRow> rows;
  std::vector<std::string> dropped;  // "(set_id, summarizer_id): reason"
  std::size_t pair_count = 0;
};

struct EvalDataset {
  const Corpus* corpus = nullptr;
  std::vector<LabeledSample> samples;
};

EvalReport evaluate(const ScoreFn& scorer, const std::vector<LabeledSample>& samples,
                    const Corpus& corpus, EvalTask task, const std::string& dataset_id = "",
                    const std::string& model_id = "");

std::vector<CrossDomainCell> cross_domain_matrix(
    const std::map<std::string, ScoreFn>& scorers,
    const std::map<std::string, EvalDataset>& targets);

// Sum of the per-document scores over a document set.
double set_score(const ScoreFn& scorer, const DocumentSet& doc_set, const std::string& summary,
                 const Corpus& corpus);

using CandidateKey = std::pair<std::string, std::string>;  // (set_id, summarizer_id)

AlignmentReport align_with_humans(const ScoreFn& scorer, const std::vector<DocumentSet>& doc_sets,
                                  const std::map<CandidateKey, std::string>& candidates,
                                  const std::vector<HumanScoreRecord>& human_scores,
                                  const Corpus& corpus, bool allow_partial = false);

struct RougeVariantSpec {
  RougeVariant variant = RougeVariant::rouge_n;
  int n = 1;
  double weight = 1.2;
  std::string label() const;
};

// Correlations of ROUGE P/R/F against each human score type; multiple
// references per set are combined by taking the maximum.
std::vector<AlignmentRow> rouge_baseline(
    const std::map<CandidateKey, std::string>& candidates,
    const std::map<std::string, std::vector<std::string>>& references,
    const std::vector<HumanScoreRecord>& human_scores,
    const std::vector<RougeVariantSpec>& variants);

// report serialization (report.cpp)
std::string alignment_report_json(const AlignmentReport& report);
std::string alignment_report_table(const AlignmentReport& report);
std::string cross_domain_json(const std::vector<CrossDomainCell>& cells);
std::string cross_domain_table(const std::vector<CrossDomainCell>& cells);
std::string eval_report_json(const EvalReport& report);
void write_atomic(const std::string& path, const std::string& content);

}  // namespace refscore

#endif  // REFSCORE_EVALHARNESS_HPP
