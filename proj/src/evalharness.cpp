#include "refscore/evalharness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "refscore/errors.hpp"
#include "refscore/textproc.hpp"

namespace refscore {

ScoreFn as_score_fn(const TrainedScorer& scorer) {
  return [&scorer](const DocumentRecord& doc, const std::string& summary) {
    return scorer.predict(doc, summary);
  };
}

std::string RougeVariantSpec::label() const {
  if (variant == RougeVariant::rouge_n) return "ROUGE-" + std::to_string(n);
  std::ostringstream os;
  os << "ROUGE-W-" << weight;
  return os.str();
}

EvalReport evaluate(const ScoreFn& scorer, const std::vector<LabeledSample>& samples,
                    const Corpus& corpus, EvalTask task, const std::string& dataset_id,
                    const std::string& model_id) {
  if (samples.empty()) throw InsufficientDataError("no samples to evaluate");
  std::vector<double> predictions, labels;
  predictions.reserve(samples.size());
  labels.reserve(samples.size());
  for (const auto& s : samples) {
    if (task == EvalTask::classification && s.label != 0.0 && s.label != 1.0)
      throw ConfigurationError("classification task needs labels in {0,1}");
    predictions.push_back(scorer(corpus.document(s.doc_id), s.summary_tokens.joined()));
    labels.push_back(s.label);
  }
  EvalReport report;
  report.task = task;
  report.dataset_id = dataset_id;
  report.model_id = model_id;
  report.sample_count = samples.size();
  if (task == EvalTask::classification)
    report.metric = accuracy(predictions, labels, 0.5) * 100.0;
  else
    report.metric = pearson(predictions, labels) * 100.0;
  return report;
}

std::vector<CrossDomainCell> cross_domain_matrix(
    const std::map<std::string, ScoreFn>& scorers,
    const std::map<std::string, EvalDataset>& targets) {
  std::vector<CrossDomainCell> cells;
  std::map<std::string, double> in_domain_acc;
  for (const auto& [source, scorer] : scorers) {
    for (const auto& [target, data] : targets) {
      EvalReport r = evaluate(scorer, data.samples, *data.corpus, EvalTask::classification,
                              target, source);
      CrossDomainCell cell;
      cell.source = source;
      cell.target = target;
      cell.target_size = data.samples.size();
      cell.accuracy = r.metric;
      cell.in_domain = source == target;
      if (cell.in_domain) in_domain_acc[target] = cell.accuracy;
      cells.push_back(cell);
    }
  }
  for (auto& cell : cells) {
    auto it = in_domain_acc.find(cell.target);
    if (it != in_domain_acc.end()) cell.delta_vs_in_domain = cell.accuracy - it->second;
  }
  return cells;
}

double set_score(const ScoreFn& scorer, const DocumentSet& doc_set, const std::string& summary,
                 const Corpus& corpus) {
  double total = 0.0;
  for (const auto& id : doc_set.doc_ids) total += scorer(corpus.document(id), summary);
  return total;
}

namespace {

AlignmentCell correlate(const std::vector<double>& model, const std::vector<double>& human) {
  AlignmentCell cell;
  try {
    cell.pearson = pearson(model, human);
  } catch (const UndefinedCorrelationError&) {
  }
  try {
    cell.spearman = spearman(model, human);
  } catch (const UndefinedCorrelationError&) {
  }
  return cell;
}

AlignmentRow correlate_row(const std::string& name, const std::vector<double>& model_scores,
                           const std::vector<const HumanScoreRecord*>& humans) {
  std::vector<double> mp, lq, ov;
  for (const auto* h : humans) {
    mp.push_back(h->modified_pyramid);
    lq.push_back(h->linguistic_quality);
    ov.push_back(h->overall);
  }
  AlignmentRow row;
  row.name = name;
  row.modified_pyramid = correlate(model_scores, mp);
  row.linguistic_quality = correlate(model_scores, lq);
  row.overall = correlate(model_scores, ov);
  return row;
}

}  // namespace

AlignmentReport align_with_humans(const ScoreFn& scorer, const std::vector<DocumentSet>& doc_sets,
                                  const std::map<CandidateKey, std::string>& candidates,
                                  const std::vector<HumanScoreRecord>& human_scores,
                                  const Corpus& corpus, bool allow_partial) {
  std::map<std::string, const DocumentSet*> sets;
  for (const auto& s : doc_sets) sets[s.set_id] = &s;

  AlignmentReport report;
  std::vector<double> model_scores;
  std::vector<const HumanScoreRecord*> humans;
  for (const auto& h : human_scores) {
    auto set_it = sets.find(h.set_id);
    auto cand_it = candidates.find({h.set_id, h.summarizer_id});
    if (set_it == sets.end() || cand_it == candidates.end()) {
      std::string reason = set_it == sets.end() ? "missing document set" : "missing summary";
      if (!allow_partial)
        throw ReferentialIntegrityError("(" + h.set_id + ", " + h.summarizer_id + "): " + reason);
      report.dropped.push_back("(" + h.set_id + ", " + h.summarizer_id + "): " + reason);
      continue;
    }
    model_scores.push_back(set_score(scorer, *set_it->second, cand_it->second, corpus));
    humans.push_back(&h);
  }
  if (model_scores.size() < 2)
    throw InsufficientDataError("alignment needs at least 2 scored pairs");
  report.pair_count = model_scores.size();
  report.rows.push_back(correlate_row("model", model_scores, humans));
  return report;
}

std::vector<AlignmentRow> rouge_baseline(
    const std::map<CandidateKey, std::string>& candidates,
    const std::map<std::string, std::vector<std::string>>& references,
    const std::vector<HumanScoreRecord>& human_scores,
    const std::vector<RougeVariantSpec>& variants) {
  std::vector<const HumanScoreRecord*> humans;
  // per variant: P/R/F score vectors in human-record order
  std::vector<std::array<std::vector<double>, 3>> scores(variants.size());
  for (const auto& h : human_scores) {
    auto cand_it = candidates.find({h.set_id, h.summarizer_id});
    auto ref_it = references.find(h.set_id);
    if (cand_it == candidates.end() || ref_it == references.end() || ref_it->second.empty())
      throw ReferentialIntegrityError("rouge baseline: missing candidate or reference for (" +
                                      h.set_id + ", " + h.summarizer_id + ")");
    humans.push_back(&h);
    auto cand_tokens = tokenize(cand_it->second).tokens;
    for (std::size_t v = 0; v < variants.size(); ++v) {
      double best_p = 0.0, best_r = 0.0, best_f = 0.0;
      for (const auto& ref : ref_it->second) {
        auto ref_tokens = tokenize(ref).tokens;
        RougeScore s = variants[v].variant == RougeVariant::rouge_n
                           ? rouge_n(cand_tokens, ref_tokens, variants[v].n)
                           : rouge_w(cand_tokens, ref_tokens, variants[v].weight);
        best_p = std::max(best_p, s.precision);
        best_r = std::max(best_r, s.recall);
        best_f = std::max(best_f, s.f1);
      }
      scores[v][0].push_back(best_p);
      scores[v][1].push_back(best_r);
      scores[v][2].push_back(best_f);
    }
  }
  static const char* suffix[3] = {"P", "R", "F"};
  std::vector<AlignmentRow> rows;
  for (std::size_t v = 0; v < variants.size(); ++v)
    for (int s = 0; s < 3; ++s)
      rows.push_back(
          correlate_row(variants[v].label() + " " + suffix[s], scores[v][static_cast<std::size_t>(s)], humans));
  return rows;
}

}  // namespace refscore
